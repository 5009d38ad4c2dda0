"""Backend selection for the hot kernels.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
pure-Python module is used. :func:`use_backend` switches at runtime (tests
and the benchmark compare both).
"""

from __future__ import annotations

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_active = "compiled" if _ckernels is not None else "python"


def compiled_available() -> bool:
    return _ckernels is not None


def backend() -> str:
    return _active


def use_backend(name: str) -> None:
    global _active
    if name not in ("compiled", "python"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "compiled" and _ckernels is None:
        raise RuntimeError("compiled kernels are not built")
    _active = name


def min_union_cover(families, max_nodes):
    if _active == "compiled" and all(f < (1 << 64) for fams in families for f in fams):
        return _ckernels.min_union_cover(families, max_nodes)
    return _pykernels.min_union_cover(families, max_nodes)


def max_mean_cycle(succ, weight):
    if _active == "compiled":
        return _ckernels.max_mean_cycle(succ, weight)
    return _pykernels.max_mean_cycle(succ, weight)
