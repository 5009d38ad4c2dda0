"""Time the compiled and pure-Python kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best wall time over ``--repeat`` runs per backend and
the speedup. Results are checked equal before timing.
"""

from __future__ import annotations

import argparse
import math
import random
import timeit

from ucs_entropy import _pykernels, kernels
from ucs_entropy.textio import fixture_path, load_system
from ucs_entropy.spanning import r_inv


def _cover_instances(seed: int, count: int):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        fams = [[rng.getrandbits(40) | 1 << rng.randrange(40) for _ in range(rng.randint(2, 6))] for _ in range(14)]
        out.append(fams)
    return out


def _cycle_instances(seed: int, count: int):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = 40
        succ = [[j for j in range(n) if rng.random() < 0.1] for _ in range(n)]
        w = [math.log2(rng.randint(1, 5)) for _ in range(n)]
        out.append((succ, w))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not kernels.compiled_available():
        print("compiled kernels are not built; run `python3 setup.py build_ext --inplace`")
        return 1
    from ucs_entropy import _ckernels

    covers = _cover_instances(1, 40)
    cycles = _cycle_instances(2, 40)
    ex2 = load_system(fixture_path("ex2.sys"))

    for fams in covers:
        assert _ckernels.min_union_cover(fams, 10**7) == _pykernels.min_union_cover(fams, 10**7)

    def rinv_under(name):
        def run():
            kernels.use_backend(name)
            try:
                return r_inv(ex2, ["0", "2"], None, 9).count
            finally:
                kernels.use_backend("compiled")

        return run

    assert rinv_under("python")() == rinv_under("compiled")() == 512

    workloads = [
        (
            "min_union_cover x40",
            lambda: [_ckernels.min_union_cover(f, 10**7) for f in covers],
            lambda: [_pykernels.min_union_cover(f, 10**7) for f in covers],
        ),
        (
            "max_mean_cycle x40",
            lambda: [_ckernels.max_mean_cycle(s, w) for s, w in cycles],
            lambda: [_pykernels.max_mean_cycle(s, w) for s, w in cycles],
        ),
        ("r_inv ex2 n=9", rinv_under("compiled"), rinv_under("python")),
    ]
    print(f"{'workload':<22}{'compiled_s':>12}{'python_s':>12}{'speedup':>10}")
    for name, fast, slow in workloads:
        tc = min(timeit.repeat(fast, number=1, repeat=args.repeat))
        tp = min(timeit.repeat(slow, number=1, repeat=args.repeat))
        print(f"{name:<22}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
