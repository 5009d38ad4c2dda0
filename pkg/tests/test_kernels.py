import math
import random

import pytest

from ucs_entropy import kernels, r_inv
from ucs_entropy import _pykernels
from ucs_entropy.cover import mmcw

needs_compiled = pytest.mark.skipif(not kernels.compiled_available(), reason="compiled kernels not built")


@pytest.fixture
def backend():
    before = kernels.backend()
    yield kernels.use_backend
    kernels.use_backend(before)


def _random_families(rng):
    n = rng.randint(1, 6)
    return [[rng.getrandbits(10) | 1 << rng.randrange(10) for _ in range(rng.randint(1, 4))] for _ in range(n)]


@needs_compiled
def test_min_union_cover_backends_agree():
    from ucs_entropy import _ckernels

    rng = random.Random(11)
    for _ in range(300):
        fams = _random_families(rng)
        assert _ckernels.min_union_cover(fams, 10**6) == _pykernels.min_union_cover(fams, 10**6)


@needs_compiled
def test_min_union_cover_budget_agrees():
    from ucs_entropy import _ckernels

    fams = [[0b11, 0b101, 0b1001], [0b110, 0b1010], [0b1100, 0b10000 | 0b1], [0b11000, 0b100]]
    for cap in (0, 1, 3, 10):
        assert _ckernels.min_union_cover(fams, cap) == _pykernels.min_union_cover(fams, cap)


@needs_compiled
def test_max_mean_cycle_backends_agree():
    from ucs_entropy import _ckernels

    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(1, 7)
        succ = [[j for j in range(n) if rng.random() < 0.4] for _ in range(n)]
        w = [math.log2(rng.randint(1, 4)) for _ in range(n)]
        a, b = _ckernels.max_mean_cycle(succ, w), _pykernels.max_mean_cycle(succ, w)
        assert a == b or abs(a - b) < 1e-12


def test_empty_inputs():
    assert _pykernels.min_union_cover([], 10)[0] == 0
    assert _pykernels.max_mean_cycle([[]], [0.0]) == -math.inf


@pytest.mark.parametrize("name", ["python", pytest.param("compiled", marks=needs_compiled)])
def test_results_independent_of_backend(backend, systems, covers, name):
    backend(name)
    assert kernels.backend() == name
    assert [r_inv(systems["ex4"], "01234", None, n).count for n in (1, 2, 3)] == [3, 4, 5]
    assert abs(mmcw(covers["ex4_a2"]).karp - 0.25) < 1e-12


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.use_backend("gpu")
