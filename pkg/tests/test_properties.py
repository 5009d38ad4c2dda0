import math
import random

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from ucs_entropy import CountMatrix, is_semi_conjugacy, mmcw, r_inv
from ucs_entropy.cover import derived_partition, entropy_bounds, is_quasi_invariant_partition
from ucs_entropy.graphnum import radius_is_one, spectral_radius
from ucs_entropy.oracles import random_invariant_target, random_semi_conjugate, random_system

seeds = st.integers(0, 2**32 - 1)


def _instance(seed):
    rng = random.Random(seed)
    s = random_system(rng, max_states=4)
    return rng, s, random_invariant_target(rng, s)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_subadditivity(seed):
    _, s, Q = _instance(seed)
    if Q is None:
        return
    r = {n: r_inv(s, Q, None, n).count for n in range(1, 5)}
    for n in range(1, 4):
        for p in range(1, 5 - n):
            assert r[n + p] <= r[n] * r[p]


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_subset_rule(seed):
    rng, s, Q = _instance(seed)
    if Q is None:
        return
    K1 = [x for x in Q if rng.random() < 0.5]
    K2 = [x for x in Q if rng.random() < 0.5]
    K12 = sorted(set(K1) | set(K2))
    for n in (1, 2, 3):
        a, b = r_inv(s, Q, K1, n).count, r_inv(s, Q, K2, n).count
        u = r_inv(s, Q, K12, n).count
        assert max(a, b) <= u <= a + b


def test_semi_conjugacy_monotone():
    rng = random.Random(2024)
    checked = 0
    while checked < 50:
        s1, s2, c = random_semi_conjugate(rng)
        assert is_semi_conjugacy(s1, s2, c)
        Q = random_invariant_target(rng, s1)
        if Q is None:
            continue
        K = [x for x in Q if rng.random() < 0.7] or Q[:1]
        piQ = sorted({c.state_map[x] for x in Q})
        piK = sorted({c.state_map[x] for x in K})
        for n in (1, 2, 3):
            assert r_inv(s2, piQ, piK, n).count <= r_inv(s1, Q, K, n).count
        checked += 1


def test_radius_one_detector_matches_enclosure():
    rng = np.random.default_rng(8)
    agree = 0
    for _ in range(500):
        n = int(rng.integers(1, 9))
        density = rng.uniform(0.05, 0.5)
        M = CountMatrix.from_rows((rng.random((n, n)) < density).astype(int).tolist())
        r = spectral_radius(M)
        inside = r.lo - 1e-9 <= 1 <= r.hi + 1e-9
        assert radius_is_one(M) == inside, M.rows
        agree += 1
    assert agree == 500


def test_sandwich_and_order_on_random_partitions():
    from ucs_entropy.oracles import random_cover

    rng = random.Random(99)
    seen = 0
    for _ in range(300):
        s = random_system(rng)
        Q = random_invariant_target(rng, s)
        if Q is None:
            continue
        c = random_cover(rng, s, Q)
        if c is None or not is_quasi_invariant_partition(c).ok:
            continue
        m = float(mmcw(c).value)
        b = entropy_bounds(c)
        assert b.lower.lo <= m + 1e-9 and m <= b.upper.hi + 1e-9
        assert b.rho_M.hi >= 1 - 1e-9 and b.rho_W.hi >= b.rho_M.lo - 1e-9
        assert mmcw(derived_partition(c)).value <= mmcw(c).value
        seen += 1
    assert seen >= 30
