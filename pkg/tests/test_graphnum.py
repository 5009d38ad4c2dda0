import math
import random

import pytest

from ucs_entropy import CountMatrix, OrderMismatch, mat_mul, mat_pow, norm_l1, norm_linf, scc, simple_cycles
from ucs_entropy.cover import cover_digraph
from ucs_entropy.errors import CycleBudgetExceeded
from ucs_entropy.graphnum import identity, radius_is_one, simple_cycle_indices, spectral_radius
from ucs_entropy.spanning import admissible_matrix


def cm(rows, labels=None):
    return CountMatrix.from_rows(rows, labels)


def test_mat_pow_and_norms():
    J = cm([[1, 1], [1, 1]])
    assert mat_pow(J, 2).tolist() == [[2, 2], [2, 2]]
    assert mat_pow(J, 0) == identity(J.labels)
    assert norm_l1(cm([[0, 1], [1, 0]])) == 2
    assert norm_l1(cm([[0, 0], [0, 0]])) == 0
    assert norm_linf(identity(["a", "b", "c"])) == 1
    assert norm_linf(cm([[0, 0], [0, 0]])) == 0
    with pytest.raises(OrderMismatch):
        mat_mul(J, cm([[1]]))


def test_big_integer_powers():
    two = cm([[2]])
    assert mat_pow(two, 200).rows[0][0] == 2**200


def test_example_norms(systems, covers):
    M = admissible_matrix(systems["ex4"], "01234", "abc")
    assert norm_l1(M) == 4
    assert norm_l1(mat_pow(M, 3)) == 6
    assert norm_linf(cover_digraph(covers["ex4_a1"]).W) == 2


def test_scc(covers):
    assert scc(identity(["0", "1", "2"])) == [("0",), ("1",), ("2",)]
    assert scc(cm([[1, 1, 1]] * 3)) == [("0", "1", "2")]
    comps = {frozenset(c) for c in scc(cover_digraph(covers["ex4_a2"]).M)}
    assert comps == {frozenset({"A20", "A21", "A22", "A23"}), frozenset({"A24"})}


def test_simple_cycles(covers):
    assert simple_cycles(cm([[1]])) == [("0",)]
    # a 2-cycle 0-1 and a chord-free 3-cycle 2-3-4
    g = cm(
        [
            [0, 1, 0, 0, 0],
            [1, 0, 0, 0, 0],
            [0, 0, 0, 1, 0],
            [0, 0, 0, 0, 1],
            [0, 0, 1, 0, 0],
        ]
    )
    assert simple_cycles(g) == [("0", "1"), ("2", "3", "4")]
    # EX3 A3: both cycles pass through A31; each rotation class is reported once
    assert simple_cycles(cover_digraph(covers["ex3_a3"]).M) == [("A31", "A32"), ("A31", "A33")]
    assert simple_cycles(cover_digraph(covers["ex4_a2"]).M) == [("A20", "A22", "A21", "A23"), ("A24",)]


def test_cycle_cap():
    K5 = [[j for j in range(5) if j != i] for i in range(5)]
    assert len(simple_cycle_indices(K5)) == 84
    with pytest.raises(CycleBudgetExceeded):
        simple_cycle_indices(K5, cap=10)


def _count_cycles_brute(succ):
    """Count simple cycles by trying every vertex sequence starting at its minimum."""
    n = len(succ)
    total = 0

    def extend(path):
        nonlocal total
        for w in succ[path[-1]]:
            if w == path[0]:
                total += 1
            elif w > path[0] and w not in path:
                extend(path + [w])

    for s in range(n):
        extend([s])
    return total


def test_simple_cycles_random_against_brute():
    rng = random.Random(3)
    for _ in range(150):
        n = rng.randint(1, 7)
        succ = [[j for j in range(n) if rng.random() < 0.35] for _ in range(n)]
        cycles = simple_cycle_indices(succ)
        assert len(cycles) == _count_cycles_brute(succ)
        for c in cycles:
            assert len(set(c)) == len(c) and c[0] == min(c)
            assert all(c[(i + 1) % len(c)] in succ[c[i]] for i in range(len(c)))


def test_spectral_radius_examples(covers):
    r = spectral_radius(cm([[2, 0], [0, 3]]))
    assert r.lo <= 3 <= r.hi and r.width <= 1e-9
    W3 = cover_digraph(covers["ex4_a3"]).W
    r = spectral_radius(W3)
    assert r.lo <= math.sqrt(6) <= r.hi and r.width <= 1e-9
    assert abs(r.lo - 2.449489742783) < 1e-11
    r = spectral_radius(cm([[0, 1], [1, 0]]))
    assert r.exact_one and r.lo <= 1 <= r.hi


def test_spectral_radius_start_vectors():
    M = cm([[1, 2, 0], [0, 1, 3], [1, 0, 0]])
    a = spectral_radius(M, start="eig")
    b = spectral_radius(M, start="ones")
    assert max(a.lo, b.lo) <= min(a.hi, b.hi)


def test_enclosures_shrink_monotonically(covers):
    r = spectral_radius(cover_digraph(covers["ex4_a3"]).W, start="ones")
    widths = [hi - lo for lo, hi in r.history]
    assert all(b <= a for a, b in zip(widths, widths[1:]))


def test_gelfand_sanity(systems, covers):
    mats = [admissible_matrix(systems["ex4"], "01234", "abc")]
    for c in covers.values():
        dg = cover_digraph(c)
        mats += [dg.M, dg.W]
    for M in mats:
        r = spectral_radius(M)
        g = norm_l1(mat_pow(M, 64)) ** (1 / 64)
        # the power norm overshoots rho by a polynomial factor that dies like k^(1/k)
        assert r.lo - 1e-6 <= g
        assert g <= r.hi * (M.order**2 * 65**M.order) ** (1 / 64)


def test_radius_one_detector():
    assert radius_is_one(cm([[1]]))
    assert radius_is_one(cm([[0, 1], [0, 1]]))
    assert not radius_is_one(cm([[0, 1], [0, 0]]))  # nilpotent, rho = 0
    assert not radius_is_one(cm([[1, 1], [1, 0]]))
    assert not radius_is_one(cm([[2]]))
