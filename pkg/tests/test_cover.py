import pytest

from ucs_entropy import (
    ConditionsNotMet,
    EmptyResidualCell,
    HorizonZero,
    LogValue,
    NotACover,
    NotAtomRefinable,
    NotInvariantCell,
    NotQuasiPartition,
    UncertainSystem,
    atom_refinement,
    build_cover,
    cover_digraph,
    cover_rinv,
    derived_partition,
    entropy_bounds,
    ife,
    is_quasi_invariant_partition,
    mmcw,
    refinement_search,
    wm_entropy_terms,
)
from ucs_entropy.oracles import expansion_number

Q4 = list("01234")


def test_build_cover(systems):
    ex1, ex3 = systems["ex1"], systems["ex3"]
    c = build_cover(ex1, ["0", "1"], {"A": ["0"], "B": ["1"]}, {"A": "a", "B": "b"})
    assert c.cells == {"A": {"0"}, "B": {"1"}}
    build_cover(ex3, "012", [("x", "01"), ("y", "12")], {"x": "a", "y": "b"})
    with pytest.raises(NotInvariantCell) as e:
        build_cover(ex1, ["0", "1"], {"Q": ["0", "1"]}, {"Q": "a"})
    assert e.value.escaping == ("2",)
    with pytest.raises(NotACover):
        build_cover(ex1, ["0", "1"], {"A": ["0"]}, {"A": "a"})


def test_digraph_matrices(covers):
    W1 = cover_digraph(covers["ex4_a1"]).W
    assert W1.rows == ((0, 2, 2), (1, 0, 0), (0, 0, 1))
    dg2 = cover_digraph(covers["ex4_a2"])
    assert dg2.M.rows == (
        (0, 0, 1, 0, 1),
        (0, 0, 0, 1, 0),
        (0, 1, 0, 0, 0),
        (1, 0, 0, 0, 0),
        (0, 0, 0, 0, 1),
    )
    assert dg2.W.rows == (
        (0, 0, 2, 0, 2),
        (0, 0, 0, 1, 0),
        (0, 1, 0, 0, 0),
        (1, 0, 0, 0, 0),
        (0, 0, 0, 0, 1),
    )
    dg3 = cover_digraph(covers["ex4_a3"])
    assert dg3.M.rows == ((0, 0, 1, 1), (0, 0, 1, 0), (1, 1, 0, 0), (0, 0, 0, 1))
    assert dg3.W.rows == ((0, 0, 2, 2), (0, 0, 1, 0), (2, 2, 0, 0), (0, 0, 0, 1))


def test_single_cell_cover():
    s = UncertainSystem.from_table("one", ["0"], ["a"], {("0", "a"): ["0"]})
    c = build_cover(s, ["0"], {"A": ["0"]}, {"A": "a"})
    dg = cover_digraph(c)
    assert dg.M.rows == ((1,),) and dg.W.rows == ((1,),)
    assert mmcw(c).value == LogValue(1)
    b = entropy_bounds(c)
    assert b.lower.lo <= 0 <= b.lower.hi and b.upper.hi == 0 and b.exact == LogValue(1)


def test_quasi_partition(systems, covers):
    assert is_quasi_invariant_partition(covers["ex3_a1"]).ok
    for k in ("ex4_a1", "ex4_a2", "ex4_a3", "ex3_a2", "ex3_a3"):
        assert covers[k].is_partition() and is_quasi_invariant_partition(covers[k]).ok
    c = build_cover(systems["ex3"], "012", [("x", "01"), ("y", "12"), ("z", "1")], {"x": "a", "y": "b", "z": "a"})
    chk = is_quasi_invariant_partition(c)
    assert not chk.ok and ("private-part", "z") in chk.violations


def test_cover_rinv_examples(covers):
    for n in range(1, 7):
        assert cover_rinv(covers["ex1_a"], n).value == 2**n
    assert cover_rinv(covers["ex4_a1"], 1).value == 3
    with pytest.raises(HorizonZero):
        cover_rinv(covers["ex1_a"], 0)


def test_cover_rinv_strategy_is_spanning(covers):
    for c in covers.values():
        for n in (1, 2, 3, 4):
            res = cover_rinv(c, n)
            seqs = [tuple(c.ids.index(a) for a in s) for s in res.sequences()]
            assert expansion_number(c, seqs, n) == res.value


def test_wm_terms(covers):
    rows = wm_entropy_terms(covers["ex2_a"], 3)
    assert rows[2].product == 4 and rows[2].cover_rinv == 8
    assert rows[0].term == LogValue(1) and rows[0].cover_rinv == 2
    rows = wm_entropy_terms(covers["ex4_a1"], 4)
    assert rows[3].product == 4
    assert all(r.identity_ok for r in rows)
    assert wm_entropy_terms(covers["ex4_a2"], 5)[4].identity_ok


def test_mmcw_values(covers):
    expected = {
        "ex1_a": LogValue(2),
        "ex2_a": LogValue(2),
        "ex3_a1": LogValue(2),
        "ex3_a2": LogValue(2),
        "ex3_a3": LogValue(2, 2),
        "ex4_a1": LogValue(2, 2),
        "ex4_a2": LogValue(2, 4),
        "ex4_a3": LogValue(2),
    }
    for k, v in expected.items():
        assert mmcw(covers[k]).value == v, k
    r = mmcw(covers["ex4_a2"])
    assert r.cycle.cells == ("A20", "A22", "A21", "A23") and r.cycle.weight_product == 2
    r = mmcw(covers["ex3_a1"])
    assert r.cycle.cells == ("A11",) and r.cycle.period == 1


def test_mmcw_cap_fallback(covers):
    with pytest.warns(UserWarning):
        r = mmcw(covers["ex4_a2"], cap=1)
    assert not r.exact and r.value is None and abs(r.decimal - 0.25) < 1e-9


def test_mmcw_requires_quasi(systems):
    c = build_cover(systems["ex3"], "012", [("x", "01"), ("y", "12"), ("z", "1")], {"x": "a", "y": "b", "z": "a"})
    with pytest.raises(NotQuasiPartition):
        mmcw(c)


def test_entropy_bounds(covers):
    b = entropy_bounds(covers["ex4_a1"])
    assert b.rho_M.exact_one and b.exact == LogValue(2, 2)
    b = entropy_bounds(covers["ex4_a3"])
    assert b.lower.lo <= 0.7924812503605781 <= b.lower.hi
    assert b.upper.lo <= 1 <= b.upper.hi
    assert b.exact is None
    assert b.norm_inf_W == 2 and b.norm_1_W == 10


def test_derived_partition(covers):
    d = derived_partition(covers["ex3_a1"])
    assert d.cells == {"A11": {"0", "1"}, "A12": {"2"}}
    assert mmcw(d).value <= mmcw(covers["ex3_a1"]).value
    r = derived_partition(covers["ex3_a1"], ["A12", "A11"])
    assert r.cells == {"A12": {"1", "2"}, "A11": {"0"}}
    assert mmcw(r).value <= mmcw(covers["ex3_a1"]).value
    assert derived_partition(covers["ex4_a2"]).cells == covers["ex4_a2"].cells


def test_derived_partition_any_order_keeps_every_cell(covers):
    # a private point of each cell survives whatever cells come before it
    from itertools import permutations

    for k in ("ex3_a1", "ex4_a1", "ex4_a3"):
        c = covers[k]
        for order in permutations(c.ids):
            d = derived_partition(c, order)
            assert d.is_partition() and len(d) == len(c)
            assert mmcw(d).value <= mmcw(c).value


def test_empty_residual_guard(monkeypatch):
    from ucs_entropy import cover as cv

    s = UncertainSystem.from_table("two", ["0", "1"], ["a"], {("0", "a"): ["0"], ("1", "a"): ["1"]})
    swallowed = cv.InvariantCover(s, "swallowed", 0b11, ("p", "q"), (0b11, 0b01), (0, 0))
    monkeypatch.setattr(cv, "_require_quasi", lambda cover: None)
    with pytest.raises(EmptyResidualCell) as e:
        derived_partition(swallowed)
    assert e.value.cell == "q"


def test_atom_refinement(systems, covers):
    atom = atom_refinement(systems["ex4"], Q4, "abc")
    assert atom.cells == {x: {x} for x in Q4}
    assert atom.G == {"0": "a", "1": "a", "2": "b", "3": "b", "4": "c"}
    atom2 = atom_refinement(systems["ex2"], ["0", "2"], "ab")
    assert atom2.G == {"0": "a", "2": "b"}
    with pytest.raises(ConditionsNotMet):
        atom_refinement(systems["ex2"], ["0", "2"], "a")


def test_not_atom_refinable():
    s = UncertainSystem.from_table(
        "wide",
        ["0", "1", "2"],
        ["a"],
        {("0", "a"): ["0", "1"], ("1", "a"): ["2"], ("2", "a"): ["0"]},
    )
    with pytest.raises(NotAtomRefinable) as e:
        atom_refinement(s, "012", "a")
    assert e.value.witness == ("0", "a", "a")
    res = ife(s, "012", "a")
    assert not res.exact and res.method == "refinement-search"


def test_ife(systems):
    r = ife(systems["ex4"], Q4, "abc")
    assert r.exact and r.value == LogValue(2, 4)
    assert ife(systems["ex2"], ["0", "2"], "ab").value == LogValue(2)
    assert ife(systems["ex1"], ["0", "1"], "ab").value == LogValue(2)


def test_refinement_search(systems, covers):
    ex4 = systems["ex4"]
    full = refinement_search(ex4, Q4, "abc")
    assert full.value == LogValue(2, 4) and full.complete
    assert full.cover.is_partition() and len(full.cover) == 5
    small = refinement_search(ex4, Q4, "abc", max_cells=3)
    assert small.value == LogValue(2, 2)
    zero = refinement_search(ex4, Q4, "abc", budget=0)
    assert zero.evaluated == 1 and not zero.complete
    assert sorted(zero.cover.masks) == sorted(covers["ex4_a1"].masks)
