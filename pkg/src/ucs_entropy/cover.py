"""Invariant covers, their digraphs and entropies, refinements and IFE.

A cover keeps its cells in the order they were given; that order matters
for :func:`derived_partition` and fixes every tie-break below.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import kernels
from .errors import (
    ConditionsNotMet,
    CycleBudgetExceeded,
    DomainError,
    EmptyResidualCell,
    HorizonZero,
    NotACover,
    NotAtomRefinable,
    NotInvariantCell,
    NotQuasiPartition,
)
from .graphnum import (
    DEFAULT_CYCLE_CAP,
    DEFAULT_TOL,
    CountMatrix,
    Interval,
    RadiusEnclosure,
    _down,
    _up,
    norm_l1,
    norm_linf,
    simple_cycle_indices,
    spectral_radius,
)
from .logvalue import LogValue
from .spanning import check_conditions
from .system import UncertainSystem, iter_bits, minimal_covers, popcount

KARP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class InvariantCover:
    """Cells over a target ``Q`` with one input per cell; built by :func:`build_cover`."""

    system: UncertainSystem
    name: str
    target: int
    ids: tuple[str, ...]
    masks: tuple[int, ...]
    inputs: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def Q(self) -> frozenset:
        return self.system.stateset(self.target)

    @property
    def cells(self) -> dict:
        return {cid: self.system.stateset(m) for cid, m in zip(self.ids, self.masks)}

    @property
    def G(self) -> dict:
        return {cid: self.system.inputs[u] for cid, u in zip(self.ids, self.inputs)}

    def image(self, i: int) -> int:
        """``F(A, G(A))`` of the ``i``-th cell."""
        return self.system.image(self.masks[i], self.inputs[i])

    def is_partition(self) -> bool:
        seen = 0
        for m in self.masks:
            if seen & m:
                return False
            seen |= m
        return True

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InvariantCover):
            return NotImplemented
        return (self.system, self.target, self.ids, self.masks, self.inputs) == (
            other.system,
            other.target,
            other.ids,
            other.masks,
            other.inputs,
        )

    def __hash__(self) -> int:
        return hash((self.target, self.ids, self.masks, self.inputs))


def build_cover(
    sys: UncertainSystem,
    Q: Iterable,
    cells: Mapping | Sequence,
    G: Mapping,
    name: str = "cover",
) -> InvariantCover:
    """Validate and build an invariant cover.

    ``cells`` is either a mapping ``{cell id: states}`` or a sequence of
    ``(cell id, states)`` pairs; ``G`` maps cell ids to input ids.
    """
    target = sys.mask(Q)
    pairs = list(cells.items()) if isinstance(cells, Mapping) else list(cells)
    ids, masks, inputs = [], [], []
    for cid, members in pairs:
        cid = str(cid)
        if cid in ids:
            raise DomainError(f"duplicate cell id {cid}")
        m = sys.mask(members)
        if not m:
            raise DomainError(f"cell {cid} is empty")
        if m & ~target:
            raise DomainError(f"cell {cid} leaves the target: {list(sys.labels(m & ~target))}")
        if cid not in G:
            raise DomainError(f"cell {cid} has no input assigned")
        ids.append(cid)
        masks.append(m)
        inputs.append(sys.input_index(G[cid]))
    union = 0
    for m in masks:
        union |= m
    if union != target:
        raise NotACover(f"uncovered states: {list(sys.labels(target & ~union))}")
    for cid, m, u in zip(ids, masks, inputs):
        esc = sys.image(m, u) & ~target
        if esc:
            raise NotInvariantCell(cid, sys.labels(esc))
    return InvariantCover(sys, name, target, tuple(ids), tuple(masks), tuple(inputs))


# -- digraph -------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverDigraph:
    ids: tuple[str, ...]
    succ: tuple[tuple[int, ...], ...]  # D(A) as cell indices
    counts: tuple[int, ...]  # #D(A); w(A) = log2 of this
    M: CountMatrix
    W: CountMatrix

    @property
    def D(self) -> dict:
        return {a: tuple(self.ids[j] for j in s) for a, s in zip(self.ids, self.succ)}

    def weight(self, cell: str) -> LogValue:
        return LogValue(self.counts[self.ids.index(cell)])


def cover_digraph(cover: InvariantCover) -> CoverDigraph:
    succ = []
    for i in range(len(cover)):
        img = cover.image(i)
        succ.append(tuple(j for j, m in enumerate(cover.masks) if img & m))
    counts = tuple(len(s) for s in succ)
    n = len(cover)
    M = [[0] * n for _ in range(n)]
    W = [[0] * n for _ in range(n)]
    for i, s in enumerate(succ):
        for j in s:
            M[i][j] = 1
            W[i][j] = counts[i]
    return CoverDigraph(
        cover.ids,
        tuple(succ),
        counts,
        CountMatrix.from_rows(M, cover.ids),
        CountMatrix.from_rows(W, cover.ids),
    )


@dataclass(frozen=True)
class QuasiCheck:
    ok: bool
    violations: tuple  # ("private-part", A) or ("private-hit", A, B)

    def __bool__(self) -> bool:
        return self.ok


def is_quasi_invariant_partition(cover: InvariantCover) -> QuasiCheck:
    """Check that every cell owns a private point and that every successor
    ``B`` of ``A`` is hit by ``F(A, G(A))`` outside the other successors."""
    out = []
    masks = cover.masks
    for i, m in enumerate(masks):
        others = 0
        for j, o in enumerate(masks):
            if j != i:
                others |= o
        if not m & ~others:
            out.append(("private-part", cover.ids[i]))
    dg = cover_digraph(cover)
    for i, s in enumerate(dg.succ):
        img = cover.image(i)
        for b in s:
            rest = 0
            for c in s:
                if c != b:
                    rest |= masks[c]
            if not img & masks[b] & ~rest:
                out.append(("private-hit", cover.ids[i], cover.ids[b]))
    return QuasiCheck(not out, tuple(out))


def _require_quasi(cover: InvariantCover) -> None:
    chk = is_quasi_invariant_partition(cover)
    if not chk.ok:
        raise NotQuasiPartition(chk.violations)


# -- minimal expansion number ----------------------------------------------------------


@dataclass(frozen=True)
class CoverRinvResult:
    n: int
    value: int
    initial: tuple[str, ...]
    choices: dict  # (cell id, remaining steps) -> successor cell ids

    def sequences(self) -> list[tuple[str, ...]]:
        """The optimal spanning set, one tuple of cell ids per sequence."""
        out = []

        def walk(prefix: tuple, h: int) -> None:
            if h == 0:
                out.append(prefix)
                return
            for b in self.choices[(prefix[-1], h)]:
                walk(prefix + (b,), h - 1)

        for a in self.initial:
            walk((a,), self.n - 1)
        return out


def cover_rinv(cover: InvariantCover, n: int) -> CoverRinvResult:
    """Minimal expansion number over all ``(n, Q)``-spanning sets of the cover.

    ``V(A, 0) = 1`` and ``V(A, h)`` is the minimum, over subfamilies ``D``
    covering ``F(A, G(A))``, of ``#D * max V(B, h-1)``; the answer takes the
    same minimum over initial families covering ``Q`` with ``h = n-1``.
    Only inclusion-minimal subfamilies are tried, since adding cells never
    lowers either factor.
    """
    if n < 1:
        raise HorizonZero("horizon must be >= 1")
    masks = cover.masks
    ids = cover.ids
    options = [minimal_covers(cover.image(i), masks) for i in range(len(cover))]
    value = [1] * len(cover)
    choices: dict = {}
    for h in range(1, n):
        nxt = []
        for i in range(len(cover)):
            best, arg = None, None
            for D in options[i]:
                v = len(D) * max(value[b] for b in D)
                if best is None or v < best:
                    best, arg = v, D
            nxt.append(best)
            choices[(ids[i], h)] = tuple(ids[b] for b in arg)
        value = nxt
    best, arg = None, None
    for D in minimal_covers(cover.target, masks):
        v = len(D) * max(value[b] for b in D)
        if best is None or v < best:
            best, arg = v, D
    return CoverRinvResult(n, best, tuple(ids[b] for b in arg), choices)


# -- W_m terms -----------------------------------------------------------------------


@dataclass(frozen=True)
class WmRow:
    m: int
    product: int  # max over W_m of the product of #D(alpha(i)), i <= m-2
    term: LogValue  # log2 of product
    predicted: int  # #A * product
    cover_rinv: int | None

    @property
    def identity_ok(self) -> bool | None:
        return None if self.cover_rinv is None else self.cover_rinv == self.predicted


def wm_entropy_terms(cover: InvariantCover, m_max: int, check: bool = True) -> list[WmRow]:
    """Per-``m`` maxima of the weight sums over admissible sequences of length ``m``.

    Longest-product DP over the cover digraph. With ``check`` each row also
    carries ``cover_rinv(m)`` so the identity ``cover_rinv(m) = #A * 2^term``
    can be read off.
    """
    if m_max < 1:
        raise HorizonZero("m_max must be >= 1")
    _require_quasi(cover)
    dg = cover_digraph(cover)
    n = len(cover)
    best = [1] * n  # best product over sequences of the current length ending at v
    rows = []
    for m in range(1, m_max + 1):
        if m > 1:
            nxt = [0] * n
            for v in range(n):
                val = best[v] * dg.counts[v]
                for w in dg.succ[v]:
                    if val > nxt[w]:
                        nxt[w] = val
            best = nxt
        prod = max(best)
        r = cover_rinv(cover, m).value if check else None
        rows.append(WmRow(m, prod, LogValue(prod), n * prod, r))
    return rows


# -- maximum mean cycle weight -------------------------------------------------------------


@dataclass(frozen=True)
class Cycle:
    cells: tuple[str, ...]
    weight_product: int

    @property
    def period(self) -> int:
        return len(self.cells)

    @property
    def mean(self) -> LogValue:
        return LogValue(self.weight_product, self.period)


@dataclass(frozen=True)
class MmcwResult:
    value: LogValue | None  # None only after the cycle-cap fallback
    cycle: Cycle | None
    karp: float
    exact: bool
    n_cycles: int

    @property
    def decimal(self) -> float:
        return float(self.value) if self.value is not None else self.karp


def mmcw(cover: InvariantCover, cap: int = DEFAULT_CYCLE_CAP) -> MmcwResult:
    """Maximum mean weight over the simple cycles of the cover digraph.

    Exact: every simple cycle is scored as a :class:`LogValue`; ties go to
    the shorter period, then the lexicographically smaller cell-id tuple.
    Karp's algorithm on float log-weights runs alongside and must agree to
    1e-9. Past ``cap`` cycles only the Karp value is returned, flagged
    inexact.
    """
    _require_quasi(cover)
    dg = cover_digraph(cover)
    logw = [math.log2(c) for c in dg.counts]
    karp = kernels.max_mean_cycle([list(s) for s in dg.succ], logw)
    try:
        cycles = simple_cycle_indices(dg.succ, cap)
    except CycleBudgetExceeded:
        warnings.warn(f"more than {cap} simple cycles; falling back to the floating mean-cycle value", stacklevel=2)
        return MmcwResult(None, None, karp, False, cap)
    best = None
    best_key = None
    for c in cycles:
        p = 1
        for v in c:
            p *= dg.counts[v]
        cyc = Cycle(tuple(cover.ids[v] for v in c), p)
        key = (len(c), cyc.cells)
        if best is None or cyc.mean > best.mean or (cyc.mean == best.mean and key < best_key):
            best, best_key = cyc, key
    if abs(float(best.mean) - karp) > KARP_TOL:
        raise AssertionError(f"cycle enumeration ({float(best.mean)}) and Karp ({karp}) disagree")
    return MmcwResult(best.mean, best, karp, True, len(cycles))


# -- spectral bounds -------------------------------------------------------------------


def _sub_down(a: float, b: float) -> float:
    d = a - b
    if math.isinf(d) or Fraction(d) <= Fraction(a) - Fraction(b):
        return d
    return math.nextafter(d, -math.inf)


def _sub_up(a: float, b: float) -> float:
    d = a - b
    if math.isinf(d) or Fraction(d) >= Fraction(a) - Fraction(b):
        return d
    return math.nextafter(d, math.inf)


@dataclass(frozen=True)
class EntropyBounds:
    lower: Interval  # enclosure of log2 rho(W) - log2 rho(M)
    upper: Interval  # enclosure of min(log2 ||W||_inf, log2 rho(W))
    exact: LogValue | None  # log2 rho(W), set when rho(M) = 1 structurally
    rho_M: RadiusEnclosure
    rho_W: RadiusEnclosure
    norm_inf_W: int
    norm_1_W: int


def entropy_bounds(cover: InvariantCover, tol: float = DEFAULT_TOL) -> EntropyBounds:
    """Spectral lower and upper bounds on the entropy of a quasi-invariant-partition."""
    _require_quasi(cover)
    dg = cover_digraph(cover)
    rM = spectral_radius(dg.M, tol)
    rW = spectral_radius(dg.W, tol)
    lM, lW = rM.log2(), rW.log2()
    lower = Interval(_sub_down(lW.lo, lM.hi), _sub_up(lW.hi, lM.lo))
    ninf = norm_linf(dg.W)
    a = math.log2(ninf)
    a_lo, a_hi = (a, a) if ninf & (ninf - 1) == 0 else (_down(a), _up(a))
    upper = Interval(min(a_lo, lW.lo), min(a_hi, lW.hi))
    exact = None
    if rM.exact_one:
        # M's nontrivial blocks are single cycles, so W's are too
        exact = rW.exact
    return EntropyBounds(lower, upper, exact, rM, rW, ninf, norm_l1(dg.W))


# -- derived partition, refinements, IFE -----------------------------------------------------


def derived_partition(cover: InvariantCover, order: Sequence[str] | None = None) -> InvariantCover:
    """Invariant partition ``A'_j = A_j minus the earlier cells``, same inputs.

    ``order`` reorders the cells first (default: stored order).
    """
    _require_quasi(cover)
    idx = list(range(len(cover))) if order is None else [cover.ids.index(c) for c in order]
    if sorted(idx) != list(range(len(cover))):
        raise DomainError("order must list every cell exactly once")
    seen = 0
    pairs, G = [], {}
    sys = cover.system
    for i in idx:
        resid = cover.masks[i] & ~seen
        if not resid:
            raise EmptyResidualCell(cover.ids[i])
        seen |= cover.masks[i]
        pairs.append((cover.ids[i], sys.labels(resid)))
        G[cover.ids[i]] = sys.inputs[cover.inputs[i]]
    return build_cover(sys, sys.labels(cover.target), pairs, G, name=f"{cover.name}_derived")


def _checked_qm(sys: UncertainSystem, Q: Iterable, V: Sequence):
    Q = list(Q)
    report = check_conditions(sys, Q, V)
    if not report.all_ok:
        raise ConditionsNotMet(report)
    target = sys.mask(Q)
    return target, sys.q_masks(target), [sys.input_index(a) for a in V]


def coarse_cover(sys: UncertainSystem, Q: Iterable, V: Sequence) -> InvariantCover:
    """``(A_V, G_V)``: the cells ``Q_a`` for ``a`` in ``V`` with ``G(Q_a) = a``."""
    _, qm, vi = _checked_qm(sys, Q, V)
    pairs = [(f"Q_{sys.inputs[a]}", sys.labels(qm[a])) for a in vi if qm[a]]
    G = {f"Q_{sys.inputs[a]}": sys.inputs[a] for a in vi}
    return build_cover(sys, list(Q), pairs, G, name="coarse")


def atom_refinement(sys: UncertainSystem, Q: Iterable, V: Sequence) -> InvariantCover:
    """Singleton cells ``{x}`` with ``G({x})`` the input whose ``Q_a`` holds ``x``.

    Exists iff ``#(F(x, a) & Q_b) <= 1`` for all ``a, b`` in ``V`` and ``x``
    in ``Q_a``; otherwise :class:`NotAtomRefinable` names the first
    violating ``(x, a, b)``.
    """
    Q = list(Q)
    target, qm, vi = _checked_qm(sys, Q, V)
    for a in vi:
        for x in iter_bits(qm[a]):
            for b in vi:
                if popcount(sys.images[x][a] & qm[b]) > 1:
                    raise NotAtomRefinable((sys.states[x], sys.inputs[a], sys.inputs[b]))
    pairs, G = [], {}
    for x in iter_bits(target):
        a = next(a for a in vi if qm[a] >> x & 1)
        pairs.append((sys.states[x], (sys.states[x],)))
        G[sys.states[x]] = sys.inputs[a]
    return build_cover(sys, Q, pairs, G, name="atom")


@dataclass(frozen=True)
class RefinementResult:
    value: LogValue  # upper bound on h_fb
    cover: InvariantCover
    exact_for_cover: bool  # True when value is the cover's own entropy (mmcw)
    evaluated: int
    complete: bool


def _refinement_value(cover: InvariantCover, horizon: int) -> tuple[LogValue, bool]:
    if is_quasi_invariant_partition(cover).ok:
        return mmcw(cover).value, True
    # subadditivity: the entropy is the infimum of log2 r(n) / n
    best = None
    for n in range(1, horizon + 1):
        v = LogValue(cover_rinv(cover, n).value, n)
        if best is None or v < best:
            best = v
    return best, False


def refinement_search(
    sys: UncertainSystem,
    Q: Iterable,
    V: Sequence,
    budget: int = 10_000,
    max_cells: int | None = None,
    horizon: int = 6,
) -> RefinementResult:
    """Best upper bound on ``h_fb`` over refinements of ``(A_V, G_V)``.

    The coarse cover is always scored; then covers of ``Q`` by nonempty
    subsets of the ``Q_a`` are tried by increasing cell count, each counting
    one unit of ``budget``. ``complete`` is False when the budget ran out
    before the space (bounded by ``max_cells``) was exhausted.
    """
    Q = list(Q)
    target, qm, vi = _checked_qm(sys, Q, V)
    coarse = coarse_cover(sys, Q, V)
    best_val, best_exact = _refinement_value(coarse, horizon)
    best_cover = coarse
    evaluated = 1

    cand: list[tuple[int, int]] = []  # (mask, input index)
    for a in vi:
        bits = list(iter_bits(qm[a]))
        for k in range(len(bits), 0, -1):
            for sub in combinations(bits, k):
                cand.append((sum(1 << x for x in sub), a))
    limit = popcount(target) if max_cells is None else min(max_cells, popcount(target))
    complete = True
    for k in range(1, limit + 1):
        for combo in combinations(range(len(cand)), k):
            union = 0
            for c in combo:
                union |= cand[c][0]
            if union != target:
                continue
            pairs = [(f"B{c}", sys.labels(cand[c][0])) for c in combo]
            if sorted(cand[c][0] for c in combo) == sorted(coarse.masks):
                continue
            if evaluated >= budget + 1:
                complete = False
                break
            G = {f"B{c}": sys.inputs[cand[c][1]] for c in combo}
            cov = build_cover(sys, Q, pairs, G, name=f"refinement{evaluated}")
            val, ex = _refinement_value(cov, horizon)
            evaluated += 1
            if val < best_val:
                best_val, best_exact, best_cover = val, ex, cov
        if not complete:
            break
    return RefinementResult(best_val, best_cover, best_exact, evaluated, complete)


@dataclass(frozen=True)
class IfeResult:
    value: LogValue
    exact: bool  # False: only an upper bound (no atom refinement)
    cover: InvariantCover
    method: str  # "atom" or "refinement-search"


def ife(sys: UncertainSystem, Q: Iterable, V: Sequence, budget: int = 10_000) -> IfeResult:
    """Invariance feedback entropy as the mean-cycle value of the atom refinement.

    Without an atom refinement the result is the best refinement found by
    :func:`refinement_search`, an upper bound only.
    """
    Q = list(Q)
    try:
        atom = atom_refinement(sys, Q, V)
    except NotAtomRefinable:
        res = refinement_search(sys, Q, V, budget)
        return IfeResult(res.value, False, res.cover, "refinement-search")
    return IfeResult(mmcw(atom).value, True, atom, "atom")
