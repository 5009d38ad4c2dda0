"""Admissible families, minimal spanning sets and the admissible matrix.

Words are handled internally as tuples of input indices and translated to
input ids at the public boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from . import kernels
from .errors import (
    ConditionsNotMet,
    DomainError,
    LengthMismatch,
    NotAdmissible,
    NotControlledInvariant,
    SearchBudgetExceeded,
)
from .graphnum import (
    DEFAULT_TOL,
    CountMatrix,
    Interval,
    RadiusEnclosure,
    mat_pow,
    norm_l1,
    spectral_radius,
)
from .logvalue import LogValue
from .system import UncertainSystem, controlled_invariance_mask, iter_bits, minimal_covers

DEFAULT_BUDGET = 10**7

Word = tuple


# -- admissible families ------------------------------------------------------


@dataclass(frozen=True)
class AdmissibleTree:
    """The sets ``I`` of an admissible family rooted at one point.

    ``nodes`` maps every word prefix ``(w0, ..., wi)`` to the state set on
    which ``wi`` is applied; the root prefix ``(w0,)`` holds ``{point}``.
    """

    point: str
    depth: int
    words: frozenset
    nodes: dict = field(compare=False)


def _check_family(sys: UncertainSystem, target: int, qm, x: int, words: Sequence[Word]) -> dict:
    """Index-level admissibility test; returns ``{prefix: mask}`` or raises."""
    words = sorted(set(words))
    if not words:
        raise NotAdmissible("empty-family")
    n = len(words[0])
    if n < 1 or any(len(w) != n for w in words):
        raise LengthMismatch("all words of a family must share one length >= 1")
    if not target >> x & 1:
        raise NotAdmissible("point-outside-target", (), sys.states[x])
    if len({w[0] for w in words}) > 1:
        raise NotAdmissible("shared-first-symbol")
    branch: dict[Word, set[int]] = {}
    for w in words:
        for i in range(1, n):
            branch.setdefault(w[:i], set()).add(w[i])
    children = {p: sorted(b) for p, b in branch.items()}
    nodes: dict[Word, int] = {}
    stack = [((words[0][0],), 1 << x)]
    while stack:
        prefix, I = stack.pop()
        nodes[prefix] = I
        J = sys.image(I, prefix[-1])
        if len(prefix) == n:
            if J & ~target:
                raise NotAdmissible("final-inclusion", prefix, "image leaves the target")
            continue
        kids = children[prefix]
        cover = 0
        for b in kids:
            cover |= qm[b]
        if J & ~cover:
            raise NotAdmissible("coverage-inclusion", prefix, "image not covered by the Q_b of the continuations")
        for b in kids:
            if not J & qm[b]:
                raise NotAdmissible("empty-intersection", prefix + (b,), "continuation set is empty")
        # reversed so that the stack visits prefixes in lexicographic order
        for b in reversed(kids):
            stack.append((prefix + (b,), J & qm[b]))
    return nodes


def _word_ids(sys: UncertainSystem, w: Word) -> tuple[str, ...]:
    return tuple(sys.inputs[u] for u in w)


def _word_ix(sys: UncertainSystem, w: Iterable) -> Word:
    if isinstance(w, str):
        w = tuple(w) if all(len(u) == 1 for u in sys.inputs) else (w,)
    return tuple(sys.input_index(u) for u in w)


def _tree(sys: UncertainSystem, x: int, words, nodes: dict) -> AdmissibleTree:
    return AdmissibleTree(
        point=sys.states[x],
        depth=len(next(iter(words))),
        words=frozenset(_word_ids(sys, w) for w in words),
        nodes={_word_ids(sys, p): sys.stateset(m) for p, m in sorted(nodes.items())},
    )


def check_admissible(sys: UncertainSystem, Q: Iterable, x, S: Iterable) -> AdmissibleTree:
    """Validate a word set as an admissible family for ``Q`` at ``x``.

    Words are sequences of input ids; when every input id is a single
    character a word may also be given as a string such as ``"ab"``. Raises
    :class:`NotAdmissible` naming the first violated condition.
    """
    target = sys.mask(Q)
    words = [_word_ix(sys, w) for w in S]
    xi = sys.state_index(x)
    nodes = _check_family(sys, target, sys.q_masks(target), xi, words)
    return _tree(sys, xi, words, nodes)


def is_admissible(sys: UncertainSystem, Q: Iterable, x, S: Iterable) -> bool:
    try:
        check_admissible(sys, Q, x, S)
    except NotAdmissible:
        return False
    return True


def _minimal_antichain(fams: Iterable[frozenset]) -> list[frozenset]:
    ordered = sorted(set(fams), key=lambda f: (len(f), sorted(f)))
    kept: list[frozenset] = []
    for f in ordered:
        if not any(g <= f for g in kept):
            kept.append(f)
    return kept


class _FamilySearch:
    """Memoized enumeration of inclusion-minimal admissible families.

    The continuation of a family below a node depends only on the set ``I``
    at that node, the symbol applied there and the remaining depth, so
    results are cached on ``(I, symbol, depth)``.
    """

    def __init__(self, sys: UncertainSystem, target: int, budget: int) -> None:
        self.sys = sys
        self.target = target
        self.qm = sys.q_masks(target)
        self.budget = budget
        self.spent = 0
        self.memo: dict[tuple[int, int, int], list[frozenset]] = {}
        self.cover_memo: dict[int, list[tuple[int, ...]]] = {}

    def _tick(self, k: int = 1) -> None:
        self.spent += k
        if self.spent > self.budget:
            raise SearchBudgetExceeded(f"family enumeration exceeded {self.budget} expansions")

    def suffixes(self, I: int, u: int, h: int) -> list[frozenset]:
        key = (I, u, h)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self._tick()
        J = self.sys.image(I, u)
        if J & ~self.target:
            res: list[frozenset] = []
        elif h == 1:
            res = [frozenset({(u,)})]
        else:
            covers = self.cover_memo.get(J)
            if covers is None:
                covers = minimal_covers(J, self.qm)
                self.cover_memo[J] = covers
            found = []
            for B in covers:
                options = [self.suffixes(J & self.qm[b], b, h - 1) for b in B]
                if any(not o for o in options):
                    continue
                for combo in product(*options):
                    self._tick()
                    found.append(frozenset((u,) + w for part in combo for w in part))
            res = _minimal_antichain(found)
        self.memo[key] = res
        return res

    def point_families(self, x: int, n: int) -> list[frozenset]:
        out = []
        for u in range(self.sys.n_inputs):
            out.extend(self.suffixes(1 << x, u, n))
        return _minimal_antichain(out)


@dataclass(frozen=True)
class FamilySet:
    point: str
    depth: int
    families: tuple[frozenset, ...]  # each a frozenset of words (tuples of input ids)


def enumerate_families(sys: UncertainSystem, Q: Iterable, x, n: int, budget: int = DEFAULT_BUDGET) -> FamilySet:
    """All inclusion-minimal admissible families of length ``n`` at ``x``."""
    if n < 1:
        raise LengthMismatch("family length must be >= 1")
    target = sys.mask(Q)
    xi = sys.state_index(x)
    search = _FamilySearch(sys, target, budget)
    try:
        fams = search.point_families(xi, n) if target >> xi & 1 else []
    except SearchBudgetExceeded as exc:
        partial = [f for v in search.memo.values() for f in v if len(next(iter(f))) == n]
        exc.partial = {"complete": False, "families": partial}
        raise
    named = tuple(frozenset(_word_ids(sys, w) for w in f) for f in fams)
    return FamilySet(sys.states[xi], n, named)


# -- minimal spanning sets ----------------------------------------------------------


@dataclass(frozen=True)
class SpanningCertificate:
    words: tuple[tuple[str, ...], ...]
    trees: dict  # state id -> AdmissibleTree


@dataclass(frozen=True)
class RinvResult:
    n: int
    count: int
    certificate: SpanningCertificate
    nodes: int = 0


def _require_invariant(sys: UncertainSystem, target: int) -> None:
    _, bad = controlled_invariance_mask(sys, target)
    if bad:
        raise NotControlledInvariant(sys.labels(bad))


def r_inv(
    sys: UncertainSystem,
    Q: Iterable,
    K: Iterable | None = None,
    n: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> RinvResult:
    """Exact minimal size of an ``(n, K, Q)``-spanning word set.

    Each point of ``K`` needs one of its minimal admissible families inside
    the spanning set, so the answer is a minimum-union choice of one family
    per point, found by branch and bound. ``K`` defaults to ``Q``.
    """
    if n < 1:
        raise LengthMismatch("horizon must be >= 1")
    target = sys.mask(Q)
    kmask = target if K is None else sys.mask(K)
    if kmask & ~target:
        raise DomainError(f"K is not a subset of Q: {list(sys.labels(kmask & ~target))}")
    _require_invariant(sys, target)
    if not kmask:
        return RinvResult(n, 0, SpanningCertificate((), {}))

    search = _FamilySearch(sys, target, budget)
    points = list(iter_bits(kmask))
    per_point = {x: search.point_families(x, n) for x in points}

    # points with identical option lists need only one representative
    groups: dict[tuple, list[int]] = {}
    for x in points:
        groups.setdefault(tuple(per_point[x]), []).append(x)
    options = list(groups)
    options.sort(key=lambda fams: (len(fams), [sorted(f) for f in fams]))

    vocab = sorted({w for fams in options for f in fams for w in f})
    bit = {w: i for i, w in enumerate(vocab)}
    masks = [[sum(1 << bit[w] for w in f) for f in fams] for fams in options]

    remaining = max(budget - search.spent, 1)
    size, choice, nodes, complete = kernels.min_union_cover(masks, remaining)
    chosen = {fams: fams[i] for fams, i in zip(options, choice)}
    words = sorted({w for f in chosen.values() for w in f})
    if not complete:
        raise SearchBudgetExceeded(
            f"spanning-set search exceeded its budget; best so far {size}",
            partial={"complete": False, "upper_bound": size, "words": [_word_ids(sys, w) for w in words]},
        )

    trees = {}
    qm = search.qm
    for fams, xs in groups.items():
        fam = chosen[fams]
        for x in xs:
            trees[sys.states[x]] = _tree(sys, x, fam, _check_family(sys, target, qm, x, list(fam)))
    cert = SpanningCertificate(tuple(_word_ids(sys, w) for w in words), trees)
    return RinvResult(n, size, cert, nodes)


def verify_certificate(sys: UncertainSystem, Q: Iterable, K: Iterable, cert: SpanningCertificate) -> bool:
    """Re-check every tree of a certificate against the definitions."""
    pool = set(cert.words)
    for x in K:
        tree = cert.trees.get(str(x))
        if tree is None or not tree.words <= pool:
            return False
        if not is_admissible(sys, Q, x, tree.words):
            return False
    return True


@dataclass(frozen=True)
class EntropyRow:
    n: int
    r_inv: int
    ratio: LogValue | None  # log2(r_inv) / n
    running_inf: LogValue | None


@dataclass(frozen=True)
class EntropyReport:
    rows: tuple[EntropyRow, ...]
    upper_bound: LogValue | None  # only when K == Q; never a lower bound


def entropy_report(
    sys: UncertainSystem,
    Q: Iterable,
    K: Iterable | None = None,
    n_max: int = 4,
    budget: int = DEFAULT_BUDGET,
) -> EntropyReport:
    """Finite-horizon growth ratios ``log2(r_inv(n)) / n`` for ``n = 1..n_max``.

    For ``K = Q`` the sequence ``log2 r_inv(n, Q)`` is subadditive, so the
    running minimum of the ratios bounds the entropy from above. Nothing
    here bounds it from below.
    """
    if n_max < 1:
        raise LengthMismatch("n_max must be >= 1")
    Q = list(Q)
    full = K is None or set(map(str, K)) == set(map(str, Q))
    rows = []
    best: LogValue | None = None
    for n in range(1, n_max + 1):
        r = r_inv(sys, Q, K, n, budget).count
        ratio = LogValue(r, n) if r > 0 else None
        if ratio is not None and (best is None or ratio < best):
            best = ratio
        rows.append(EntropyRow(n, r, ratio, best))
    return EntropyReport(tuple(rows), best if full else None)


# -- admissible matrix and the closed form ------------------------------------------


def admissible_matrix(sys: UncertainSystem, Q: Iterable, V: Sequence) -> CountMatrix:
    """``M[a][b] = 1`` iff some ``x`` in ``Q_a`` has ``F(x, a)`` meeting ``Q_b``."""
    target = sys.mask(Q)
    vi = [sys.input_index(a) for a in V]
    qm = sys.q_masks(target)
    rows = []
    for a in vi:
        row = []
        for b in vi:
            hit = any(sys.images[x][a] & qm[b] for x in iter_bits(qm[a]))
            row.append(int(hit))
        rows.append(tuple(row))
    return CountMatrix(tuple(sys.inputs[a] for a in vi), tuple(rows))


@dataclass(frozen=True)
class CoverReport:
    V: tuple[str, ...]
    cover_ok: bool
    c1_ok: bool
    c2_ok: bool
    c3_ok: bool
    cover_violations: tuple  # states of Q outside every Q_a, a in V
    c1_violations: tuple  # (a, b, shared states)
    c2_violations: tuple  # (a, b, states of Q_b missed by F(K, a))
    c3_violations: tuple  # (c, Q_c) for c outside V with Q_c nonempty
    c2_witness: dict  # (a, b) -> canonical K

    def flags(self) -> dict:
        return {"cover": self.cover_ok, "C.1": self.c1_ok, "C.2": self.c2_ok, "C.3": self.c3_ok}

    @property
    def all_ok(self) -> bool:
        return all(self.flags().values())


def check_conditions(sys: UncertainSystem, Q: Iterable, V: Sequence) -> CoverReport:
    """Cover property and C.1-C.3 for the input subset ``V``.

    For C.2 the witness is ``K = {x in Q_a : F(x, a) meets Q_b}``; any
    other subset of ``Q_a`` reaches no more of ``Q_b``.
    """
    target = sys.mask(Q)
    V = tuple(str(a) for a in V)
    vi = [sys.input_index(a) for a in V]
    qm = sys.q_masks(target)

    union = 0
    for a in vi:
        union |= qm[a]
    cover_v = sys.labels(target & ~union)

    c1 = []
    for i, a in enumerate(vi):
        for b in vi[i + 1 :]:
            if qm[a] & qm[b]:
                c1.append((sys.inputs[a], sys.inputs[b], sys.labels(qm[a] & qm[b])))

    M = admissible_matrix(sys, Q, V)
    c2 = []
    witness = {}
    for i, a in enumerate(vi):
        for j, b in enumerate(vi):
            if not M.rows[i][j]:
                continue
            K = 0
            for x in iter_bits(qm[a]):
                if sys.images[x][a] & qm[b]:
                    K |= 1 << x
            witness[(sys.inputs[a], sys.inputs[b])] = sys.labels(K)
            missed = qm[b] & ~sys.image(K, a)
            if missed:
                c2.append((sys.inputs[a], sys.inputs[b], sys.labels(missed)))

    inside = set(vi)
    c3 = [(sys.inputs[c], sys.labels(qm[c])) for c in range(sys.n_inputs) if c not in inside and qm[c]]

    return CoverReport(
        V=V,
        cover_ok=not cover_v,
        c1_ok=not c1,
        c2_ok=not c2,
        c3_ok=not c3,
        cover_violations=cover_v,
        c1_violations=tuple(c1),
        c2_violations=tuple(c2),
        c3_violations=tuple(c3),
        c2_witness=witness,
    )


@dataclass(frozen=True)
class HinvExact:
    value: Interval  # enclosure of log2 rho(M_{Q,V})
    exact: LogValue | None  # set when the cycle structure pins rho
    structural_one: bool
    radius: RadiusEnclosure
    matrix: CountMatrix


def h_inv_exact(sys: UncertainSystem, Q: Iterable, V: Sequence, tol: float = DEFAULT_TOL) -> HinvExact:
    """Invariance entropy as ``log2 rho(M_{Q,V})`` when C.1-C.3 hold.

    On failure raises :class:`ConditionsNotMet`; if ``V`` still covers
    ``Q`` the exception carries the enclosure of ``log2 rho``, which is then
    only an upper bound.
    """
    Q = list(Q)
    report = check_conditions(sys, Q, V)
    M = admissible_matrix(sys, Q, V)
    if not report.all_ok:
        upper = None
        if report.cover_ok:
            upper = spectral_radius(M, tol).log2()
        raise ConditionsNotMet(report, upper)
    rad = spectral_radius(M, tol)
    return HinvExact(rad.log2(), rad.exact, rad.exact_one, rad, M)


@dataclass(frozen=True)
class IdentityCheck:
    n: int
    r_inv: int
    norm: int

    @property
    def holds(self) -> bool:
        return self.r_inv == self.norm

    def __bool__(self) -> bool:
        return self.holds


def finite_n_identity_check(
    sys: UncertainSystem, Q: Iterable, V: Sequence, n: int, budget: int = DEFAULT_BUDGET
) -> IdentityCheck:
    """Compare ``r_inv(n, Q)`` with the entry sum of ``M_{Q,V}^(n-1)``."""
    if n < 2:
        raise LengthMismatch("the identity is stated for n >= 2")
    Q = list(Q)
    report = check_conditions(sys, Q, V)
    if not report.all_ok:
        raise ConditionsNotMet(report)
    M = admissible_matrix(sys, Q, V)
    return IdentityCheck(n, r_inv(sys, Q, None, n, budget).count, norm_l1(mat_pow(M, n - 1)))
