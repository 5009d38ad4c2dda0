"""Brute-force reference computations and random instance generators.

The oracles re-derive ``r_inv`` and the minimal expansion number straight
from the definitions, sharing no search code with :mod:`spanning` or
:mod:`cover`. They are exponential and return ``None`` when an instance is
past their cap instead of running for ever.
"""

from __future__ import annotations

import random
from itertools import combinations, product
from typing import Iterable, Sequence

from .cover import InvariantCover, build_cover
from .system import ConjugacyPair, UncertainSystem, iter_bits, maximal_invariant_subset


# -- r_inv ----------------------------------------------------------------------------


def _spans_point(sys: UncertainSystem, target: int, qm, x: int, pool: set, n: int) -> bool:
    """Does ``pool`` contain an admissible family for ``x``?

    Literal reading of the family conditions: from each node every
    continuation present in ``pool`` that lands in a nonempty ``Q_b`` and
    can itself be completed is kept, and the kept ``Q_b`` must swallow the
    whole image.
    """
    prefixes = {w[:i] for w in pool for i in range(1, n + 1)}

    def ok(prefix: tuple, I: int) -> bool:
        J = sys.image(I, prefix[-1])
        if len(prefix) == n:
            return not J & ~target
        covered = 0
        for b in range(sys.n_inputs):
            p = prefix + (b,)
            if p in prefixes and J & qm[b] and ok(p, J & qm[b]):
                covered |= qm[b]
        return not J & ~covered

    return any((u,) in prefixes and ok((u,), 1 << x) for u in range(sys.n_inputs))


def _viable(sys: UncertainSystem, target: int, qm, x: int, w: tuple) -> bool:
    """Necessary condition for ``w`` to sit in some admissible family for ``x``."""
    I = 1 << x
    for i, u in enumerate(w):
        J = sys.image(I, u)
        if J & ~target:
            return False
        if i + 1 < len(w):
            I = J & qm[w[i + 1]]
            if not I:
                return False
    return True


def brute_rinv(
    sys: UncertainSystem,
    Q: Iterable,
    K: Iterable | None,
    n: int,
    max_subsets: int = 300_000,
) -> int | None:
    """Smallest word set spanning every point of ``K``, by increasing cardinality.

    Only words that can occur in some family are pooled (a minimal spanning
    set is a union of families). Returns ``None`` when more than
    ``max_subsets`` candidate sets would be needed, or ``-1`` when no subset
    of ``U^n`` spans.
    """
    target = sys.mask(Q)
    kmask = target if K is None else sys.mask(K)
    if not kmask:
        return 0
    qm = sys.q_masks(target)
    points = list(iter_bits(kmask))
    words = list(product(range(sys.n_inputs), repeat=n))
    pool = sorted({w for w in words for x in points if _viable(sys, target, qm, x, w)})
    if not all(_spans_point(sys, target, qm, x, set(pool), n) for x in points):
        return -1
    spent = 0
    for k in range(1, len(pool) + 1):
        for sub in combinations(pool, k):
            spent += 1
            if spent > max_subsets:
                return None
            s = set(sub)
            if all(_spans_point(sys, target, qm, x, s, n) for x in points):
                return k
    return -1  # unreachable: the full pool spans


# -- expansion number ------------------------------------------------------------------


def expansion_number(cover: InvariantCover, S: Iterable[Sequence[int]], n: int) -> int | None:
    """``N(S)`` for a set of length-``n`` cell-index sequences, or ``None``
    when ``S`` is not ``(n, Q)``-spanning in the cover."""
    S = [tuple(a) for a in S]
    if not S:
        return None
    initial = {a[0] for a in S}
    union = 0
    for c in initial:
        union |= cover.masks[c]
    if union != cover.target:
        return None
    best = 0
    for a in S:
        prod = len(initial)
        for t in range(n - 1):
            nxt = {b[t + 1] for b in S if b[: t + 1] == a[: t + 1]}
            reach = 0
            for c in nxt:
                reach |= cover.masks[c]
            if cover.image(a[t]) & ~reach:
                return None
            prod *= len(nxt)
        best = max(best, prod)
    return best


def _covering_subsets(cover: InvariantCover, need: int) -> list[tuple[int, ...]]:
    """Subfamilies of cells meeting ``need`` whose union contains it."""
    touch = [i for i, m in enumerate(cover.masks) if m & need]
    out = []
    for k in range(1, len(touch) + 1):
        for sub in combinations(touch, k):
            u = 0
            for i in sub:
                u |= cover.masks[i]
            if not need & ~u:
                out.append(sub)
    return out


def brute_cover_rinv(cover: InvariantCover, n: int, max_trees: int = 20_000) -> int | None:
    """Minimal ``N(S)`` over every prefix tree of sequences, scored literally.

    Each tree is expanded into its explicit sequence set and passed to
    :func:`expansion_number`. Children that miss the image are left out
    (they only enlarge branching sets). Returns ``None`` above ``max_trees``.
    """
    k = len(cover)
    opts = [_covering_subsets(cover, cover.image(i)) for i in range(k)]
    roots = _covering_subsets(cover, cover.target)

    count = [1] * k
    for _ in range(n - 1):
        new = []
        for i in range(k):
            total = 0
            for D in opts[i]:
                p = 1
                for b in D:
                    p *= count[b]
                total += p
            new.append(total)
        count = new
    total = 0
    for D in roots:
        p = 1
        for b in D:
            p *= count[b]
        total += p
    if total > max_trees:
        return None

    def trees(cell: int, h: int):
        if h == 0:
            yield [(cell,)]
            return
        for D in opts[cell]:
            for parts in product(*(list(trees(b, h - 1)) for b in D)):
                yield [(cell,) + s for part in parts for s in part]

    best = None
    for D in roots:
        for parts in product(*(list(trees(b, n - 1)) for b in D)):
            S = [s for part in parts for s in part]
            v = expansion_number(cover, S, n)
            if v is not None and (best is None or v < best):
                best = v
    return best


# -- random instances ----------------------------------------------------------------------


def random_system(rng: random.Random, max_states: int = 5, max_inputs: int = 3, name: str = "rnd") -> UncertainSystem:
    ns = rng.randint(1, max_states)
    nu = rng.randint(1, max_inputs)
    states = [str(i) for i in range(ns)]
    inputs = [chr(ord("a") + i) for i in range(nu)]
    trans = {}
    for x in states:
        for u in inputs:
            k = rng.choice([1, 1, 1, 2, 2, 3])
            trans[(x, u)] = rng.sample(states, min(k, ns))
    return UncertainSystem.from_table(name, states, inputs, trans)


def random_invariant_target(rng: random.Random, sys: UncertainSystem, tries: int = 20) -> list[str] | None:
    """A nonempty controlled invariant set, or ``None`` if none turned up."""
    for _ in range(tries):
        seed = 0
        while not seed:
            seed = rng.getrandbits(sys.n_states)
        inv = maximal_invariant_subset(sys, seed)
        if inv:
            return list(sys.labels(inv))
    inv = maximal_invariant_subset(sys, sys.full_mask)
    return list(sys.labels(inv)) if inv else None


def random_cover(rng: random.Random, sys: UncertainSystem, Q: Sequence[str], max_cells: int = 3) -> InvariantCover | None:
    """A random invariant cover of ``Q`` with at most ``max_cells`` cells."""
    target = sys.mask(Q)
    qm = sys.q_masks(target)
    for _ in range(30):
        cells, G = [], {}
        union = 0
        while union != target and len(cells) < max_cells:
            missing = list(iter_bits(target & ~union))
            x = rng.choice(missing)
            u = rng.choice([u for u in range(sys.n_inputs) if qm[u] >> x & 1])
            extra = [y for y in iter_bits(qm[u]) if y != x and rng.random() < 0.5]
            m = (1 << x) | sum(1 << y for y in extra)
            cid = f"C{len(cells)}"
            cells.append((cid, sys.labels(m)))
            G[cid] = sys.inputs[u]
            union |= m
        if union == target:
            return build_cover(sys, Q, cells, G, name="rnd")
    return None


def random_semi_conjugate(
    rng: random.Random, max_states: int = 5, max_inputs: int = 3
) -> tuple[UncertainSystem, UncertainSystem, ConjugacyPair]:
    """A pair ``(S1, S2)`` with a semi-conjugacy from ``S1`` onto ``S2``.

    ``S2`` is drawn first; ``S1`` lifts each image of ``S2`` through random
    preimages of the state map and may add extra successors.
    """
    s2 = random_system(rng, max(1, max_states - 1), max(1, max_inputs - 1), name="image")
    n1 = rng.randint(s2.n_states, max_states)
    m1 = rng.randint(s2.n_inputs, max_inputs)
    pi = list(range(s2.n_states)) + [rng.randrange(s2.n_states) for _ in range(n1 - s2.n_states)]
    r = list(range(s2.n_inputs)) + [rng.randrange(s2.n_inputs) for _ in range(m1 - s2.n_inputs)]
    rng.shuffle(pi)
    rng.shuffle(r)
    pre = {y: [x for x in range(n1) if pi[x] == y] for y in range(s2.n_states)}
    states = [f"s{i}" for i in range(n1)]
    inputs = [f"u{i}" for i in range(m1)]
    trans = {}
    for x in range(n1):
        for u in range(m1):
            succ = {rng.choice(pre[y]) for y in iter_bits(s2.images[pi[x]][r[u]])}
            for z in range(n1):
                if rng.random() < 0.15:
                    succ.add(z)
            trans[(states[x], inputs[u])] = sorted(states[z] for z in succ)
    s1 = UncertainSystem.from_table("source", states, inputs, trans)
    c = ConjugacyPair(
        {states[x]: s2.states[pi[x]] for x in range(n1)},
        {inputs[u]: s2.inputs[r[u]] for u in range(m1)},
    )
    return s1, s2, c
