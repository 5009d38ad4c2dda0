"""Integer matrices, digraph structure and certified spectral radii.

Matrices are small and dense; entries are Python ints so powers stay exact.
Spectral radii are reported as enclosures ``lo <= rho <= hi`` obtained from
Collatz-Wielandt bounds evaluated in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CycleBudgetExceeded, NonConvergence, OrderMismatch
from .logvalue import LogValue

DEFAULT_TOL = 1e-9
DEFAULT_CYCLE_CAP = 10**6


@dataclass(frozen=True)
class CountMatrix:
    labels: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("matrix labels must be unique")
        if len(self.rows) != n or any(len(r) != n for r in self.rows):
            raise OrderMismatch(f"expected a {n}x{n} matrix")
        if any(v < 0 for r in self.rows for v in r):
            raise ValueError("entries must be nonnegative")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], labels: Sequence[str] | None = None) -> CountMatrix:
        if labels is None:
            labels = [str(i) for i in range(len(rows))]
        return cls(tuple(labels), tuple(tuple(int(v) for v in r) for r in rows))

    @property
    def order(self) -> int:
        return len(self.labels)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def successors(self) -> list[list[int]]:
        return [[j for j, v in enumerate(r) if v] for r in self.rows]

    def is_binary(self) -> bool:
        return all(v in (0, 1) for r in self.rows for v in r)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def __str__(self) -> str:
        return f"lo={self.lo:.12f}\thi={self.hi:.12f}"


@dataclass(frozen=True)
class RadiusEnclosure:
    lo: float
    hi: float
    exact_one: bool = False
    exact: LogValue | None = None  # log2 of rho when the cycle structure pins it
    iterations: int = 0
    history: tuple[tuple[float, float], ...] = ()

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def log2(self) -> Interval:
        """Outward-rounded enclosure of ``log2(rho)``; ``-inf`` for rho = 0."""
        lo = _log2_down(self.lo)
        hi = _log2_up(self.hi)
        if self.exact is not None:
            v = float(self.exact)
            lo, hi = min(lo, v), max(hi, v)
        return Interval(lo, hi)


def _exact_log2(x: float) -> bool:
    return x > 0 and math.frexp(x)[0] == 0.5


def _log2_down(x: float) -> float:
    if x <= 0:
        return -math.inf
    return math.log2(x) if _exact_log2(x) else _down(math.log2(x))


def _log2_up(x: float) -> float:
    if x <= 0:
        return -math.inf
    return math.log2(x) if _exact_log2(x) else _up(math.log2(x))


def _down(x: float, k: int = 2) -> float:
    for _ in range(k):
        x = math.nextafter(x, -math.inf)
    return x


def _up(x: float, k: int = 2) -> float:
    for _ in range(k):
        x = math.nextafter(x, math.inf)
    return x


def _frac_down(q: Fraction) -> float:
    f = float(q)
    return f if Fraction(f) <= q else math.nextafter(f, -math.inf)


def _frac_up(q: Fraction) -> float:
    f = float(q)
    return f if Fraction(f) >= q else math.nextafter(f, math.inf)


# -- arithmetic ---------------------------------------------------------


def mat_mul(A: CountMatrix, B: CountMatrix) -> CountMatrix:
    if A.order != B.order:
        raise OrderMismatch(f"cannot multiply {A.order}x{A.order} by {B.order}x{B.order}")
    n = A.order
    cols = list(zip(*B.rows)) if n else []
    rows = tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in A.rows)
    return CountMatrix(A.labels, rows)


def identity(labels: Sequence[str]) -> CountMatrix:
    n = len(labels)
    return CountMatrix(tuple(labels), tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def mat_pow(M: CountMatrix, k: int) -> CountMatrix:
    if k < 0:
        raise ValueError("negative matrix power")
    result = identity(M.labels)
    base = M
    while k:
        if k & 1:
            result = mat_mul(result, base)
        k >>= 1
        if k:
            base = mat_mul(base, base)
    return result


def norm_l1(M: CountMatrix) -> int:
    """Sum of all entries."""
    return sum(sum(r) for r in M.rows)


def norm_linf(M: CountMatrix) -> int:
    """Largest entry (the entrywise max norm, not the max row sum)."""
    return max((v for r in M.rows for v in r), default=0)


# -- digraph structure ----------------------------------------------------


def scc_indices(succ: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Tarjan's algorithm, iterative. Components come out in reverse
    topological order (sinks first); members are sorted."""
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[tuple[int, ...]] = []
    counter = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work.pop()
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for i in range(pi, len(succ[v])):
                w = succ[v][i]
                if index[w] < 0:
                    work.append((v, i + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def scc(M: CountMatrix) -> list[tuple[str, ...]]:
    """Strongly connected components of the digraph of nonzero entries."""
    return [tuple(M.labels[i] for i in c) for c in scc_indices(M.successors())]


def _is_nontrivial(comp: tuple[int, ...], succ) -> bool:
    return len(comp) > 1 or comp[0] in succ[comp[0]]


def simple_cycle_indices(succ: Sequence[Sequence[int]], cap: int = DEFAULT_CYCLE_CAP) -> list[tuple[int, ...]]:
    """All elementary circuits (Johnson's algorithm).

    Each cycle starts at its smallest vertex; the list is sorted
    lexicographically. Raises :class:`CycleBudgetExceeded` past ``cap``.
    """
    n = len(succ)
    found: list[tuple[int, ...]] = []
    for s in range(n):
        # subgraph on vertices >= s, restricted to the component of s
        sub = [[w for w in succ[v] if w >= s] if v >= s else [] for v in range(n)]
        comp = next(c for c in scc_indices(sub) if s in c)
        members = set(comp)
        if not (len(comp) > 1 or s in sub[s]):
            continue
        adj = {v: [w for w in sub[v] if w in members] for v in comp}
        blocked = {v: False for v in comp}
        bmap: dict[int, set[int]] = {v: set() for v in comp}
        path = [s]
        iters = [iter(adj[s])]
        closed = [False]
        blocked[s] = True
        while iters:
            v = path[-1]
            advanced = False
            for w in iters[-1]:
                if w == s:
                    found.append(tuple(path))
                    if len(found) > cap:
                        raise CycleBudgetExceeded(f"more than {cap} simple cycles", partial=found)
                    closed[-1] = True
                elif not blocked[w]:
                    path.append(w)
                    iters.append(iter(adj[w]))
                    closed.append(False)
                    blocked[w] = True
                    advanced = True
                    break
            if advanced:
                continue
            # v exhausted
            path.pop()
            iters.pop()
            was_closed = closed.pop()
            if was_closed:
                _unblock(v, blocked, bmap)
                if closed:
                    closed[-1] = True
            else:
                for w in adj[v]:
                    bmap[w].add(v)
    found.sort()
    return found


def _unblock(v: int, blocked: dict, bmap: dict) -> None:
    todo = [v]
    while todo:
        x = todo.pop()
        if blocked[x]:
            blocked[x] = False
            todo.extend(bmap[x])
            bmap[x].clear()


def simple_cycles(M: CountMatrix, cap: int = DEFAULT_CYCLE_CAP) -> list[tuple[str, ...]]:
    return [tuple(M.labels[i] for i in c) for c in simple_cycle_indices(M.successors(), cap)]


# -- spectral radius ------------------------------------------------------


def cycle_structure_radius(M: CountMatrix) -> LogValue | None:
    """``log2(rho)`` exactly when every nontrivial SCC is one simple cycle.

    Such a block has a cyclic-permutation pattern, so its radius is the
    geometric mean of the entries along the cycle. Returns ``None`` when some
    block is not a simple cycle, or when the graph has no cycle at all
    (``rho = 0`` has no logarithm).
    """
    succ = M.successors()
    best: LogValue | None = None
    for comp in scc_indices(succ):
        if not _is_nontrivial(comp, succ):
            continue
        members = set(comp)
        inner = {v: [w for w in succ[v] if w in members] for v in comp}
        indeg = {v: 0 for v in comp}
        for v in comp:
            for w in inner[v]:
                indeg[w] += 1
        if any(len(inner[v]) != 1 or indeg[v] != 1 for v in comp):
            return None
        p = 1
        for v in comp:
            p *= M.rows[v][inner[v][0]]
        val = LogValue(p, len(comp))
        if best is None or val > best:
            best = val
    return best


def radius_is_one(M: CountMatrix) -> bool:
    """Exact test for ``rho(M) == 1`` on a nonnegative integer matrix.

    True iff the digraph has a cycle and every nontrivial SCC is a single
    simple cycle whose entries are all 1. An irreducible integer block with
    any extra edge, or a cycle entry above 1, has radius strictly above 1.
    """
    v = cycle_structure_radius(M)
    return v is not None and v.is_zero()


def _block_enclosure(B: np.ndarray, tol: float, max_iter: int, start: str):
    """Collatz-Wielandt enclosure of the Perron root of an irreducible block."""
    n = B.shape[0]
    exact_rows = [[Fraction(int(v)) for v in row] for row in B]
    if start == "ones":
        v = np.ones(n)
    else:
        vals, vecs = np.linalg.eig(B.astype(float))
        i = int(np.argmax(vals.real))
        v = np.abs(vecs[:, i].real)
        if not np.all(v > 0) or not np.all(np.isfinite(v)):
            v = np.ones(n)
    shifted = B.astype(float) + np.eye(n)
    lo, hi = 0.0, math.inf
    history = []
    for it in range(1, max_iter + 1):
        v = v / v.max()
        q = [Fraction(float(x)) for x in v]
        ratios = [sum(r[j] * q[j] for j in range(n)) / q[i] for i, r in enumerate(exact_rows)]
        lo = max(lo, _frac_down(min(ratios)))
        hi = min(hi, _frac_up(max(ratios)))
        history.append((lo, hi))
        if hi - lo <= tol:
            return lo, hi, it, history
        v = shifted @ v
        if not np.all(v > 0):
            v = np.maximum(v, np.finfo(float).tiny)
    raise NonConvergence(f"no {tol} enclosure after {max_iter} iterations (last [{lo}, {hi}])")


def spectral_radius(
    M: CountMatrix,
    tol: float = DEFAULT_TOL,
    max_iter: int = 100_000,
    start: str = "eig",
) -> RadiusEnclosure:
    """Enclose ``rho(M)`` to width ``tol``.

    The radius is the maximum over SCC blocks. Each irreducible block is
    bracketed by Collatz-Wielandt quotients of a positive vector, refined by
    power iteration on ``block + I`` (aperiodic, same Perron vector). The
    quotients are evaluated in rational arithmetic and rounded outward.
    ``start='ones'`` begins from the all-ones vector instead of a numerical
    eigenvector.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    succ = M.successors()
    lo = hi = 0.0
    total_it = 0
    history: list = []
    A = np.array(M.rows, dtype=object) if M.order else np.zeros((0, 0), dtype=object)
    for comp in scc_indices(succ):
        if not _is_nontrivial(comp, succ):
            continue
        if len(comp) == 1:
            v = float(M.rows[comp[0]][comp[0]])
            blo, bhi = v, v
        else:
            idx = list(comp)
            blo, bhi, it, hist = _block_enclosure(A[np.ix_(idx, idx)], tol, max_iter, start)
            total_it += it
            history.extend(hist)
        lo, hi = max(lo, blo), max(hi, bhi)
    exact = cycle_structure_radius(M)
    return RadiusEnclosure(
        lo=lo,
        hi=hi,
        exact_one=exact is not None and exact.is_zero(),
        exact=exact,
        iterations=total_it,
        history=tuple(history),
    )
