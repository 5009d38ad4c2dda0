"""Pure-Python reference kernels.

The compiled module ``_ckernels`` implements the same functions with the same
visiting order, so both backends return bit-identical results.
"""

from __future__ import annotations

import math


def _pc(m: int) -> int:
    return bin(m).count("1")


def min_union_cover(families, max_nodes):
    """Pick one mask per group so that the union has the fewest bits.

    ``families[p]`` is the list of candidate masks for group ``p``. Returns
    ``(size, choice, nodes, complete)``; ``choice[p]`` indexes
    ``families[p]``. With ``complete`` false the answer is only the best
    union found before ``max_nodes`` search nodes were spent.
    """
    npts = len(families)
    if npts == 0:
        return 0, [], 0, True
    for fams in families:
        if not fams:
            raise ValueError("a group without candidates cannot be covered")

    # greedy incumbent
    union = 0
    choice = []
    for fams in families:
        bi, bs = 0, -1
        for i, f in enumerate(fams):
            s = _pc(union | f)
            if bs < 0 or s < bs:
                bi, bs = i, s
        choice.append(bi)
        union |= fams[bi]
    best = _pc(union)
    best_choice = list(choice)

    chosen = [0] * npts
    nodes = 0
    complete = True
    # explicit stack: (depth, union, next candidate index)
    stack = [(0, 0, 0)]
    while stack:
        d, u, i = stack.pop()
        if i == 0:
            nodes += 1
            if nodes > max_nodes:
                complete = False
                break
            if d == npts:
                s = _pc(u)
                if s < best:
                    best = s
                    best_choice = list(chosen)
                continue
            lb = _pc(u)
            for p in range(d, npts):
                m = -1
                for f in families[p]:
                    s = _pc(u | f)
                    if m < 0 or s < m:
                        m = s
                if m > lb:
                    lb = m
            if lb >= best:
                continue
        if i < len(families[d]):
            stack.append((d, u, i + 1))
            chosen[d] = i
            stack.append((d + 1, u | families[d][i], 0))
    return best, best_choice, nodes, complete


def max_mean_cycle(succ, weight):
    """Karp's maximum mean cycle on a digraph with vertex-attached weights.

    ``succ[v]`` lists the successors of ``v``; an edge ``v -> w`` carries
    ``weight[v]``. Returns ``-inf`` for an acyclic graph.
    """
    n = len(succ)
    if n == 0:
        return -math.inf
    ninf = -math.inf
    D = [[0.0] * n]
    for k in range(1, n + 1):
        prev = D[-1]
        cur = [ninf] * n
        for v in range(n):
            pv = prev[v]
            if pv == ninf:
                continue
            val = pv + weight[v]
            for w in succ[v]:
                if val > cur[w]:
                    cur[w] = val
        D.append(cur)
    best = ninf
    last = D[n]
    for v in range(n):
        if last[v] == ninf:
            continue
        worst = math.inf
        for k in range(n):
            if D[k][v] == ninf:
                continue
            r = (last[v] - D[k][v]) / (n - k)
            if r < worst:
                worst = r
        if worst > best:
            best = worst
    return best
