# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``.

``min_union_cover`` here handles masks of at most 64 bits; the selector in
``kernels`` routes wider inputs to the Python version.
"""

from libc.stdlib cimport malloc, free
from libc.math cimport INFINITY

ctypedef unsigned long long u64


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _pc(u64 m) nogil:
    return __builtin_popcountll(m)


def min_union_cover(families, long long max_nodes):
    cdef Py_ssize_t npts = len(families)
    if npts == 0:
        return 0, [], 0, True
    cdef Py_ssize_t p, i, total = 0
    for fams in families:
        if len(fams) == 0:
            raise ValueError("a group without candidates cannot be covered")
        total += len(fams)

    cdef u64 *flat = <u64 *> malloc(total * sizeof(u64))
    cdef Py_ssize_t *start = <Py_ssize_t *> malloc((npts + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *chosen = <Py_ssize_t *> malloc(npts * sizeof(Py_ssize_t))
    cdef Py_ssize_t *best_choice = <Py_ssize_t *> malloc(npts * sizeof(Py_ssize_t))
    # explicit stack of (depth, union, next index); depth never exceeds npts
    cdef Py_ssize_t cap = 2 * (npts + 2)
    cdef Py_ssize_t *st_d = <Py_ssize_t *> malloc(cap * sizeof(Py_ssize_t))
    cdef u64 *st_u = <u64 *> malloc(cap * sizeof(u64))
    cdef Py_ssize_t *st_i = <Py_ssize_t *> malloc(cap * sizeof(Py_ssize_t))
    cdef Py_ssize_t k = 0
    try:
        for p in range(npts):
            start[p] = k
            for f in families[p]:
                flat[k] = <u64> f
                k += 1
        start[npts] = k

        cdef_result = _search(flat, start, npts, chosen, best_choice,
                              st_d, st_u, st_i, max_nodes)
        best, nodes, complete = cdef_result
        return best, [best_choice[p] for p in range(npts)], nodes, complete
    finally:
        free(flat); free(start); free(chosen); free(best_choice)
        free(st_d); free(st_u); free(st_i)


cdef tuple _search(u64 *flat, Py_ssize_t *start, Py_ssize_t npts,
                   Py_ssize_t *chosen, Py_ssize_t *best_choice,
                   Py_ssize_t *st_d, u64 *st_u, Py_ssize_t *st_i,
                   long long max_nodes):
    cdef u64 union_ = 0, u, f
    cdef Py_ssize_t p, i, j, d, bi, top
    cdef int bs, s, best, lb, m
    cdef long long nodes = 0
    cdef bint complete = True

    for p in range(npts):
        bi = 0
        bs = -1
        for i in range(start[p + 1] - start[p]):
            s = _pc(union_ | flat[start[p] + i])
            if bs < 0 or s < bs:
                bi = i
                bs = s
        best_choice[p] = bi
        union_ |= flat[start[p] + bi]
    best = _pc(union_)

    for p in range(npts):
        chosen[p] = 0
    top = 0
    st_d[0] = 0; st_u[0] = 0; st_i[0] = 0
    top = 1
    while top > 0:
        top -= 1
        d = st_d[top]; u = st_u[top]; i = st_i[top]
        if i == 0:
            nodes += 1
            if nodes > max_nodes:
                complete = False
                break
            if d == npts:
                s = _pc(u)
                if s < best:
                    best = s
                    for p in range(npts):
                        best_choice[p] = chosen[p]
                continue
            lb = _pc(u)
            for p in range(d, npts):
                m = -1
                for j in range(start[p], start[p + 1]):
                    s = _pc(u | flat[j])
                    if m < 0 or s < m:
                        m = s
                if m > lb:
                    lb = m
            if lb >= best:
                continue
        if i < start[d + 1] - start[d]:
            st_d[top] = d; st_u[top] = u; st_i[top] = i + 1
            top += 1
            chosen[d] = i
            st_d[top] = d + 1; st_u[top] = u | flat[start[d] + i]; st_i[top] = 0
            top += 1
    return best, nodes, complete


def max_mean_cycle(succ, weight):
    cdef Py_ssize_t n = len(succ)
    if n == 0:
        return -INFINITY
    cdef Py_ssize_t v, w, k, e
    cdef Py_ssize_t total = 0
    for v in range(n):
        total += len(succ[v])
    cdef Py_ssize_t *off = <Py_ssize_t *> malloc((n + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *adj = <Py_ssize_t *> malloc((total + 1) * sizeof(Py_ssize_t))
    cdef double *wt = <double *> malloc(n * sizeof(double))
    cdef double *D = <double *> malloc((n + 1) * n * sizeof(double))
    cdef double val, best, worst, r
    try:
        e = 0
        for v in range(n):
            off[v] = e
            wt[v] = weight[v]
            for x in succ[v]:
                adj[e] = x
                e += 1
        off[n] = e
        for v in range(n):
            D[v] = 0.0
        for k in range(1, n + 1):
            for v in range(n):
                D[k * n + v] = -INFINITY
            for v in range(n):
                if D[(k - 1) * n + v] == -INFINITY:
                    continue
                val = D[(k - 1) * n + v] + wt[v]
                for e in range(off[v], off[v + 1]):
                    w = adj[e]
                    if val > D[k * n + w]:
                        D[k * n + w] = val
        best = -INFINITY
        for v in range(n):
            if D[n * n + v] == -INFINITY:
                continue
            worst = INFINITY
            for k in range(n):
                if D[k * n + v] == -INFINITY:
                    continue
                r = (D[n * n + v] - D[k * n + v]) / (n - k)
                if r < worst:
                    worst = r
            if worst > best:
                best = worst
        return best
    finally:
        free(off); free(adj); free(wt); free(D)
