# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels.  Must stay behaviourally identical to _pykernels.py."""

import numpy as np

ctypedef long long i64


cdef struct Grp:
    i64 N
    int nf
    i64* factors
    i64* strides
    i64* neg


cdef inline i64 gadd(Grp* g, i64 a, i64 b) nogil:
    cdef i64 out = 0, da, db, s, n
    cdef int i
    if g.nf == 1:
        out = a + b
        if out >= g.N:
            out -= g.N
        return out
    for i in range(g.nf):
        s = g.strides[i]
        n = g.factors[i]
        da = (a // s) % n
        db = (b // s) % n
        da += db
        if da >= n:
            da -= n
        out += da * s
    return out


cdef inline i64 gsigned(Grp* g, i64 v, i64 x, i64 sign) nogil:
    if sign > 0:
        return gadd(g, v, x)
    return gadd(g, v, g.neg[x])


cdef inline bint forbidden(i64 v, i64 e, i64[::1] forb_ptr, i64[::1] forb_val) nogil:
    cdef i64 k
    for k in range(forb_ptr[e], forb_ptr[e + 1]):
        if forb_val[k] == v:
            return True
    return False


cdef Grp make_grp(i64[::1] factors, i64[::1] strides, i64[::1] neg, i64 N):
    cdef Grp g
    g.N = N
    g.nf = factors.shape[0]
    g.factors = &factors[0] if g.nf > 0 else NULL
    g.strides = &strides[0] if g.nf > 0 else NULL
    g.neg = &neg[0]
    return g


cdef int _flow_dfs(Grp* g, int r, i64[::1] cur, i64[::1] save, i64[::1] x,
                   i64[::1] upd_ptr, i64[::1] upd_edge, i64[::1] upd_sign,
                   i64[::1] chk_ptr, i64[::1] chk_edge,
                   i64[::1] forb_ptr, i64[::1] forb_val,
                   i64* nodes, i64 max_nodes) nogil:
    """1 = found (x filled), 0 = none exists, -1 = node budget exhausted."""
    cdef i64 k, e, v
    cdef int j
    cdef bint bad
    for k in range(chk_ptr[0], chk_ptr[1]):
        e = chk_edge[k]
        if forbidden(cur[e], e, forb_ptr, forb_val):
            return 0
    if r == 0:
        return 1
    j = 0
    x[0] = -1
    for k in range(upd_ptr[0], upd_ptr[1]):
        save[k] = cur[upd_edge[k]]
    while True:
        x[j] += 1
        if x[j] >= g.N:
            # undo this level before stepping back, later saves must not see it
            for k in range(upd_ptr[j], upd_ptr[j + 1]):
                cur[upd_edge[k]] = save[k]
            j -= 1
            if j < 0:
                return 0
            continue
        nodes[0] += 1
        if nodes[0] > max_nodes:
            return -1
        for k in range(upd_ptr[j], upd_ptr[j + 1]):
            cur[upd_edge[k]] = gsigned(g, save[k], x[j], upd_sign[k])
        bad = False
        for k in range(chk_ptr[j + 1], chk_ptr[j + 2]):
            e = chk_edge[k]
            if forbidden(cur[e], e, forb_ptr, forb_val):
                bad = True
                break
        if bad:
            continue
        if j + 1 == r:
            return 1
        j += 1
        x[j] = -1
        for k in range(upd_ptr[j], upd_ptr[j + 1]):
            save[k] = cur[upd_edge[k]]


def search_flow(i64[::1] factors, i64[::1] strides, i64[::1] neg, i64 N, int r,
                i64[::1] base, i64[::1] upd_ptr, i64[::1] upd_edge, i64[::1] upd_sign,
                i64[::1] chk_ptr, i64[::1] chk_edge, i64[::1] forb_ptr, i64[::1] forb_val,
                i64 max_nodes):
    cdef Grp g = make_grp(factors, strides, neg, N)
    cdef i64[::1] cur = np.array(base, dtype=np.int64)
    cdef i64[::1] save = np.zeros(max(upd_edge.shape[0], 1), dtype=np.int64)
    cdef i64[::1] x = np.zeros(max(r, 1), dtype=np.int64)
    cdef i64 nodes = 0
    cdef int status
    with nogil:
        status = _flow_dfs(&g, r, cur, save, x, upd_ptr, upd_edge, upd_sign, chk_ptr, chk_edge,
                           forb_ptr, forb_val, &nodes, max_nodes)
    return status, nodes, list(x[:r]) if status == 1 else None


def all_boundaries(i64[::1] factors, i64[::1] strides, i64[::1] neg, i64 N, int r, int nfree,
                   i64[::1] bnd_ptr, i64[::1] bnd_slot, i64[::1] bnd_sign,
                   i64[::1] upd_ptr, i64[::1] upd_edge, i64[::1] upd_sign,
                   i64[::1] chk_ptr, i64[::1] chk_edge, i64[::1] forb_ptr, i64[::1] forb_val,
                   i64 max_nodes):
    """Status 1: every boundary admits an allowed flow; 0: returns the first failing boundary."""
    cdef Grp g = make_grp(factors, strides, neg, N)
    cdef int m = bnd_ptr.shape[0] - 1
    cdef i64[::1] beta = np.zeros(max(nfree, 1), dtype=np.int64)
    cdef i64[::1] cur = np.zeros(max(m, 1), dtype=np.int64)
    cdef i64[::1] save = np.zeros(max(upd_edge.shape[0], 1), dtype=np.int64)
    cdef i64[::1] x = np.zeros(max(r, 1), dtype=np.int64)
    cdef i64 nodes = 0, count = 0, k, v
    cdef int e, i, status = 1, res
    with nogil:
        while True:
            count += 1
            for e in range(m):
                v = 0
                for k in range(bnd_ptr[e], bnd_ptr[e + 1]):
                    v = gsigned(&g, v, beta[bnd_slot[k]], bnd_sign[k])
                cur[e] = v
            res = _flow_dfs(&g, r, cur, save, x, upd_ptr, upd_edge, upd_sign, chk_ptr, chk_edge,
                            forb_ptr, forb_val, &nodes, max_nodes)
            if res != 1:
                status = res
                break
            i = 0
            while i < nfree:
                beta[i] += 1
                if beta[i] < N:
                    break
                beta[i] = 0
                i += 1
            if i == nfree:
                break
    return status, nodes, count, list(beta[:nfree]) if status == 0 else None


def all_forbidden_maps(i64[::1] factors, i64[::1] strides, i64[::1] neg, i64 N, int r, int m,
                       i64[::1] upd_ptr, i64[::1] upd_edge, i64[::1] upd_sign,
                       i64[::1] chk_ptr, i64[::1] chk_edge, i64 max_nodes):
    """Every single-valued forbidden map phi admits a circulation avoiding phi everywhere?"""
    cdef Grp g = make_grp(factors, strides, neg, N)
    cdef i64[::1] forb_ptr = np.arange(m + 1, dtype=np.int64)
    cdef i64[::1] phi = np.zeros(max(m, 1), dtype=np.int64)
    cdef i64[::1] cur = np.zeros(max(m, 1), dtype=np.int64)
    cdef i64[::1] save = np.zeros(max(upd_edge.shape[0], 1), dtype=np.int64)
    cdef i64[::1] x = np.zeros(max(r, 1), dtype=np.int64)
    cdef i64 nodes = 0, count = 0
    cdef int e, i, status = 1, res
    with nogil:
        while True:
            count += 1
            for e in range(m):
                cur[e] = 0
            res = _flow_dfs(&g, r, cur, save, x, upd_ptr, upd_edge, upd_sign, chk_ptr, chk_edge,
                            forb_ptr, phi, &nodes, max_nodes)
            if res != 1:
                status = res
                break
            i = 0
            while i < m:
                phi[i] += 1
                if phi[i] < N:
                    break
                phi[i] = 0
                i += 1
            if i == m:
                break
    return status, nodes, count, list(phi[:m]) if status == 0 else None


cdef int _color_dfs(Grp* g, int n, i64[::1] root, i64[::1] con_ptr, i64[::1] con_edge,
                    i64[::1] con_other, i64[::1] con_sign, i64[::1] phi, i64[::1] c,
                    i64* nodes, i64 max_nodes) nogil:
    cdef int p = 0
    cdef i64 k, banned
    cdef bint bad
    if n == 0:
        return 1
    c[0] = -1
    while True:
        c[p] += 1
        if c[p] >= g.N or (root[p] and c[p] > 0):
            p -= 1
            if p < 0:
                return 0
            continue
        nodes[0] += 1
        if nodes[0] > max_nodes:
            return -1
        bad = False
        for k in range(con_ptr[p], con_ptr[p + 1]):
            banned = gsigned(g, c[con_other[k]], phi[con_edge[k]], con_sign[k])
            if c[p] == banned:
                bad = True
                break
        if bad:
            continue
        if p + 1 == n:
            return 1
        p += 1
        c[p] = -1


def search_coloring(i64[::1] factors, i64[::1] strides, i64[::1] neg, i64 N, int n,
                    i64[::1] root, i64[::1] con_ptr, i64[::1] con_edge, i64[::1] con_other,
                    i64[::1] con_sign, i64[::1] phi, i64 max_nodes):
    cdef Grp g = make_grp(factors, strides, neg, N)
    cdef i64[::1] c = np.zeros(max(n, 1), dtype=np.int64)
    cdef i64 nodes = 0
    cdef int status
    with nogil:
        status = _color_dfs(&g, n, root, con_ptr, con_edge, con_other, con_sign, phi, c, &nodes, max_nodes)
    return status, nodes, list(c[:n]) if status == 1 else None


def all_edge_maps(i64[::1] factors, i64[::1] strides, i64[::1] neg, i64 N, int n, int m,
                  i64[::1] root, i64[::1] con_ptr, i64[::1] con_edge, i64[::1] con_other,
                  i64[::1] con_sign, i64[::1] free_edges, i64 max_nodes):
    """Every edge map varying only on ``free_edges`` (zero elsewhere) admits a proper coloring?"""
    cdef Grp g = make_grp(factors, strides, neg, N)
    cdef int nfree = free_edges.shape[0]
    cdef i64[::1] phi = np.zeros(max(m, 1), dtype=np.int64)
    cdef i64[::1] c = np.zeros(max(n, 1), dtype=np.int64)
    cdef i64 nodes = 0, count = 0
    cdef int i, status = 1, res
    with nogil:
        while True:
            count += 1
            res = _color_dfs(&g, n, root, con_ptr, con_edge, con_other, con_sign, phi, c, &nodes, max_nodes)
            if res != 1:
                status = res
                break
            i = 0
            while i < nfree:
                phi[free_edges[i]] += 1
                if phi[free_edges[i]] < N:
                    break
                phi[free_edges[i]] = 0
                i += 1
            if i == nfree:
                break
    return status, nodes, count, list(phi[:m]) if status == 0 else None
