"""Pure-Python search kernels; same signatures and results as the compiled ``_kernels``.

Status codes: 1 = found / all good, 0 = none exists / counterexample found,
-1 = node budget exhausted.
"""

from __future__ import annotations


def _adder(factors, strides, N):
    factors, strides = list(factors), list(strides)
    if len(factors) == 1:
        return lambda a, b: (a + b) % N
    if not factors:
        return lambda a, b: 0

    def add(a, b):
        out = 0
        for s, n in zip(strides, factors):
            out += ((a // s + b // s) % n) * s
        return out

    return add


def _flow_dfs(add, neg, N, r, cur, upd_ptr, upd_edge, upd_sign, chk_ptr, chk_edge, forb, nodes, max_nodes):
    for k in range(chk_ptr[0], chk_ptr[1]):
        e = chk_edge[k]
        if cur[e] in forb[e]:
            return 0, None
    if r == 0:
        return 1, []
    x = [-1] * r
    save = [0] * len(upd_edge)
    j = 0
    for k in range(upd_ptr[0], upd_ptr[1]):
        save[k] = cur[upd_edge[k]]
    while True:
        x[j] += 1
        if x[j] >= N:
            for k in range(upd_ptr[j], upd_ptr[j + 1]):
                cur[upd_edge[k]] = save[k]
            j -= 1
            if j < 0:
                return 0, None
            continue
        nodes[0] += 1
        if nodes[0] > max_nodes:
            return -1, None
        xv = x[j]
        nx = neg[xv]
        for k in range(upd_ptr[j], upd_ptr[j + 1]):
            cur[upd_edge[k]] = add(save[k], xv if upd_sign[k] > 0 else nx)
        bad = False
        for k in range(chk_ptr[j + 1], chk_ptr[j + 2]):
            e = chk_edge[k]
            if cur[e] in forb[e]:
                bad = True
                break
        if bad:
            continue
        if j + 1 == r:
            return 1, x
        j += 1
        x[j] = -1
        for k in range(upd_ptr[j], upd_ptr[j + 1]):
            save[k] = cur[upd_edge[k]]


def _forb_sets(forb_ptr, forb_val):
    return [frozenset(forb_val[forb_ptr[e]:forb_ptr[e + 1]]) for e in range(len(forb_ptr) - 1)]


def search_flow(factors, strides, neg, N, r, base, upd_ptr, upd_edge, upd_sign,
                chk_ptr, chk_edge, forb_ptr, forb_val, max_nodes):
    add = _adder(factors, strides, N)
    nodes = [0]
    status, x = _flow_dfs(add, list(neg), N, r, list(base), list(upd_ptr), list(upd_edge), list(upd_sign),
                          list(chk_ptr), list(chk_edge), _forb_sets(list(forb_ptr), list(forb_val)),
                          nodes, max_nodes)
    return status, nodes[0], (list(x) if status == 1 else None)


def all_boundaries(factors, strides, neg, N, r, nfree, bnd_ptr, bnd_slot, bnd_sign,
                   upd_ptr, upd_edge, upd_sign, chk_ptr, chk_edge, forb_ptr, forb_val, max_nodes):
    add = _adder(factors, strides, N)
    neg = list(neg)
    bnd_ptr, bnd_slot, bnd_sign = list(bnd_ptr), list(bnd_slot), list(bnd_sign)
    upd_ptr, upd_edge, upd_sign = list(upd_ptr), list(upd_edge), list(upd_sign)
    chk_ptr, chk_edge = list(chk_ptr), list(chk_edge)
    forb = _forb_sets(list(forb_ptr), list(forb_val))
    m = len(bnd_ptr) - 1
    beta = [0] * nfree
    nodes = [0]
    count = 0
    while True:
        count += 1
        cur = [0] * m
        for e in range(m):
            v = 0
            for k in range(bnd_ptr[e], bnd_ptr[e + 1]):
                b = beta[bnd_slot[k]]
                v = add(v, b if bnd_sign[k] > 0 else neg[b])
            cur[e] = v
        res, _ = _flow_dfs(add, neg, N, r, cur, upd_ptr, upd_edge, upd_sign, chk_ptr, chk_edge, forb,
                           nodes, max_nodes)
        if res != 1:
            return res, nodes[0], count, (list(beta) if res == 0 else None)
        i = 0
        while i < nfree:
            beta[i] += 1
            if beta[i] < N:
                break
            beta[i] = 0
            i += 1
        if i == nfree:
            return 1, nodes[0], count, None


def all_forbidden_maps(factors, strides, neg, N, r, m, upd_ptr, upd_edge, upd_sign,
                       chk_ptr, chk_edge, max_nodes):
    add = _adder(factors, strides, N)
    neg = list(neg)
    upd_ptr, upd_edge, upd_sign = list(upd_ptr), list(upd_edge), list(upd_sign)
    chk_ptr, chk_edge = list(chk_ptr), list(chk_edge)
    phi = [0] * m
    nodes = [0]
    count = 0
    while True:
        count += 1
        forb = [(p,) for p in phi]
        res, _ = _flow_dfs(add, neg, N, r, [0] * m, upd_ptr, upd_edge, upd_sign, chk_ptr, chk_edge, forb,
                           nodes, max_nodes)
        if res != 1:
            return res, nodes[0], count, (list(phi) if res == 0 else None)
        i = 0
        while i < m:
            phi[i] += 1
            if phi[i] < N:
                break
            phi[i] = 0
            i += 1
        if i == m:
            return 1, nodes[0], count, None


def _color_dfs(add, neg, N, n, root, con, phi, nodes, max_nodes):
    if n == 0:
        return 1, []
    c = [-1] * n
    p = 0
    while True:
        c[p] += 1
        if c[p] >= N or (root[p] and c[p] > 0):
            p -= 1
            if p < 0:
                return 0, None
            continue
        nodes[0] += 1
        if nodes[0] > max_nodes:
            return -1, None
        cp = c[p]
        bad = False
        for e, q, s in con[p]:
            f = phi[e]
            if cp == add(c[q], f if s > 0 else neg[f]):
                bad = True
                break
        if bad:
            continue
        if p + 1 == n:
            return 1, c
        p += 1
        c[p] = -1


def _constraints(n, con_ptr, con_edge, con_other, con_sign):
    return [
        [(con_edge[k], con_other[k], con_sign[k]) for k in range(con_ptr[p], con_ptr[p + 1])]
        for p in range(n)
    ]


def search_coloring(factors, strides, neg, N, n, root, con_ptr, con_edge, con_other, con_sign, phi, max_nodes):
    add = _adder(factors, strides, N)
    con = _constraints(n, list(con_ptr), list(con_edge), list(con_other), list(con_sign))
    nodes = [0]
    status, c = _color_dfs(add, list(neg), N, n, list(root), con, list(phi), nodes, max_nodes)
    return status, nodes[0], (list(c) if status == 1 else None)


def all_edge_maps(factors, strides, neg, N, n, m, root, con_ptr, con_edge, con_other, con_sign,
                  free_edges, max_nodes):
    add = _adder(factors, strides, N)
    neg = list(neg)
    con = _constraints(n, list(con_ptr), list(con_edge), list(con_other), list(con_sign))
    root = list(root)
    free_edges = list(free_edges)
    phi = [0] * m
    nodes = [0]
    count = 0
    while True:
        count += 1
        res, _ = _color_dfs(add, neg, N, n, root, con, phi, nodes, max_nodes)
        if res != 1:
            return res, nodes[0], count, (list(phi) if res == 0 else None)
        i = 0
        while i < len(free_edges):
            e = free_edges[i]
            phi[e] += 1
            if phi[e] < N:
                break
            phi[e] = 0
            i += 1
        if i == len(free_edges):
            return 1, nodes[0], count, None
