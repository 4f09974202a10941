"""Backend selection and flat search plans for the exhaustive kernels.

The compiled ``_kernels`` extension is used when importable; otherwise (or with
``GROUPFLOW_PURE_PYTHON=1``) the pure-Python ``_pykernels`` twin is used.  Both
take the same flat integer arrays and return the same tuples.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _pykernels
from .abelian import FiniteAbelianGroup
from .multigraph import Multigraph

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

DEFAULT_MAX_NODES = 10**9

FOUND, NONE, BUDGET = 1, 0, -1


def available_backends() -> dict:
    out = {"python": _pykernels}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out


def _select():
    if os.environ.get("GROUPFLOW_PURE_PYTHON", "") not in ("", "0") or _compiled is None:
        return "python"
    return "compiled"


BACKEND = _select()


class Kernels:
    """Thin adapter: converts plan lists to the array type a backend expects."""

    def __init__(self, name: str):
        self.name = name
        self.module = available_backends()[name]
        self._arr = (lambda xs: np.ascontiguousarray(xs, dtype=np.int64)) if name == "compiled" else list

    def _group(self, G: FiniteAbelianGroup):
        a = self._arr
        return a(G.invariant_factors), a(G._strides), a(G.neg_codes), G.order

    def search_flow(self, G, plan: "FlowPlan", base, forb_ptr, forb_val, max_nodes):
        a = self._arr
        return self.module.search_flow(*self._group(G), plan.r, a(base), a(plan.upd_ptr), a(plan.upd_edge),
                                       a(plan.upd_sign), a(plan.chk_ptr), a(plan.chk_edge), a(forb_ptr),
                                       a(forb_val), max_nodes)

    def all_boundaries(self, G, plan: "FlowPlan", forb_ptr, forb_val, max_nodes):
        a = self._arr
        return self.module.all_boundaries(*self._group(G), plan.r, plan.nfree, a(plan.bnd_ptr), a(plan.bnd_slot),
                                          a(plan.bnd_sign), a(plan.upd_ptr), a(plan.upd_edge), a(plan.upd_sign),
                                          a(plan.chk_ptr), a(plan.chk_edge), a(forb_ptr), a(forb_val), max_nodes)

    def all_forbidden_maps(self, G, plan: "FlowPlan", max_nodes):
        a = self._arr
        return self.module.all_forbidden_maps(*self._group(G), plan.r, plan.m, a(plan.upd_ptr), a(plan.upd_edge),
                                              a(plan.upd_sign), a(plan.chk_ptr), a(plan.chk_edge), max_nodes)

    def search_coloring(self, G, plan: "ColorPlan", phi, max_nodes):
        a = self._arr
        return self.module.search_coloring(*self._group(G), plan.n, a(plan.root), a(plan.con_ptr),
                                           a(plan.con_edge), a(plan.con_other), a(plan.con_sign), a(phi),
                                           max_nodes)

    def all_edge_maps(self, G, plan: "ColorPlan", free_edges, max_nodes):
        a = self._arr
        return self.module.all_edge_maps(*self._group(G), plan.n, plan.m, a(plan.root), a(plan.con_ptr),
                                         a(plan.con_edge), a(plan.con_other), a(plan.con_sign), a(free_edges),
                                         max_nodes)


def get_kernels(name: str | None = None) -> Kernels:
    return Kernels(name or BACKEND)


# -- plans ------------------------------------------------------------------


def spanning_forest(G: Multigraph) -> tuple[list[str], dict, list]:
    """BFS forest in vertex order: (tree edge ids, parent edge per vertex, roots)."""
    parent_edge: dict = {}
    tree: list[str] = []
    roots: list = []
    seen: set = set()
    for r in G.vertices:
        if r in seen:
            continue
        roots.append(r)
        seen.add(r)
        parent_edge[r] = None
        q = deque([r])
        while q:
            u = q.popleft()
            for e in G.incident(u):
                w = e.other(u)
                if w not in seen:
                    seen.add(w)
                    parent_edge[w] = e
                    tree.append(e.id)
                    q.append(w)
    return tree, parent_edge, roots


def _csr(rows: list[list]) -> tuple[list[int], list]:
    ptr = [0]
    flat: list = []
    for row in rows:
        flat.extend(row)
        ptr.append(len(flat))
    return ptr, flat


@dataclass(frozen=True)
class FlowPlan:
    """Edge values as ``base + sum sign * x_j`` over the non-tree variables ``x_j``.

    ``variables`` lists the non-tree edge ids in search order.  Edge ``e`` is
    checked at level ``1 + (last variable it depends on)``, or level 0 if it
    depends on none.  ``bnd_*`` express the tree flow of a boundary in terms of
    the boundary values of all non-root vertices (``boundary_vertices``).
    """

    m: int
    r: int
    variables: tuple
    upd_ptr: list
    upd_edge: list
    upd_sign: list
    chk_ptr: list
    chk_edge: list
    nfree: int
    boundary_vertices: tuple
    bnd_ptr: list
    bnd_slot: list
    bnd_sign: list


def _fundamental_cycles(G: Multigraph, parent_edge: dict, nontree: list[str]) -> dict:
    """For non-tree edge e (tail u, head w): tree edges on the w->u tree path with their
    sign relative to that direction, plus e itself with sign +1."""
    depth: dict = {}

    def d(v):
        if v not in depth:
            pe = parent_edge[v]
            depth[v] = 0 if pe is None else d(pe.other(v)) + 1
        return depth[v]

    out = {}
    for eid in nontree:
        e = G.edge(eid)
        terms = [(eid, 1)]
        a, b = e.head, e.tail  # walk a up (direction a -> parent), b up (reverse)
        up_a, up_b = [], []
        while a != b:
            if d(a) >= d(b):
                pe = parent_edge[a]
                up_a.append((pe.id, 1 if pe.tail == a else -1))
                a = pe.other(a)
            else:
                pe = parent_edge[b]
                up_b.append((pe.id, -1 if pe.tail == b else 1))
                b = pe.other(b)
        out[eid] = terms + up_a + up_b
    return out


def flow_plan(G: Multigraph) -> FlowPlan:
    if not G.m:
        return FlowPlan(0, 0, (), [0], [], [], [0, 0], [], 0, (), [0], [], [])
    tree, parent_edge, roots = spanning_forest(G)
    tree_set = set(tree)
    nontree = [e.id for e in G.edges if e.id not in tree_set]
    cyc = _fundamental_cycles(G, parent_edge, nontree)
    pos = G.edge_position

    # greedy order: next variable completes the most still-unchecked edges
    deps: dict = {e.id: set() for e in G.edges}
    for v, terms in cyc.items():
        for eid, _ in terms:
            deps[eid].add(v)
    remaining = set(nontree)
    order: list[str] = []
    assigned: set = set()
    while remaining:
        def score(v):
            done = sum(1 for eid, ds in deps.items() if v in ds and ds <= assigned | {v})
            return (-done, -len(cyc[v]), pos[v])

        v = min(remaining, key=score)
        order.append(v)
        assigned.add(v)
        remaining.remove(v)
    level_of_var = {v: j for j, v in enumerate(order)}

    upd_rows: list[list] = [[] for _ in order]
    for v in order:
        for eid, s in cyc[v]:
            upd_rows[level_of_var[v]].append((pos[eid], s))
    chk_rows: list[list] = [[] for _ in range(len(order) + 1)]
    for e in G.edges:
        lvl = 0 if not deps[e.id] else 1 + max(level_of_var[v] for v in deps[e.id])
        chk_rows[lvl].append(pos[e.id])
    upd_ptr, upd_flat = _csr(upd_rows)

    # boundary: tree edge (child c, parent p) carries +-beta(subtree of c)
    root_set = set(roots)
    free_vertices = tuple(v for v in G.vertices if v not in root_set)
    slot = {v: i for i, v in enumerate(free_vertices)}
    bnd_rows: list[list] = [[] for _ in range(G.m)]
    for v in free_vertices:
        u = v
        while parent_edge[u] is not None:
            pe = parent_edge[u]
            bnd_rows[pos[pe.id]].append((slot[v], 1 if pe.tail == u else -1))
            u = pe.other(u)
    bnd_ptr, bnd_flat = _csr(bnd_rows)
    chk_ptr, chk_flat = _csr(chk_rows)
    return FlowPlan(
        m=G.m,
        r=len(order),
        variables=tuple(order),
        upd_ptr=upd_ptr,
        upd_edge=[e for e, _ in upd_flat],
        upd_sign=[s for _, s in upd_flat],
        chk_ptr=chk_ptr,
        chk_edge=chk_flat,
        nfree=len(free_vertices),
        boundary_vertices=free_vertices,
        bnd_ptr=bnd_ptr,
        bnd_slot=[s for s, _ in bnd_flat],
        bnd_sign=[g for _, g in bnd_flat],
    )


def forbidden_csr(G: Multigraph, group: FiniteAbelianGroup, forbidden: dict) -> tuple[list, list]:
    rows = []
    for e in G.edges:
        rows.append(sorted({group.encode(x) for x in forbidden.get(e.id, ())}))
    return _csr(rows)


@dataclass(frozen=True)
class ColorPlan:
    """Vertices in BFS order; position ``p`` is constrained by edges to earlier positions.

    Constraint ``(edge, other, sign)`` bans ``c[p] = c[other] + sign * phi[edge]``.
    Roots (first vertex of each component) are pinned to 0.
    """

    n: int
    m: int
    order: tuple
    root: list
    con_ptr: list
    con_edge: list
    con_other: list
    con_sign: list
    forest_edges: tuple  # edge positions of a spanning forest
    free_edges: tuple  # edge positions outside that forest


def color_plan(G: Multigraph) -> ColorPlan:
    tree, parent_edge, roots = spanning_forest(G)
    order: list = []
    seen: set = set()
    for r in roots:
        q = deque([r])
        seen.add(r)
        while q:
            u = q.popleft()
            order.append(u)
            for e in G.incident(u):
                w = e.other(u)
                if w not in seen:
                    seen.add(w)
                    q.append(w)
    at = {v: i for i, v in enumerate(order)}
    rows: list[list] = [[] for _ in order]
    pos = G.edge_position
    for e in G.edges:
        t, h = at[e.tail], at[e.head]
        if h > t:
            rows[h].append((pos[e.id], t, 1))  # c(h) != c(t) + phi
        else:
            rows[t].append((pos[e.id], h, -1))  # c(t) != c(h) - phi
    ptr, flat = _csr(rows)
    root_set = set(roots)
    tree_pos = sorted(pos[eid] for eid in tree)
    tree_set = set(tree_pos)
    return ColorPlan(
        n=G.n,
        m=G.m,
        order=tuple(order),
        root=[1 if v in root_set else 0 for v in order],
        con_ptr=ptr,
        con_edge=[x[0] for x in flat],
        con_other=[x[1] for x in flat],
        con_sign=[x[2] for x in flat],
        forest_edges=tuple(tree_pos),
        free_edges=tuple(p for p in range(G.m) if p not in tree_set),
    )
