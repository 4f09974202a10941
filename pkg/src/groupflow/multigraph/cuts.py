"""Small edge cuts: connectivity classes, bridges, cycle-equivalence, cubic expansion."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .core import Edge, GraphError, Multigraph, Vertex


def components(G: Multigraph, removed: Iterable[str] = ()) -> list[list]:
    removed = set(removed)
    seen: set = set()
    out = []
    for s in G.vertices:
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for e in G.incident(u):
                if e.id in removed:
                    continue
                w = e.other(u)
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        out.append(comp)
    return out


def is_connected(G: Multigraph, removed: Iterable[str] = ()) -> bool:
    return G.n <= 1 or len(components(G, removed)) == 1


def bridges(G: Multigraph, removed: Iterable[str] = ()) -> set:
    """Edge ids whose deletion increases the number of components (parallel edges aware)."""
    removed = set(removed)
    disc: dict = {}
    low: dict = {}
    out: set = set()
    counter = 0
    for root in G.vertices:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        stack = [(root, None, iter(G.incident(root)))]
        while stack:
            u, via, it = stack[-1]
            advanced = False
            for e in it:
                if e.id in removed or e.id == via:
                    continue
                w = e.other(u)
                if w in disc:
                    low[u] = min(low[u], disc[w])
                else:
                    disc[w] = low[w] = counter
                    counter += 1
                    stack.append((w, e.id, iter(G.incident(w))))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            if stack:
                parent = stack[-1][0]
                low[parent] = min(low[parent], low[u])
                if low[u] > disc[parent]:
                    out.add(via)
    return out


def edge_connectivity_class(G: Multigraph) -> int:
    """0 = disconnected, 1 = has a bridge, 2 = exactly 2-edge-connected, 3 = 3-edge-connected or more.

    A single vertex counts as 3 (no edge cut of any size exists).
    """
    if not is_connected(G):
        return 0
    if G.n == 1:
        return 3
    if bridges(G):
        return 1
    for e in G.edges:
        if bridges(G, removed=(e.id,)):
            return 2
    return 3


def two_edge_cuts(G: Multigraph) -> list[tuple[str, str]]:
    """All 2-edge-cuts of a 2-edge-connected graph, as pairs in edge order."""
    pos = G.edge_position
    cuts = set()
    for e in G.edges:
        for f in bridges(G, removed=(e.id,)):
            cuts.add(tuple(sorted((e.id, f), key=pos.__getitem__)))
    return sorted(cuts, key=lambda c: (pos[c[0]], pos[c[1]]))


@dataclass(frozen=True)
class CyclePartition:
    classes: tuple  # tuple of tuples of edge ids, each in edge order, classes ordered by first edge
    cyclicity: int

    def class_of(self, eid: str) -> tuple:
        for c in self.classes:
            if eid in c:
                return c
        raise KeyError(eid)


def cycle_equivalence(G: Multigraph) -> CyclePartition:
    """Cycle-equivalence classes via the 2-edge-cut characterisation."""
    cls = edge_connectivity_class(G)
    if cls == 0:
        raise GraphError("cycle equivalence needs a connected graph")
    if cls == 1:
        raise GraphError("cycle equivalence needs a bridgeless graph")
    parent = {e.id: e.id for e in G.edges}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in two_edge_cuts(G):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    groups: dict = {}
    for e in G.edges:
        groups.setdefault(find(e.id), []).append(e.id)
    classes = tuple(tuple(g) for g in groups.values())
    classes = tuple(sorted(classes, key=lambda c: G.edge_position[c[0]]))
    return CyclePartition(classes, max((len(c) for c in classes), default=0))


def cyclicity(G: Multigraph) -> int:
    return cycle_equivalence(G).cyclicity


def strongly_connected_orientation(G: Multigraph) -> dict:
    """Robbins orientation of a 2-edge-connected graph as edge id -> +1 (keep) / -1 (reverse).

    DFS tree edges point away from the root, every other edge points back up.
    """
    if edge_connectivity_class(G) < 2:
        raise GraphError("a strongly connected orientation needs a 2-edge-connected graph")
    sign: dict = {}
    if not G.vertices:
        return sign
    depth = {G.vertices[0]: 0}
    stack = [(G.vertices[0], iter(G.incident(G.vertices[0])))]
    while stack:
        u, it = stack[-1]
        for e in it:
            if e.id in sign:
                continue
            w = e.other(u)
            if w not in depth:
                sign[e.id] = 1 if e.tail == u else -1
                depth[w] = depth[u] + 1
                stack.append((w, iter(G.incident(w))))
                break
            # non-tree edge: from the deeper endpoint up to its ancestor
            lower = u if depth[u] >= depth[w] else w
            sign[e.id] = 1 if e.tail == lower else -1
        else:
            stack.pop()
    return sign


def orient(G: Multigraph, sign: dict) -> Multigraph:
    return G.with_reversed([eid for eid, s in sign.items() if s < 0])


def is_strongly_connected(G: Multigraph) -> bool:
    if G.n <= 1:
        return True

    def reach(start, forward: bool):
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for e in G.incident(u):
                if forward and e.tail == u and e.head not in seen:
                    seen.add(e.head)
                    stack.append(e.head)
                elif not forward and e.head == u and e.tail not in seen:
                    seen.add(e.tail)
                    stack.append(e.tail)
        return seen

    s = G.vertices[0]
    return len(reach(s, True)) == G.n and len(reach(s, False)) == G.n


# -- cubic expansion ------------------------------------------------------------


class ExpansionError(GraphError):
    pass


@dataclass(frozen=True)
class CubicExpansion:
    graph: Multigraph
    auxiliary: frozenset  # ids of the new cycle edges
    vertex_map: dict  # original vertex -> tuple of replacement vertices


def _fresh(prefix: str, taken: set) -> str:
    name, i = prefix, 0
    while name in taken:
        i += 1
        name = f"{prefix}~{i}"
    taken.add(name)
    return name


def _candidate_orders(G: Multigraph, v: Vertex, cap: int):
    """Cyclic orders of the edges at ``v``: component-interleaved first, then permutations."""
    inc = list(G.incident(v))
    rest = G.without_vertex(v)
    comp_of = {}
    for i, comp in enumerate(components(rest)):
        for u in comp:
            comp_of[u] = i
    buckets: dict = {}
    for e in inc:
        buckets.setdefault(comp_of[e.other(v)], []).append(e)
    groups = sorted(buckets.values(), key=len, reverse=True)
    interleaved = [g[i] for i in range(max(len(g) for g in groups)) for g in groups if i < len(g)]
    yield interleaved
    yield inc
    for count, perm in enumerate(itertools.permutations(inc[1:])):
        if count >= cap:
            return
        yield [inc[0], *perm]


def _expand_vertex(G: Multigraph, v: Vertex, order: list, taken_v: set, taken_e: set):
    d = len(order)
    new_vs = [_fresh(f"{v}#{i}", taken_v) for i in range(d)]
    slot = {e.id: new_vs[i] for i, e in enumerate(order)}
    edges = []
    for e in G.edges:
        if e.id in slot:
            tail = slot[e.id] if e.tail == v else e.tail
            head = slot[e.id] if e.head == v else e.head
            edges.append(Edge(e.id, tail, head))
        else:
            edges.append(e)
    aux = []
    for i in range(d):
        aux_id = _fresh(f"{v}#c{i}", taken_e)
        aux.append(aux_id)
        edges.append(Edge(aux_id, new_vs[i], new_vs[(i + 1) % d]))
    vertices = []
    for u in G.vertices:
        vertices.extend(new_vs if u == v else [u])
    return Multigraph(tuple(vertices), tuple(edges)), tuple(new_vs), aux


def cubic_expansion(G: Multigraph, *, order_cap: int = 5040) -> CubicExpansion:
    """Replace every vertex of degree d > 3 by a d-cycle so the result is cubic and 3-edge-connected.

    Original edge ids are kept; the result is re-checked for 3-edge-connectivity
    after each vertex and the next candidate cyclic order is tried on failure.
    """
    if edge_connectivity_class(G) < 3:
        raise ExpansionError("cubic expansion needs a 3-edge-connected graph")
    if G.n > 1 and min(G.degree(v) for v in G.vertices) < 3:
        raise ExpansionError("cubic expansion needs minimum degree 3")
    taken_v = {str(v) for v in G.vertices}
    taken_e = set(G.edge_ids)
    vertex_map = {v: (v,) for v in G.vertices}
    auxiliary: list = []
    H = G
    for v in G.vertices:
        if G.degree(v) <= 3:
            continue
        for order in _candidate_orders(H, v, order_cap):
            cand, new_vs, aux = _expand_vertex(H, v, order, set(taken_v), set(taken_e))
            if edge_connectivity_class(cand) >= 3:
                H = cand
                taken_v.update(str(x) for x in new_vs)
                taken_e.update(aux)
                vertex_map[v] = new_vs
                auxiliary.extend(aux)
                break
        else:
            raise ExpansionError(f"no cyclic order at {v!r} keeps the graph 3-edge-connected")
    assert all(H.degree(u) == 3 for u in H.vertices) or H.n == 1
    return CubicExpansion(H, frozenset(auxiliary), vertex_map)
