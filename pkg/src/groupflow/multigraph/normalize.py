"""Reduction of a 2-edge-connected graph to a 3-edge-connected one, class by class.

Every cycle-equivalence class of ``G`` becomes one edge of ``G''``.  Under a
strongly connected orientation all edges of a class carry the same flow value,
so contracting every class member except a representative keeps the cycle
structure (edge sets of cycles correspond class-wise) and the flows.  A class
that is itself a cycle would become a loop; such classes are split off and
handled on their own.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .core import Edge, GraphError, Multigraph
from .cuts import CyclePartition, cycle_equivalence, edge_connectivity_class, strongly_connected_orientation


@dataclass(frozen=True)
class Normalized:
    graph: Multigraph  # G'': one edge per non-cycle class, id = representative's id
    class_paths: dict  # G'' edge id -> tuple of (original edge id, sign), along the class
    cycle_classes: tuple  # classes forming a whole cycle: tuples of (original edge id, sign)
    orientation: dict  # original edge id -> +1/-1, the strongly connected orientation used
    partition: CyclePartition

    def transport_to_original(self, G: Multigraph, values: dict, cycle_values, group) -> dict:
        """Lift G'' edge values (and one value per cycle class) to every original edge."""
        out = {}
        for rep, path in self.class_paths.items():
            for eid, s in path:
                out[eid] = values[rep] if s > 0 else group.neg(values[rep])
        for path, val in zip(self.cycle_classes, cycle_values):
            for eid, s in path:
                out[eid] = val if s > 0 else group.neg(val)
        return {e.id: out[e.id] for e in G.edges}


def _class_order(D: Multigraph, cls: tuple) -> tuple:
    """Order a class along a cycle through its first edge (edges taken in the D direction)."""
    first = D.edge(cls[0])
    members = set(cls)
    # directed walk back from head to tail avoiding the first edge: in a strong
    # orientation every cycle through the class meets its members consistently
    prev = {first.head: None}
    q = deque([first.head])
    while q and first.tail not in prev:
        u = q.popleft()
        for e in D.out_edges(u):
            if e.id == first.id or e.head in prev:
                continue
            prev[e.head] = e
            q.append(e.head)
    path = []
    v = first.tail
    while prev.get(v) is not None:
        e = prev[v]
        path.append(e.id)
        v = e.tail
    walk = [first.id] + list(reversed(path))
    ordered = [eid for eid in walk if eid in members]
    if set(ordered) != members:
        ordered = list(cls)
    return tuple(ordered)


def normalize_to_subdivision(G: Multigraph) -> Normalized:
    if edge_connectivity_class(G) < 2:
        raise GraphError("normalization needs a 2-edge-connected graph")
    sign = strongly_connected_orientation(G)
    D = G.with_reversed([eid for eid, s in sign.items() if s < 0])
    partition = cycle_equivalence(G)

    parent = {v: v for v in G.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for cls in partition.classes:
        for eid in cls[1:]:
            e = G.edge(eid)
            a, b = find(e.tail), find(e.head)
            if a != b:
                if G.vertex_index[b] < G.vertex_index[a]:
                    a, b = b, a
                parent[b] = a

    vertices = tuple(v for v in G.vertices if find(v) == v)
    edges = []
    class_paths: dict = {}
    cycle_classes = []
    for cls in partition.classes:
        rep = G.edge(cls[0])
        ordered = _class_order(D, cls)
        path = tuple((eid, sign[eid] * sign[rep.id]) for eid in ordered)
        tail, head = find(rep.tail), find(rep.head)
        if tail == head:
            cycle_classes.append(path)
            continue
        edges.append(Edge(rep.id, tail, head))
        class_paths[rep.id] = path
    Gpp = Multigraph(vertices, tuple(edges))
    return Normalized(Gpp, class_paths, tuple(cycle_classes), dict(sign), partition)
