"""Loop-free directed multigraphs with stable edge identities."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Sequence

Vertex = Hashable


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    id: str
    tail: Vertex
    head: Vertex

    def other(self, v: Vertex) -> Vertex:
        if v == self.tail:
            return self.head
        if v == self.head:
            return self.tail
        raise GraphError(f"{v!r} is not an endpoint of edge {self.id}")

    def reversed(self) -> "Edge":
        return Edge(self.id, self.head, self.tail)


@dataclass(frozen=True)
class Multigraph:
    """Vertices and edges keep their input order; all canonical orders derive from it."""

    vertices: tuple
    edges: tuple

    def __post_init__(self):
        vertices = tuple(self.vertices)
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        vset = set(vertices)
        if len(vset) != len(vertices):
            raise GraphError("duplicate vertex ids")
        ids = set()
        for e in edges:
            if e.id in ids:
                raise GraphError(f"duplicate edge id {e.id!r}")
            ids.add(e.id)
            if e.tail not in vset or e.head not in vset:
                raise GraphError(f"edge {e.id!r} has an endpoint outside the vertex set")
            if e.tail == e.head:
                raise GraphError(f"edge {e.id!r} is a loop")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple], vertices: Sequence | None = None, prefix: str = "e"):
        pairs = list(pairs)
        if vertices is None:
            seen: dict = {}
            for u, v in pairs:
                seen.setdefault(u, None)
                seen.setdefault(v, None)
            vertices = list(seen)
        return cls(tuple(vertices), tuple(Edge(f"{prefix}{i}", u, v) for i, (u, v) in enumerate(pairs)))

    # -- lookups -------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def _edge_index(self) -> dict:
        return {e.id: e for e in self.edges}

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_position(self) -> dict:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def _incidence(self) -> dict:
        inc: dict = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.tail].append(e)
            inc[e.head].append(e)
        return inc

    def edge(self, eid: str) -> Edge:
        try:
            return self._edge_index[eid]
        except KeyError:
            raise KeyError(f"unknown edge id {eid!r}") from None

    def has_edge(self, eid: str) -> bool:
        return eid in self._edge_index

    def has_vertex(self, v: Vertex) -> bool:
        return v in self.vertex_index

    def incident(self, v: Vertex) -> list:
        return self._incidence[v]

    def out_edges(self, v: Vertex) -> list:
        return [e for e in self._incidence[v] if e.tail == v]

    def in_edges(self, v: Vertex) -> list:
        return [e for e in self._incidence[v] if e.head == v]

    def degree(self, v: Vertex) -> int:
        return len(self._incidence[v])

    @property
    def edge_ids(self) -> list:
        return [e.id for e in self.edges]

    # -- derived graphs ----------------------------------------------------------

    def without_edges(self, ids: Iterable[str]) -> "Multigraph":
        drop = set(ids)
        return Multigraph(self.vertices, tuple(e for e in self.edges if e.id not in drop))

    def without_vertex(self, v: Vertex) -> "Multigraph":
        return Multigraph(
            tuple(u for u in self.vertices if u != v),
            tuple(e for e in self.edges if v not in (e.tail, e.head)),
        )

    def induced(self, vertices: Iterable[Vertex]) -> "Multigraph":
        keep = set(vertices)
        return Multigraph(
            tuple(u for u in self.vertices if u in keep),
            tuple(e for e in self.edges if e.tail in keep and e.head in keep),
        )

    def with_reversed(self, ids: Iterable[str]) -> "Multigraph":
        flip = set(ids)
        return Multigraph(self.vertices, tuple(e.reversed() if e.id in flip else e for e in self.edges))

    def contract(self, groups: Iterable[Iterable[Vertex]]) -> tuple["Multigraph", dict]:
        """Merge each vertex group into its first member (in vertex order); loops are dropped.

        Returns the contracted graph and the vertex -> representative map.
        """
        rep = {v: v for v in self.vertices}
        for grp in groups:
            grp = sorted(grp, key=self.vertex_index.__getitem__)
            for v in grp:
                rep[v] = grp[0]
        verts = tuple(v for v in self.vertices if rep[v] == v)
        edges = tuple(
            Edge(e.id, rep[e.tail], rep[e.head]) for e in self.edges if rep[e.tail] != rep[e.head]
        )
        return Multigraph(verts, edges), rep

    # -- serialization -----------------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "edges": [{"head": e.head, "id": e.id, "tail": e.tail} for e in self.edges],
            "vertices": list(self.vertices),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Multigraph":
        try:
            vertices = obj["vertices"]
            edges = obj["edges"]
        except (KeyError, TypeError):
            raise GraphError("graph JSON needs 'vertices' and 'edges'") from None
        out = []
        for e in edges:
            try:
                out.append(Edge(str(e["id"]), e["tail"], e["head"]))
            except (KeyError, TypeError):
                raise GraphError(f"malformed edge record {e!r}") from None
        return cls(tuple(vertices), tuple(out))

    @classmethod
    def from_json(cls, text: str) -> "Multigraph":
        return cls.from_json_obj(json.loads(text))


def gen_theta(q: int, length: int) -> Multigraph:
    """Two terminals ``s``, ``t`` joined by ``q`` internally disjoint paths of ``length`` edges.

    Every path is oriented from ``s`` towards ``t``.  Internal vertex ``p{i}_{j}``
    is the ``j``-th vertex of path ``i``; edge ``e{i}_{j}`` is the ``j``-th edge.
    """
    if q < 2:
        raise GraphError(f"theta graph needs q >= 2, got {q}")
    if length < 1:
        raise GraphError(f"theta graph needs path length >= 1, got {length}")
    vertices = ["s", "t"]
    edges = []
    for i in range(q):
        path = ["s"] + [f"p{i}_{j}" for j in range(1, length)] + ["t"]
        vertices.extend(path[1:-1])
        for j in range(length):
            edges.append(Edge(f"e{i}_{j}", path[j], path[j + 1]))
    return Multigraph(tuple(vertices), tuple(edges))


def gen_cycle(n: int) -> Multigraph:
    if n < 2:
        raise GraphError("cycle needs at least 2 vertices")
    return Multigraph.from_pairs([(i, (i + 1) % n) for i in range(n)], vertices=list(range(n)))


def gen_complete(n: int) -> Multigraph:
    return Multigraph.from_pairs(
        [(i, j) for i in range(n) for j in range(i + 1, n)], vertices=list(range(n))
    )


def gen_prism() -> Multigraph:
    """Triangular prism C3 x K2 (cubic, 3-edge-connected)."""
    pairs = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]
    return Multigraph.from_pairs(pairs, vertices=list(range(6)))


def multiply_edges(G: Multigraph, times: int) -> Multigraph:
    """Replace every edge by ``times`` parallel copies (ids ``<id>.<copy>``)."""
    edges = [Edge(f"{e.id}.{c}", e.tail, e.head) for e in G.edges for c in range(times)]
    return Multigraph(G.vertices, tuple(edges))


def subdivide(G: Multigraph, eid: str, pieces: int = 2) -> Multigraph:
    """Split edge ``eid`` into a directed path of ``pieces`` edges (ids ``<id>/<j>``)."""
    e = G.edge(eid)
    mids = [f"{eid}/v{j}" for j in range(1, pieces)]
    path = [e.tail] + mids + [e.head]
    new_edges = []
    for f in G.edges:
        if f.id == eid:
            new_edges.extend(Edge(f"{eid}/{j}", path[j], path[j + 1]) for j in range(pieces))
        else:
            new_edges.append(f)
    return Multigraph(G.vertices + tuple(mids), tuple(new_edges))


def degeneracy(G: Multigraph) -> int:
    """Largest minimum degree over subgraphs; parallel edges count with multiplicity."""
    deg = {v: G.degree(v) for v in G.vertices}
    alive = set(G.vertices)
    best = 0
    while alive:
        v = min(alive, key=lambda u: (deg[u], G.vertex_index[u]))
        best = max(best, deg[v])
        alive.discard(v)
        for e in G.incident(v):
            w = e.other(v)
            if w in alive:
                deg[w] -= 1
    return best
