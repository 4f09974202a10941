"""Rotation systems, face tracing and planar duals."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .core import Edge, GraphError, Multigraph

TAIL, HEAD = "tail", "head"


class EmbeddingError(GraphError):
    pass


@dataclass(frozen=True)
class RotationSystem:
    """Cyclic order of half-edges ``(edge id, "tail"|"head")`` around each vertex."""

    rotation: dict

    def validate(self, G: Multigraph) -> None:
        seen = set()
        for v, halves in self.rotation.items():
            if not G.has_vertex(v):
                raise EmbeddingError(f"rotation mentions unknown vertex {v!r}")
            for eid, end in halves:
                e = G.edge(eid)
                if end not in (TAIL, HEAD):
                    raise EmbeddingError(f"bad end marker {end!r}")
                if (e.tail if end == TAIL else e.head) != v:
                    raise EmbeddingError(f"half-edge ({eid}, {end}) is not at vertex {v!r}")
                if (eid, end) in seen:
                    raise EmbeddingError(f"half-edge ({eid}, {end}) listed twice")
                seen.add((eid, end))
        if len(seen) != 2 * G.m:
            raise EmbeddingError("rotation does not list every half-edge exactly once")

    def to_json_obj(self) -> dict:
        return {str(v): [[eid, end] for eid, end in halves] for v, halves in self.rotation.items()}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: dict, G: Multigraph | None = None) -> "RotationSystem":
        # JSON object keys are strings; map them back onto the graph's vertex ids
        lookup = {str(v): v for v in G.vertices} if G is not None else {}
        rot = {}
        for key, halves in obj.items():
            v = lookup.get(key, key)
            rot[v] = tuple((str(h[0]), str(h[1])) for h in halves)
        return cls(rot)


def rotation_from_neighbor_orders(G: Multigraph, orders: dict) -> RotationSystem:
    """Build a rotation of a graph without parallel edges from cyclic neighbour lists."""
    rot = {}
    for v, nbrs in orders.items():
        halves = []
        for w in nbrs:
            matches = [e for e in G.incident(v) if e.other(v) == w]
            if len(matches) != 1:
                raise EmbeddingError(f"need exactly one edge between {v!r} and {w!r}")
            e = matches[0]
            halves.append((e.id, TAIL if e.tail == v else HEAD))
        rot[v] = tuple(halves)
    return RotationSystem(rot)


def trace_faces(G: Multigraph, rot: RotationSystem) -> list[tuple]:
    """Faces as cyclic sequences of half-edges; the successor of ``h`` is the rotation
    successor of the opposite half-edge of ``h``."""
    rot.validate(G)
    succ = {}
    for halves in rot.rotation.values():
        for i, h in enumerate(halves):
            succ[h] = halves[(i + 1) % len(halves)]
    faces = []
    seen = set()
    for e in G.edges:
        for start in ((e.id, TAIL), (e.id, HEAD)):
            if start in seen:
                continue
            face = []
            h = start
            while h not in seen:
                seen.add(h)
                face.append(h)
                eid, end = h
                h = succ[(eid, HEAD if end == TAIL else TAIL)]
            faces.append(tuple(face))
    return faces


def euler_genus_zero(G: Multigraph, rot: RotationSystem) -> bool:
    faces = trace_faces(G, rot)
    nf = len(faces) if G.m else 1
    return G.n - G.m + nf == 2


def planar_dual_with_rotation(G: Multigraph, rot: RotationSystem) -> tuple[Multigraph, RotationSystem]:
    """Dual graph and its induced rotation.

    Face ``f<i>`` is the i-th traced face.  Dual edge ``e*`` keeps the id of
    ``e`` and runs from the face through the tail half-edge of ``e`` to the face
    through its head half-edge.
    """
    faces = trace_faces(G, rot)
    nf = len(faces) if G.m else 1
    if G.n - G.m + nf != 2:
        raise EmbeddingError(f"rotation is not planar: V - E + F = {G.n - G.m + nf}")
    face_of = {}
    names = [f"f{i}" for i in range(len(faces))]
    for name, face in zip(names, faces):
        for h in face:
            face_of[h] = name
    edges = tuple(Edge(e.id, face_of[(e.id, TAIL)], face_of[(e.id, HEAD)]) for e in G.edges)
    if any(e.tail == e.head for e in edges):
        raise EmbeddingError("dual has a loop: the primal graph has a bridge")
    dual = Multigraph(tuple(names), edges)
    dual_rot = RotationSystem({name: face for name, face in zip(names, faces)})
    return dual, dual_rot


def planar_dual(G: Multigraph, rot: RotationSystem) -> Multigraph:
    return planar_dual_with_rotation(G, rot)[0]


def theta_nested_rotation(G: Multigraph, q: int, length: int) -> RotationSystem:
    """Concentric drawing of ``gen_theta(q, length)``: paths in order around ``s``, reversed around ``t``."""
    rot = {
        "s": tuple((f"e{i}_0", TAIL) for i in range(q)),
        "t": tuple((f"e{i}_{length - 1}", HEAD) for i in reversed(range(q))),
    }
    for i in range(q):
        for j in range(1, length):
            rot[f"p{i}_{j}"] = ((f"e{i}_{j - 1}", HEAD), (f"e{i}_{j}", TAIL))
    out = RotationSystem(rot)
    out.validate(G)
    return out


def cycle_rotation(G: Multigraph) -> RotationSystem:
    """Rotation for any graph whose vertices all have degree 2 (or 1)."""
    rot = {}
    for v in G.vertices:
        rot[v] = tuple((e.id, TAIL if e.tail == v else HEAD) for e in G.incident(v))
    return RotationSystem(rot)


def find_planar_rotation(G: Multigraph, *, budget: int = 200_000) -> RotationSystem | None:
    """Search cyclic orders vertex by vertex for a planar rotation; None if none within budget."""
    import itertools

    per_vertex = []
    for v in G.vertices:
        halves = [(e.id, TAIL if e.tail == v else HEAD) for e in G.incident(v)]
        if len(halves) <= 2:
            per_vertex.append([tuple(halves)])
        else:
            per_vertex.append([(halves[0],) + rest for rest in itertools.permutations(halves[1:])])
    for count, choice in enumerate(itertools.product(*per_vertex)):
        if count >= budget:
            return None
        rot = RotationSystem(dict(zip(G.vertices, choice)))
        if euler_genus_zero(G, rot):
            return rot
    return None
