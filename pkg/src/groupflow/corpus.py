"""Small test corpora and seeded solver instances.

Corpus graphs use vertices ``0..n-1`` and edges ``e0, e1, ...`` oriented from the
smaller to the larger endpoint, listed in lexicographic pair order.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterator

from .abelian import FiniteAbelianGroup, parse_group_spec
from .multigraph import (
    Multigraph,
    RotationSystem,
    edge_connectivity_class,
    euler_genus_zero,
    gen_complete,
    gen_cycle,
    gen_prism,
    gen_theta,
    is_connected,
    multiply_edges,
    subdivide,
    theta_nested_rotation,
)
from .multigraph.embedding import HEAD, TAIL


def _pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def canonical_key(n: int, mult: dict) -> tuple:
    """Isomorphism-invariant key of a loopless multigraph given by pair multiplicities."""
    best = None
    for perm in itertools.permutations(range(n)):
        key = tuple(sorted(tuple(sorted((perm[a], perm[b]))) + (c,) for (a, b), c in mult.items() if c))
        if best is None or key < best:
            best = key
    return best


def _from_mult(n: int, mult: dict) -> Multigraph:
    pairs = [p for p in _pairs(n) for _ in range(mult.get(p, 0))]
    return Multigraph.from_pairs(pairs, vertices=list(range(n)))


def _multigraphs(n: int, max_edges: int, max_mult: int | None = None) -> Iterator[Multigraph]:
    """Pairwise non-isomorphic loopless multigraphs on ``n`` vertices."""
    pairs = _pairs(n)
    cap = max_edges if max_mult is None else min(max_mult, max_edges)
    seen = set()
    for counts in itertools.product(range(cap + 1), repeat=len(pairs)):
        if sum(counts) > max_edges:
            continue
        mult = dict(zip(pairs, counts))
        key = canonical_key(n, mult)
        if key in seen:
            continue
        seen.add(key)
        yield _from_mult(n, mult)


def two_edge_connected_corpus(max_vertices: int = 4, max_edges: int = 6) -> list[Multigraph]:
    """All 2-edge-connected loopless multigraphs with 2..max_vertices vertices, up to isomorphism."""
    out = []
    for n in range(2, max_vertices + 1):
        for G in _multigraphs(n, max_edges):
            if G.m and edge_connectivity_class(G) >= 2:
                out.append(G)
    return out


def coloring_corpus(max_vertices: int = 4, max_multiplicity: int = 2, max_edges: int = 12) -> list[Multigraph]:
    """Connected loopless multigraphs (bridges allowed) with bounded edge multiplicity."""
    out = []
    for n in range(2, max_vertices + 1):
        for G in _multigraphs(n, max_edges, max_multiplicity):
            if G.m and is_connected(G):
                out.append(G)
    return out


def named_coloring_graphs() -> dict:
    """A few larger graphs for the colorability checks."""
    petersen = [(i, (i + 1) % 5) for i in range(5)] + [(i, i + 5) for i in range(5)]
    petersen += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return {
        "C5": gen_cycle(5),
        "C5x2": multiply_edges(gen_cycle(5), 2),
        "K5": gen_complete(5),
        "K5x2": multiply_edges(gen_complete(5), 2),
        "prism": gen_prism(),
        "K33": named_core("K33"),
        "W5": Multigraph.from_pairs([(i, (i + 1) % 5) for i in range(5)] + [(5, i) for i in range(5)],
                                    vertices=list(range(6))),
        "petersen": Multigraph.from_pairs(petersen, vertices=list(range(10))),
    }


def extended_coloring_corpus() -> list[Multigraph]:
    """The small colorability corpus plus planar duals of the 2-edge-connected corpus and named graphs."""
    from .multigraph import planar_dual

    out = coloring_corpus()
    out.extend(planar_dual(inst.graph, inst.rotation) for inst in planar_corpus())
    out.extend(named_coloring_graphs().values())
    return out


# -- planar embeddings ---------------------------------------------------------

# straight-line drawing of K4: a triangle with its fourth vertex inside
_K4_POINTS = ((0.0, 0.0), (4.0, 0.0), (2.0, 3.5), (2.0, 1.2))


def straight_line_rotation(G: Multigraph, points) -> RotationSystem:
    """Rotation of a drawing where each edge bundle is a straight segment fanned into
    nested curves: copies go out in one order and come back in the reverse order."""
    rot = {}
    for v in G.vertices:
        x0, y0 = points[v]
        bundles: dict = {}
        for e in G.incident(v):
            bundles.setdefault(e.other(v), []).append(e)
        halves = []
        for w in sorted(bundles, key=lambda w: math.atan2(points[w][1] - y0, points[w][0] - x0)):
            copies = sorted(bundles[w], key=lambda e: G.edge_position[e.id])
            if G.vertex_index[v] > G.vertex_index[w]:
                copies.reverse()
            halves.extend((e.id, TAIL if e.tail == v else HEAD) for e in copies)
        rot[v] = tuple(halves)
    return RotationSystem(rot)


def planar_rotation(G: Multigraph) -> RotationSystem:
    """A planar rotation for a corpus graph (at most four vertices)."""
    if G.n > len(_K4_POINTS):
        raise ValueError("fixed drawing covers at most four vertices")
    points = {v: _K4_POINTS[i] for i, v in enumerate(G.vertices)}
    rot = straight_line_rotation(G, points)
    assert euler_genus_zero(G, rot)
    return rot


@dataclass(frozen=True)
class PlanarInstance:
    name: str
    graph: Multigraph
    rotation: RotationSystem


def planar_corpus() -> list[PlanarInstance]:
    out = [PlanarInstance(f"corpus-{i}", G, planar_rotation(G)) for i, G in enumerate(two_edge_connected_corpus())]
    for q, length in ((3, 1), (3, 2), (5, 1), (4, 2)):
        G = gen_theta(q, length)
        out.append(PlanarInstance(f"theta-{q}-{length}", G, theta_nested_rotation(G, q, length)))
    return out


# -- solver instances ------------------------------------------------------------

CORE_NAMES = ("K4", "prism", "K33", "theta3x3", "K4+double", "W4", "cube")


def named_core(name: str) -> Multigraph:
    if name == "K4":
        return gen_complete(4)
    if name == "prism":
        return gen_prism()
    if name == "K33":
        return Multigraph.from_pairs([(a, b) for a in range(3) for b in range(3, 6)], vertices=list(range(6)))
    if name == "theta3x3":
        return multiply_edges(gen_theta(3, 1), 3)
    if name == "K4+double":
        G = gen_complete(4)
        return Multigraph.from_pairs([(e.tail, e.head) for e in G.edges] + [(0, 1), (2, 3)], vertices=list(range(4)))
    if name == "W4":
        return Multigraph.from_pairs([(0, 1), (1, 2), (2, 3), (3, 0)] + [(4, i) for i in range(4)], vertices=list(range(5)))
    if name == "cube":
        pairs = [(a, b) for a in range(8) for b in range(a + 1, 8) if bin(a ^ b).count("1") == 1]
        return Multigraph.from_pairs(pairs, vertices=list(range(8)))
    raise KeyError(name)


def random_3ec_core(rng: random.Random, max_edges: int = 12) -> Multigraph:
    """Rejection-sampled 3-edge-connected multigraph with at most ``max_edges`` edges."""
    while True:
        n = rng.randint(2, 8)
        m = rng.randint(max(3, (3 * n + 1) // 2), max_edges)
        if m > max_edges:
            continue
        pairs = [tuple(rng.sample(range(n), 2)) for _ in range(m)]
        G = Multigraph.from_pairs(pairs, vertices=list(range(n)))
        if edge_connectivity_class(G) >= 3:
            return G


@dataclass(frozen=True)
class SolverInstance:
    graph: Multigraph
    forbidden: dict  # edge id -> list of elements
    group: FiniteAbelianGroup
    k: int
    kind: str  # "3ec" | "2ec"
    core: str


# group choices just above the guarantee threshold 8 (k q)^3
_GROUPS = {
    1: ("Z9", "Z3^2", "Z10", "Z11", "Z2xZ6", "Z13"),
    8: ("Z65", "Z67", "Z2xZ6^2", "Z71", "Z3xZ27"),
    64: ("Z521", "Z523", "Z2xZ262", "Z9xZ59"),
}


def _group_above(bound: int, rng: random.Random) -> FiniteAbelianGroup:
    for threshold in sorted(_GROUPS):
        if 8 * threshold == bound:
            return parse_group_spec(rng.choice(_GROUPS[threshold]))
    return FiniteAbelianGroup.cyclic(bound + 1)


def solver_instances(count: int, seed: int = 0) -> Iterator[SolverInstance]:
    """Seeded mix of 3-edge-connected instances and subdivided (2-edge-connected) ones."""
    rng = random.Random(seed)
    for _ in range(count):
        if rng.random() < 0.3:
            name = rng.choice(CORE_NAMES)
            core = named_core(name)
            if core.m > 12:
                core, name = random_3ec_core(rng), "random"
        else:
            core, name = random_3ec_core(rng), "random"
        k = rng.choice((1, 2))
        G, kind, q = core, "3ec", 1
        if rng.random() < 0.35:
            G, kind, q = subdivide(core, rng.choice(core.edge_ids)), "2ec", 2
        group = _group_above(8 * (k * q) ** 3, rng)
        elements = list(group.elements())
        forbidden = {eid: rng.sample(elements, rng.randint(0, k)) for eid in G.edge_ids}
        yield SolverInstance(G, forbidden, group, k, kind, name)
