import itertools
import random

import pytest

from groupflow.multigraph import (
    EmbeddingError,
    ExpansionError,
    GraphError,
    Multigraph,
    RotationSystem,
    SpecialTreeError,
    bridges,
    components,
    cubic_expansion,
    cycle_equivalence,
    cycle_rotation,
    cyclicity,
    degeneracy,
    edge_connectivity_class,
    euler_genus_zero,
    find_planar_rotation,
    gen_complete,
    gen_cycle,
    gen_prism,
    gen_theta,
    is_2_constructible,
    is_connected,
    is_strongly_connected,
    multiply_edges,
    normalize_to_subdivision,
    planar_dual,
    planar_dual_with_rotation,
    replay_build_order,
    special_spanning_tree,
    strongly_connected_orientation,
    subdivide,
    theta_nested_rotation,
    trace_faces,
    two_edge_cuts,
)
from groupflow.corpus import named_core, random_3ec_core, two_edge_connected_corpus


def _connected_brute(G, removed=()):
    removed = set(removed)
    if not G.vertices:
        return True
    seen, stack = {G.vertices[0]}, [G.vertices[0]]
    while stack:
        v = stack.pop()
        for e in G.incident(v):
            if e.id in removed:
                continue
            w = e.other(v)
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == G.n


def _edge_connectivity_brute(G, cap=3):
    for size in range(cap):
        for cut in itertools.combinations(G.edge_ids, size):
            if not _connected_brute(G, cut):
                return size
    return cap


def _random_multigraph(rng, n, m):
    return Multigraph.from_pairs([tuple(rng.sample(range(n), 2)) for _ in range(m)], vertices=list(range(n)))


# -- construction and serialization ---------------------------------------------


def test_json_round_trip():
    G = gen_theta(3, 2)
    assert Multigraph.from_json(G.to_json()) == G
    H = multiply_edges(gen_cycle(3), 2)
    assert Multigraph.from_json_obj(H.to_json_obj()) == H


@pytest.mark.parametrize("obj", [
    {"vertices": [0, 1]},
    {"vertices": [0, 1], "edges": [{"id": "a", "tail": 0}]},
    {"vertices": [0], "edges": [{"id": "a", "tail": 0, "head": 0}]},
    {"vertices": [0, 1], "edges": [{"id": "a", "tail": 0, "head": 2}]},
    {"vertices": [0, 0], "edges": []},
    {"vertices": [0, 1], "edges": [{"id": "a", "tail": 0, "head": 1}, {"id": "a", "tail": 1, "head": 0}]},
])
def test_malformed_graphs_rejected(obj):
    with pytest.raises(GraphError):
        Multigraph.from_json_obj(obj)


def test_theta_shape():
    G = gen_theta(5, 2)
    assert G.n == 2 + 5 and G.m == 10
    assert G.degree("s") == G.degree("t") == 5
    assert all(e.tail == "s" for e in G.out_edges("s"))
    with pytest.raises(GraphError):
        gen_theta(1, 2)
    with pytest.raises(GraphError):
        gen_theta(3, 0)


def test_subdivide_and_multiply():
    G = subdivide(gen_complete(4), "e0", 3)
    assert G.n == 6 and G.m == 8
    assert [e.id for e in G.edges][:3] == ["e0/0", "e0/1", "e0/2"]
    M = multiply_edges(gen_cycle(5), 2)
    assert M.m == 10 and all(M.degree(v) == 4 for v in M.vertices)


def test_contract_drops_loops():
    G = gen_complete(4)
    C, rep = G.contract([[0, 1]])
    assert C.n == 3 and C.m == 5
    assert rep[1] == 0


# -- connectivity -----------------------------------------------------------------


def test_components_and_bridges():
    G = Multigraph.from_pairs([(0, 1), (1, 2), (2, 0), (2, 3), (4, 5)], vertices=list(range(6)))
    assert sorted(map(sorted, components(G))) == [[0, 1, 2, 3], [4, 5]]
    assert bridges(G) == {"e3", "e4"}
    assert not is_connected(G)


def test_edge_connectivity_class_matches_brute():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(2, 6)
        G = _random_multigraph(rng, n, rng.randint(1, 10))
        assert edge_connectivity_class(G) == _edge_connectivity_brute(G)


def test_two_edge_cuts_match_brute_deletion():
    rng = random.Random(11)
    checked = 0
    while checked < 60:
        G = _random_multigraph(rng, rng.randint(2, 6), rng.randint(2, 10))
        if edge_connectivity_class(G) < 2:
            continue
        checked += 1
        brute = {tuple(sorted(p)) for p in itertools.combinations(G.edge_ids, 2) if not _connected_brute(G, p)}
        assert {tuple(sorted(c)) for c in two_edge_cuts(G)} == brute


def test_cycle_equivalence_classes_are_two_edge_cut_closures():
    G = subdivide(subdivide(gen_complete(4), "e0", 3), "e5")
    part = cycle_equivalence(G)
    assert sorted(len(c) for c in part.classes) == [1, 1, 1, 1, 2, 3]
    cuts = {frozenset(c) for c in two_edge_cuts(G)}
    for cls in part.classes:
        for a, b in itertools.combinations(cls, 2):
            assert frozenset((a, b)) in cuts
    assert part.class_of("e0/1") == ("e0/0", "e0/1", "e0/2")


@pytest.mark.parametrize("G,q", [
    (gen_theta(3, 1), 1),
    (gen_theta(3, 2), 2),
    (gen_theta(5, 2), 2),
    (gen_theta(4, 3), 3),
    (gen_complete(4), 1),
    (gen_cycle(6), 6),
    (gen_prism(), 1),
])
def test_cyclicity_examples(G, q):
    assert cyclicity(G) == q


def test_strongly_connected_orientation():
    rng = random.Random(3)
    done = 0
    while done < 40:
        G = _random_multigraph(rng, rng.randint(2, 6), rng.randint(2, 9))
        if edge_connectivity_class(G) < 2:
            continue
        done += 1
        sign = strongly_connected_orientation(G)
        D = G.with_reversed([e for e, s in sign.items() if s < 0])
        assert is_strongly_connected(D)
    assert not is_strongly_connected(gen_theta(3, 1))


# -- cubic expansion and the special tree ----------------------------------------


def test_cubic_expansion_of_k5():
    X = cubic_expansion(gen_complete(5))
    assert X.graph.n == 20 and X.graph.m == 30
    assert all(X.graph.degree(v) == 3 for v in X.graph.vertices)
    assert edge_connectivity_class(X.graph) == 3
    assert len(X.auxiliary) == 20
    assert set(gen_complete(5).edge_ids) <= set(X.graph.edge_ids)


def test_cubic_expansion_rejects_low_connectivity():
    with pytest.raises(ExpansionError):
        cubic_expansion(gen_cycle(4))


def test_cubic_expansion_random_cores():
    rng = random.Random(5)
    for _ in range(30):
        G = random_3ec_core(rng)
        X = cubic_expansion(G).graph
        assert all(X.degree(v) == 3 for v in X.vertices)
        assert edge_connectivity_class(X) == 3


def _independent_decoration_check(H, deco):
    red = H.without_edges(deco.nontree_edges)
    assert len(deco.tree_edges) == H.n - 1 and _connected_brute(red)
    assert deco.tree_edges | deco.nontree_edges == set(H.edge_ids)
    blue = H.without_edges(deco.tree_edges)
    assert {frozenset(c) for c in components(blue)} == {frozenset(b) for b in deco.blocks}
    X = deco.contraction(H)
    assert X.m == H.n - 1
    assert replay_build_order(X, deco.build_order)
    assert is_2_constructible(X)[0]


@pytest.mark.parametrize("name", ["K4", "prism", "K33", "cube", "W4"])
def test_special_tree_named_cores(name):
    X = cubic_expansion(named_core(name)).graph
    H = X.without_vertex(X.vertices[0])
    _independent_decoration_check(H, special_spanning_tree(H))


def test_special_tree_random_cores():
    rng = random.Random(21)
    for _ in range(25):
        X = cubic_expansion(random_3ec_core(rng)).graph
        v = rng.choice(X.vertices)
        H = X.without_vertex(v)
        _independent_decoration_check(H, special_spanning_tree(H))


def test_special_tree_rejects_disconnected():
    G = Multigraph.from_pairs([(0, 1), (2, 3)])
    with pytest.raises(SpecialTreeError):
        special_spanning_tree(G)


def test_two_constructible_examples():
    ok, order = is_2_constructible(multiply_edges(Multigraph.from_pairs([(0, 1)]), 2))
    assert ok and replay_build_order(multiply_edges(Multigraph.from_pairs([(0, 1)]), 2), order)
    assert is_2_constructible(Multigraph((0,), ()))[0]
    assert not is_2_constructible(gen_cycle(3))[0]
    K4 = gen_complete(4)
    assert not is_2_constructible(K4)[0]  # 6 edges on 4 vertices, need 2(n-1) = 6 but no valid split
    assert not replay_build_order(K4, [("e0", "e1")])


# -- degeneracy ---------------------------------------------------------------------


def _degeneracy_brute(G):
    best = 0
    verts = list(G.vertices)
    for r in range(1, len(verts) + 1):
        for S in itertools.combinations(verts, r):
            sub = G.induced(S)
            best = max(best, min(sub.degree(v) for v in sub.vertices))
    return best


def test_degeneracy_matches_brute():
    rng = random.Random(9)
    for _ in range(80):
        G = _random_multigraph(rng, rng.randint(2, 6), rng.randint(0, 12))
        assert degeneracy(G) == _degeneracy_brute(G)
    assert degeneracy(gen_complete(5)) == 4
    assert degeneracy(multiply_edges(gen_cycle(5), 2)) == 4


# -- embeddings and duals -----------------------------------------------------------


def test_theta_dual_is_bundle_cycle():
    G = gen_theta(5, 2)
    D, rot = planar_dual_with_rotation(G, theta_nested_rotation(G, 5, 2))
    assert D.n == 5 and D.m == 10
    assert all(D.degree(f) == 4 for f in D.vertices)
    assert euler_genus_zero(D, rot)
    # D is the doubled 5-cycle up to relabeling
    pairs = sorted(tuple(sorted((e.tail, e.head))) for e in D.edges)
    assert all(pairs.count(p) == 2 for p in set(pairs))
    assert len(set(pairs)) == 5


def test_dual_of_dual_has_primal_shape():
    G = gen_theta(3, 2)
    D, rot = planar_dual_with_rotation(G, theta_nested_rotation(G, 3, 2))
    DD = planar_dual(D, rot)
    assert (DD.n, DD.m) == (G.n, G.m)
    assert sorted(DD.degree(v) for v in DD.vertices) == sorted(G.degree(v) for v in G.vertices)


def test_face_tracing_covers_every_half_edge_once():
    G = gen_theta(4, 2)
    faces = trace_faces(G, theta_nested_rotation(G, 4, 2))
    halves = [h for f in faces for h in f]
    assert len(halves) == len(set(halves)) == 2 * G.m


def test_nonplanar_rotation_rejected():
    K33 = named_core("K33")
    assert find_planar_rotation(K33) is None
    rot = find_planar_rotation(gen_complete(4))
    assert rot is not None and euler_genus_zero(gen_complete(4), rot)
    G = gen_theta(3, 1)
    bad = RotationSystem({"s": (("e0_0", "tail"), ("e1_0", "tail"), ("e2_0", "tail")),
                          "t": (("e0_0", "head"), ("e1_0", "head"), ("e2_0", "head"))})
    assert len(trace_faces(G, bad)) == 1
    with pytest.raises(EmbeddingError):
        planar_dual(G, bad)


def test_dual_of_bridge_graph_rejected():
    G = Multigraph.from_pairs([(0, 1), (1, 2), (2, 0), (2, 3)])
    with pytest.raises(EmbeddingError):
        planar_dual(G, find_planar_rotation(G))


def test_cycle_rotation_dual():
    D = planar_dual(gen_cycle(4), cycle_rotation(gen_cycle(4)))
    assert D.n == 2 and D.m == 4


# -- normalization --------------------------------------------------------------------


def test_normalize_subdivided_theta_is_plain_theta():
    G = gen_theta(3, 2)
    N = normalize_to_subdivision(G)
    assert N.graph.n == 2 and N.graph.m == 3
    assert cyclicity(N.graph) == 1
    assert all(len(path) == 2 for path in N.class_paths.values())


def test_normalize_transport_preserves_conservation():
    from groupflow.abelian import FiniteAbelianGroup
    from groupflow.decide import exists_flow_avoiding, verify_flow

    Z7 = FiniteAbelianGroup.cyclic(7)
    for G in (gen_theta(3, 2), subdivide(gen_complete(4), "e2", 3), gen_cycle(5),
              subdivide(named_core("prism"), "e0")):
        N = normalize_to_subdivision(G)
        nonzero = {e: [Z7.zero] for e in N.graph.edge_ids}
        flow = exists_flow_avoiding(N.graph, Z7, nonzero).flow if N.graph.m else {}
        lifted = N.transport_to_original(G, flow, [Z7.element(1)] * len(N.cycle_classes), Z7)
        assert verify_flow(G, Z7, lifted, forbidden={e: [Z7.zero] for e in G.edge_ids}).ok


def test_normalize_rejects_bridges():
    with pytest.raises(GraphError):
        normalize_to_subdivision(Multigraph.from_pairs([(0, 1)]))


def test_corpus_graphs_are_two_edge_connected():
    for G in two_edge_connected_corpus():
        assert _edge_connectivity_brute(G, 2) == 2
