import json
import random

import pytest

from groupflow.abelian import FiniteAbelianGroup, parse_group_spec, simple_sum_closure
from groupflow.corpus import named_core, solver_instances
from groupflow.decide import exists_flow_avoiding, verify_flow
from groupflow.multigraph import (
    GraphError,
    cyclicity,
    gen_complete,
    gen_cycle,
    gen_prism,
    gen_theta,
    multiply_edges,
    normalize_to_subdivision,
    subdivide,
)
from groupflow.solve import (
    NoFlowExists,
    StructuredFailure,
    add_apex,
    guarantee_regime,
    solve_forbidden_flow_2ec,
    solve_forbidden_flow_3ec,
    solve_forbidden_flow_apex,
    solving_basis,
)

Z9 = FiniteAbelianGroup.cyclic(9)
Z11 = FiniteAbelianGroup.cyclic(11)
Z67 = FiniteAbelianGroup.cyclic(67)


def _singletons(G, group, seed):
    rng = random.Random(seed)
    elements = list(group.elements())
    return {e: [rng.choice(elements)] for e in G.edge_ids}


def _nonzero(G, group):
    return {e: [group.zero] for e in G.edge_ids}


def test_empty_forbidden_gives_zero_flow():
    r = solve_forbidden_flow_3ec(gen_complete(4), {}, Z11, require_structured=True)
    assert r.path == "structured"
    assert set(r.flow.values()) == {Z11.zero}
    assert r.step2_rounds == []


def test_apex_on_k4_gives_constant_cycle_flow():
    G = gen_complete(4)
    H_edges = [e.id for e in G.without_vertex(0).edges]
    r = solve_forbidden_flow_apex(G, 0, {e: [0] for e in H_edges}, Z11, require_structured=True)
    assert set(r.flow) == set(H_edges)
    assert verify_flow(G.without_vertex(0), Z11, r.flow, forbidden={e: [0] for e in H_edges}).ok
    # H is a triangle: the flow is one value up to orientation
    assert len({min(x, Z11.neg(x)) for x in r.flow.values()}) == 1


def test_k4_nowhere_zero():
    G = gen_complete(4)
    r = solve_forbidden_flow_3ec(G, _nonzero(G, Z11), Z11, require_structured=True)
    assert r.regime == "guaranteed"
    assert verify_flow(G, Z11, r.flow, forbidden=_nonzero(G, Z11)).ok


def test_prism_exercises_step_two():
    G = gen_prism()
    fm = _singletons(G, Z9, 3)
    r = solve_forbidden_flow_3ec(G, fm, Z9, require_structured=True)
    assert r.path == "structured" and r.step2_rounds
    assert verify_flow(G, Z9, r.flow, forbidden=fm).ok
    gammas = [g for g, _ in r.step2_rounds]
    assert len(gammas) == len(set(gammas)) <= len(r.basis.pi)


def test_tripled_theta():
    G = multiply_edges(gen_theta(3, 1), 3)
    for seed in range(5):
        fm = _singletons(G, Z11, seed)
        r = solve_forbidden_flow_3ec(G, fm, Z11)
        assert verify_flow(G, Z11, r.flow, forbidden=fm).ok


def test_cycle_2ec():
    Z227 = FiniteAbelianGroup.cyclic(227)
    G = gen_cycle(3)
    fm = _singletons(G, Z227, 0)
    r = solve_forbidden_flow_2ec(G, fm, Z227, require_structured=True)
    assert r.regime == "guaranteed"
    assert verify_flow(G, Z227, r.flow, forbidden=fm).ok
    values = {x if e.tail < e.head else Z227.neg(x) for e, x in ((G.edge(i), v) for i, v in r.flow.items())}
    assert len(values) == 1


def test_subdivided_theta_2ec():
    G = gen_theta(3, 2)
    assert normalize_to_subdivision(G).graph.m == 3
    for seed in range(5):
        fm = _singletons(G, Z67, seed)
        r = solve_forbidden_flow_2ec(G, fm, Z67)
        assert r.notes["cyclicity"] == 2
        assert verify_flow(G, Z67, r.flow, forbidden=fm).ok
        assert exists_flow_avoiding(G, Z67, fm).found


def test_subdivided_k4_2ec():
    G = subdivide(gen_complete(4), "e0")
    assert cyclicity(G) == 2
    fm = _singletons(G, Z67, 1)
    r = solve_forbidden_flow_2ec(G, fm, Z67)
    assert r.regime == "guaranteed"
    assert verify_flow(G, Z67, r.flow, forbidden=fm).ok


def test_regime_labels():
    assert guarantee_regime(9, 1) == "guaranteed"
    assert guarantee_regime(8, 1) == "outside-guarantee"
    assert guarantee_regime(65, 1, 2) == "guaranteed"
    assert guarantee_regime(64, 2) == "outside-guarantee"


def test_solving_basis_sizes():
    b = solving_basis(Z9, 1)
    assert len(b.pi) == 2
    assert solving_basis(Z9, 0).pi == ()
    with pytest.raises(StructuredFailure):
        solving_basis(FiniteAbelianGroup.cyclic(3), 2)


def test_preconditions():
    with pytest.raises(GraphError):
        solve_forbidden_flow_3ec(gen_cycle(4), {}, Z11)
    with pytest.raises(GraphError):
        solve_forbidden_flow_apex(gen_complete(5), 0, {}, Z11)
    with pytest.raises(GraphError):
        solve_forbidden_flow_apex(gen_theta(3, 2), "s", {}, Z11)
    with pytest.raises(GraphError):
        solve_forbidden_flow_2ec(gen_complete(2), {}, Z11)


def test_add_apex_is_three_edge_connected():
    from groupflow.multigraph import edge_connectivity_class

    for name in ("K4", "prism", "K33", "cube"):
        Ga, apex = add_apex(named_core(name))
        assert Ga.degree(apex) == 3
        assert edge_connectivity_class(Ga) == 3


def test_no_flow_exists_is_reported():
    G = multiply_edges(gen_theta(3, 1), 3)
    Z2 = FiniteAbelianGroup.cyclic(2)
    # one edge has every value of Z2 forbidden
    fm = {e: [0] for e in G.edge_ids}
    fm["e0_0.0"] = [0, 1]
    with pytest.raises(NoFlowExists):
        solve_forbidden_flow_3ec(G, fm, Z2)


def test_require_structured_raises_instead_of_falling_back():
    # below the guarantee the structured route can run out of gammas
    G = gen_complete(4)
    Z4 = FiniteAbelianGroup.cyclic(4)
    fm = _nonzero(G, Z4)
    r = solve_forbidden_flow_3ec(G, fm, Z4)
    assert r.regime == "outside-guarantee"
    assert r.path == "fallback" and r.fallback_reason
    assert r.step1_choices == [] and r.step2_rounds == []
    assert verify_flow(G, Z4, r.flow, forbidden=fm).ok
    with pytest.raises(StructuredFailure):
        solve_forbidden_flow_3ec(G, fm, Z4, require_structured=True)


def test_report_json():
    G = gen_prism()
    r = solve_forbidden_flow_3ec(G, _singletons(G, Z9, 3), Z9)
    obj = json.loads(r.to_json())
    assert obj["path"] == "structured"
    assert obj["step2_rounds"] and obj["basis"]["pi_prime_size"] == r.basis.pi_prime_size
    assert set(obj["flow"]) == set(G.edge_ids)


def test_red_drift_stays_in_simple_sum():
    """Sum of Step 2 pushes on any edge is a signed subset sum of the chosen gammas."""
    G = gen_prism()
    for seed in range(40):
        fm = _singletons(G, Z9, seed)
        r = solve_forbidden_flow_3ec(G, fm, Z9, require_structured=True)
        gammas = [g for g, _ in r.step2_rounds]
        assert len(gammas) == len(set(gammas))
        assert simple_sum_closure(gammas, Z9) <= simple_sum_closure(r.basis.pi, Z9) or r.notes.get("gamma_outside_pi")


@pytest.mark.parametrize("seed", [0, 1])
def test_seeded_soak(seed):
    for inst in solver_instances(40, seed=seed):
        solve = solve_forbidden_flow_3ec if inst.kind == "3ec" else solve_forbidden_flow_2ec
        r = solve(inst.graph, inst.forbidden, inst.group)
        assert verify_flow(inst.graph, inst.group, r.flow, forbidden=inst.forbidden).ok
        assert r.regime == "guaranteed"
        if r.path == "fallback":
            pytest.fail(f"structured path failed inside the guarantee: {r.fallback_reason}")


def test_non_cyclic_groups():
    G = named_core("K33")
    for spec in ("Z3^2", "Z2xZ6"):
        group = parse_group_spec(spec)
        fm = _singletons(G, group, 2)
        r = solve_forbidden_flow_3ec(G, fm, group)
        assert verify_flow(G, group, r.flow, forbidden=fm).ok
