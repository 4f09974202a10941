import random

import pytest

from groupflow.decide import find_coloring, verify_certificate, verify_coloring
from groupflow.families import (
    EDGE_RATIO_BOUND,
    Z3,
    Z5,
    degeneracy_check,
    dual_separation,
    edge_bound_check,
    lift_z3_to_z5,
    separating_prime,
    theta_dual,
    theta_separation,
    verify_witness,
    z3_shadow,
    z5_representative,
)
from groupflow.multigraph import gen_complete, gen_cycle, multiply_edges


@pytest.mark.parametrize("k,p", [(1, 3), (2, 5), (3, 7), (4, 11), (5, 19), (6, 37)])
def test_separating_prime(k, p):
    assert separating_prime(k) == p


def test_theta_separation_k1():
    w = theta_separation(1, 3)
    assert w.separates
    assert (w.good_group.spec, w.bad_group.spec) == ("Z3", "Z2")
    assert verify_witness(w) == []
    assert verify_certificate(w.graph, w.good_sample).ok
    assert "below_prime" not in w.notes


def test_theta_separation_k2():
    w = theta_separation(2, 5)
    assert w.good_verdict and not w.bad_verdict
    assert w.bad_group.spec == "Z2^2"
    assert w.good_checked == 5 ** (w.graph.n - 1)
    assert verify_certificate(w.graph, w.bad_certificate).ok


def test_below_prime_is_noted():
    w = theta_separation(2, 3)
    assert not w.bad_verdict
    assert "below_prime" in w.notes


def test_parameter_checks():
    with pytest.raises(ValueError):
        theta_separation(0, 3)
    with pytest.raises(ValueError):
        theta_separation(1, 4)
    with pytest.raises(ValueError):
        dual_separation(1, 1)


def test_dual_separation_matches_primal():
    for k, q in ((1, 3), (2, 5)):
        primal, dual = theta_separation(k, q), dual_separation(k, q)
        assert (primal.good_verdict, primal.bad_verdict) == (dual.good_verdict, dual.bad_verdict)
        assert verify_witness(dual) == []
        assert dual.rotation is not None


def test_theta_dual_shape():
    D, _ = theta_dual(2, 5)
    assert D.n == 5 and D.m == 10
    assert all(D.degree(v) == 4 for v in D.vertices)


def test_witness_json():
    w = theta_separation(1, 3)
    obj = w.to_json_obj()
    assert obj["separates"] is True
    assert obj["good_group"] == "Z3"
    assert '"bad_group": "Z2"' in w.to_json()


def test_tampered_witness_reported():
    w = theta_separation(1, 3)
    w.good_verdict = False
    assert "good-group verdict does not reproduce" in verify_witness(w)


def test_z5_representative_and_shadow():
    assert [z5_representative(x) for x in range(5)] == [0, 1, 2, -2, -1]
    assert [z3_shadow(x) for x in range(5)] == [(0,), (1,), (2,), (1,), (2,)]


def test_lift_on_cycles():
    rng = random.Random(0)
    for G in (gen_cycle(2), gen_cycle(3), gen_cycle(5)):
        for _ in range(25):
            phi = {e: rng.randrange(5) for e in G.edge_ids}
            c5, audit = lift_z3_to_z5(G, phi)
            assert verify_coloring(G, Z5, c5, phi).ok
            assert audit["verified"]
            assert verify_coloring(G, Z3, audit["coloring_z3"], audit["phi_z3"]).ok
            assert {z5_representative(x) for x in c5.values()} <= {-1, 0, 1}


def test_lift_rejects_non_z3_colorable():
    with pytest.raises(ValueError):
        lift_z3_to_z5(gen_complete(4), {})


def test_lift_rejects_unknown_edge():
    with pytest.raises(KeyError):
        lift_z3_to_z5(gen_cycle(3), {"zz": 1})


def test_edge_and_degeneracy_checks():
    ratio, ok = edge_bound_check(gen_complete(4))
    assert ratio == 1.5 and ok
    ratio, ok = edge_bound_check(multiply_edges(gen_cycle(2), 3))
    assert ratio == 3.0 and not ok and ratio >= EDGE_RATIO_BOUND
    assert degeneracy_check(gen_complete(6)) == (5, True)
    assert degeneracy_check(gen_complete(7)) == (6, False)


def test_doubled_even_cycle_is_not_z3_colorable():
    assert find_coloring(gen_cycle(4), Z3) is not None
    with pytest.raises(ValueError):
        lift_z3_to_z5(multiply_edges(gen_cycle(4), 2), {})
