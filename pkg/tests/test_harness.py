from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from localdist import harness
from localdist.operators import random_hermitian, rank_pm
from localdist.povm import mixed_probabilities, qutrit_case_ii, sic_qubit, tensor_povm_n

FAST = {"n_pairs": 500, "trials": 32}


def test_prop1_consistent_and_deterministic():
    a = harness.check_prop1((2, 3), seed=1, **FAST)
    b = harness.check_prop1((2, 3), seed=1, **FAST)
    assert a.verdict == "consistent"
    assert a.to_dict() == b.to_dict()
    assert {c["name"] for c in a.to_dict()["checks"]} >= {
        "complement_is_full_tensor_b_perp",
        "randomized_min_rank_ge_3",
        "pure_pairs_distinguished",
    }


def test_prop1_probe_is_refuted_with_witness():
    rep = harness.check_prop1((2, 4), seed=0, corrupt_b=True, **FAST)
    assert rep.verdict == "refuted"
    rho1, rho2 = rep.witnesses["lifted_witness"]
    assert np.linalg.norm(rho1 - rho2) > 0.1
    assert "witnesses" in rep.to_dict()


def test_prop1_rejects_dims():
    with pytest.raises(ValueError):
        harness.check_prop1((4, 3))


def test_prop2_instances():
    rep = harness.check_prop2(4, seed=0, s=(1, 2, -3), **FAST)
    assert rep.verdict == "consistent", rep.to_dict()
    probe = harness.check_prop2(3, seed=0, corrupt_a=True, **FAST)
    assert probe.verdict == "refuted"


def test_prop3_and_probes():
    assert harness.check_prop3((2, 4), seed=0, **FAST).verdict == "consistent"
    assert harness.check_prop3((2, 4), seed=0, probe="non-vpsic-b", **FAST).verdict == "refuted"
    with pytest.raises(ValueError):
        harness.check_prop3((2, 3))
    with pytest.raises(ValueError):
        harness.check_prop3((2, 4), probe="other")


def test_prop4():
    rep = harness.check_prop4(seed=0, **FAST)
    assert rep.verdict == "consistent"
    assert any(c.name.startswith("prop3:") for c in rep.checks)


def test_closed_form_inertia():
    g = np.diag([1.0, 1.0, -1.0, -1.0])
    assert harness.product_min_rank_pm(2, g) == 2
    assert harness.product_min_rank_pm(3, g) == 2
    assert harness.product_min_rank_pm(2, np.diag([2.0, -1.0, -1.0, 0.0])) == 1
    assert harness.product_min_rank(3, np.diag([1.0, 1.0, -2.0])) == 3


@given(st.integers(1, 3), st.integers(0, 10**6))
def test_closed_form_matches_product_spectra(d_a, seed):
    # the least rank_pm over all M (x) G equals the formula; sample M of every inertia
    rng = np.random.default_rng(seed)
    g = random_hermitian(3, rng)
    best = min(
        rank_pm(np.kron(np.diag(signs), g))
        for signs in np.array(np.meshgrid(*[[-1.0, 0.0, 1.0]] * d_a)).reshape(d_a, -1).T
        if np.any(signs)
    )
    assert best == harness.product_min_rank_pm(d_a, g)


def test_interlacing_examples():
    t = np.diag([4.0, 3.0, 2.0, 1.0])
    chk = harness.check_interlacing(t, [0, 1])
    assert chk.passed
    assert harness.check_interlacing(random_hermitian(6, np.random.default_rng(0)), [3, 4, 5]).passed
    assert harness.check_interlacing(random_hermitian(6, np.random.default_rng(0)), 3, seed=2).passed
    with pytest.raises(ValueError):
        harness.check_interlacing(t, [0, 0])
    with pytest.raises(ValueError):
        harness.check_interlacing(t, [5])


def test_interlacing_detects_violation():
    t = np.diag([1.0, 0.0])
    chk = harness.check_interlacing(t, np.array([[1.0], [0.0]]))
    assert chk.passed and chk.margin == 0.0
    # the equality lambda_1 = mu_1 cannot meet a demand for strict separation
    bad = harness.check_interlacing(np.diag([1.0, 0.0]), [0], slack=-0.5)
    assert not bad.passed


def test_rank_pm_transfers_from_blocks():
    t = np.kron(np.diag([1.0, -1.0]), np.diag([1.0, 1.0, -1.0, -1.0]))
    chk = harness.check_interlacing(t, np.arange(4))
    assert chk.detail["rank_pm_compression"] == 2 and chk.detail["rank_pm_full"] >= 2


def test_proof_unitaries():
    rep = harness.check_proof_unitaries(seed=3)
    assert rep.verdict == "consistent"
    assert harness.trig_gram_rank() == 7
    # a 2x2 grid has only four sample points, too few to separate seven functions
    assert harness.trig_gram_rank((0.0, 1.0)) < 7


def test_multipartite_dimensions():
    rep = harness.check_multipartite([2, 2, 3], seed=0, **FAST)
    assert rep.verdict == "consistent"
    dims = {c.name: c.detail for c in rep.checks}
    assert dims["complement_dimension"]["complement_dim"] == 16
    probe = harness.check_multipartite([2, 3], seed=0, corrupt=1, **FAST)
    assert probe.verdict == "refuted"


def test_budget():
    with pytest.raises(harness.BudgetExceeded):
        harness.check_multipartite([3, 3, 3, 3])
    with pytest.raises(harness.BudgetExceeded):
        harness.check_factorized_dims(2, 0, 0, 3)
    with pytest.raises(ValueError):
        harness.check_multipartite([5, 2])


def test_factor_dims():
    assert harness.factor_dims(12) == [2, 2, 3]
    with pytest.raises(ValueError):
        harness.factor_dims(10)


def test_lift_witness_equal_statistics():
    parts = [sic_qubit(), harness.non_psic_povm(3)]
    e = np.eye(3)
    pair = (np.outer(e[0], e[0]), np.outer(e[1], e[1]))
    lifted = harness.lift_witness(pair, [2, 3], 1)
    p = mixed_probabilities(tensor_povm_n(parts), np.array(lifted))
    assert np.max(np.abs(p[0] - p[1])) <= 1e-12


def test_violation_candidate_serialization():
    rep = harness.PropositionReport("x", {"dims": [2, 3]}, seed=7)
    rep.add("fails", False, -1.0)
    doc = rep.to_dict()
    assert doc["verdict"] == "violation-candidate"
    assert doc["seed"] == 7 and doc["instance"] == {"dims": [2, 3]}


def test_explore_is_labeled_empirical():
    rep = harness.explore_psic_product(3, 4, seed=0, **FAST)
    assert rep.verdict in ("empirical", "violation-candidate")
    assert rep.verdict != "consistent"


def test_reference_povms():
    assert harness.psic_povm(3).n_outcomes == qutrit_case_ii().n_outcomes
    with pytest.raises(ValueError):
        harness.vpsic_povm(3)
