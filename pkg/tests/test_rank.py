from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from localdist.operators import rank_eps, rank_pm
from localdist.povm import (
    born_probabilities,
    diag_complement_povm,
    qutrit_case_ii,
    random_povm,
    sic_qubit,
    trivial_povm,
)
from localdist.rank import (
    IC,
    PSIC,
    RANK_PM,
    VPSIC,
    brute_force_min_rank,
    certify_povm,
    min_rank_pm_search,
    min_rank_search,
    psic_witness_states,
    vpsic_witness_states,
)
from localdist.span import full_space, subspace_from_matrices, zero_space


def _traceless(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (g + g.conj().T) / 2
    return h - np.trace(h).real / d * np.eye(d)


# (min rank, min rank_pm) of span{A, B} for A, B drawn with seeds 1000..1009.
# Rank from real roots of det(A + tB); rank_pm from a 2e5-point angle grid.
FROZEN_D4 = [(4, 2), (4, 2), (4, 2), (3, 1), (4, 2), (3, 1), (3, 1), (4, 2), (4, 2), (4, 2)]


@pytest.mark.parametrize("i", range(10))
def test_search_matches_frozen_oracle(i):
    rng = np.random.default_rng(1000 + i)
    sub = subspace_from_matrices([_traceless(rng, 4), _traceless(rng, 4)])
    want_rank, want_pm = FROZEN_D4[i]
    assert min_rank_search(sub, trials=64, seed=0).min_found == want_rank
    assert min_rank_pm_search(sub, trials=64, seed=0).min_found == want_pm
    assert brute_force_min_rank(sub, grid_points_per_angle=720).min_found == want_rank


def test_diagonal_subspaces_have_known_minimum():
    # diag(a, b - a, -b): rank 2 at a = b (diag(1, 0, -1))
    sub = subspace_from_matrices([np.diag([1.0, -1.0, 0.0]), np.diag([0.0, 1.0, -1.0])])
    cert = min_rank_search(sub, trials=16, seed=0)
    assert cert.min_found == 2
    assert rank_eps(cert.witness) == 2
    assert sub.contains(cert.witness)


def test_qutrit_subspaces_have_rank_pm_one():
    # a nonzero traceless 3x3 matrix always has exactly one eigenvalue of the minority sign
    rng = np.random.default_rng(7)
    sub = subspace_from_matrices([_traceless(rng, 3), _traceless(rng, 3)])
    assert min_rank_pm_search(sub, trials=8).min_found == 1


def test_trivial_subspaces():
    assert math.isinf(min_rank_search(zero_space(3)).min_found)
    one = subspace_from_matrices([np.diag([1.0, 1.0, -2.0])])
    cert = min_rank_search(one)
    assert cert.method == "exact" and cert.min_found == 3
    assert min_rank_pm_search(one).min_found == 1


def test_search_is_deterministic():
    rng = np.random.default_rng(3)
    sub = subspace_from_matrices([_traceless(rng, 4) for _ in range(3)])
    a = min_rank_search(sub, trials=16, seed=5)
    b = min_rank_search(sub, trials=16, seed=5)
    assert a.min_found == b.min_found
    np.testing.assert_array_equal(a.witness_coeffs, b.witness_coeffs)


def test_search_finds_rank_one_in_full_space():
    cert = min_rank_search(full_space(3), trials=16)
    assert cert.min_found == 1


def test_brute_force_limits():
    with pytest.raises(ValueError):
        brute_force_min_rank(full_space(2))


@given(st.integers(0, 10**6), st.integers(3, 5))
def test_psic_witness_pair_has_equal_statistics(seed, d):
    rng = np.random.default_rng(seed)
    u = np.linalg.qr(rng.normal(size=(d, 2)) + 1j * rng.normal(size=(d, 2)))[0]
    lam = rng.uniform(0.1, 2.0)
    t = lam * (np.outer(u[:, 0], u[:, 0].conj()) - np.outer(u[:, 1], u[:, 1].conj()))
    p1, p2 = psic_witness_states(t)
    np.testing.assert_allclose(p1 - p2, t / lam, atol=1e-10)
    assert rank_eps(p1) == rank_eps(p2) == 1


@given(st.integers(0, 10**6))
def test_vpsic_witness_pair(seed):
    rng = np.random.default_rng(seed)
    t = np.diag(rng.permutation([2.0, -1.0, -1.0])) * rng.uniform(0.5, 2) * rng.choice([-1, 1])
    pure, sigma = vpsic_witness_states(t)
    assert rank_eps(pure) == 1
    assert np.linalg.eigvalsh(sigma).min() > -1e-12
    assert np.isclose(np.trace(sigma).real, 1)
    diff = pure - sigma
    # the difference is a multiple of t
    ratio = diff[np.unravel_index(np.argmax(np.abs(t)), t.shape)] / t.flat[np.argmax(np.abs(t))]
    np.testing.assert_allclose(diff, ratio * t, atol=1e-12)


def test_witness_helpers_reject_bad_input():
    with pytest.raises(ValueError):
        psic_witness_states(np.diag([1.0, 1.0, -2.0]))
    with pytest.raises(ValueError):
        vpsic_witness_states(np.diag([1.0, 1.0, -1.0, -1.0]))


def test_certify_sic():
    for prop in (IC, PSIC, VPSIC):
        rep = certify_povm(sic_qubit(), prop)
        assert (rep.holds, rep.strength) == ("yes", "exact")


def test_certify_qutrit_case_ii():
    povm = qutrit_case_ii()
    ic = certify_povm(povm, IC)
    psic = certify_povm(povm, PSIC)
    vpsic = certify_povm(povm, VPSIC)
    assert (ic.holds, ic.span_dim) == ("no", 8)
    assert (psic.holds, psic.strength) == ("yes", "exact")
    assert (vpsic.holds, vpsic.strength) == ("no", "exact")
    pure, sigma = vpsic.witnesses
    assert rank_eps(pure) == 1 and rank_eps(sigma) >= 2
    assert vpsic.witness_distance <= 1e-12
    np.testing.assert_allclose(born_probabilities(povm, pure), born_probabilities(povm, sigma), atol=1e-12)


def test_certify_dim4_vpsic():
    povm = diag_complement_povm([1, 1, -1, -1])
    for prop in (PSIC, VPSIC):
        rep = certify_povm(povm, prop)
        assert (rep.holds, rep.strength) == ("yes", "exact")
    assert certify_povm(povm, IC).holds == "no"


def test_certify_non_psic_gives_pure_witness():
    povm = diag_complement_povm([1, -1, 0, 0])
    rep = certify_povm(povm, PSIC)
    assert rep.holds == "no"
    p1, p2 = rep.witnesses
    assert rank_eps(p1) == rank_eps(p2) == 1
    assert rep.witness_distance <= 1e-12


def test_certify_trivial_povm():
    rep = certify_povm(trivial_povm(3), PSIC)
    assert rep.holds == "no"
    assert rep.complement_dim == 8


def test_certify_empirical_on_wide_complement():
    rep = certify_povm(random_povm(4, 14, 3), PSIC, trials=16)
    # complement dim 2 in d = 4: either a witness or an empirical/oracle-backed yes
    assert rep.complement_dim == 2
    assert rep.holds in ("yes", "no")
    if rep.holds == "yes":
        assert rep.oracle is not None and rep.oracle.min_found >= 3


@given(st.integers(1, 6), st.integers(0, 10**5))
def test_qubit_psic_equals_ic(n, seed):
    povm = random_povm(2, n, seed)
    assert certify_povm(povm, PSIC, trials=8).holds == certify_povm(povm, IC).holds


@given(st.integers(1, 12), st.integers(0, 10**5))
def test_qutrit_vpsic_equals_ic(n, seed):
    povm = random_povm(3, n, seed)
    assert certify_povm(povm, VPSIC, trials=8).holds == certify_povm(povm, IC).holds


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_rank_pm_witness_is_in_complement(seed):
    rng = np.random.default_rng(seed)
    sub = subspace_from_matrices([_traceless(rng, 4), _traceless(rng, 4)])
    cert = min_rank_pm_search(sub, trials=16, seed=seed)
    assert sub.contains(cert.witness, 1e-8)
    assert rank_pm(cert.witness) == cert.min_found
    assert cert.target == RANK_PM
