from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from localdist.operators import random_density_matrix
from localdist.povm import (
    Povm,
    born_probabilities,
    diag_complement_povm,
    from_span,
    mixed_probabilities,
    povm_with_complement,
    pure_probabilities,
    qutrit_case_ii,
    random_povm,
    sic_qubit,
    tensor_povm,
    tensor_povm_n,
    trivial_povm,
    validate,
)
from localdist.span import complement, is_ic, operator_span

R2 = np.sqrt(2)
R6 = np.sqrt(6)
# exact tetrahedral effects, evaluated symbolically
SIC_EFFECTS = np.array(
    [
        [[1 / 2, 0], [0, 0]],
        [[1 / 6, R2 / 6], [R2 / 6, 1 / 3]],
        [[1 / 6, -R2 / 12 - 1j * R6 / 12], [-R2 / 12 + 1j * R6 / 12, 1 / 3]],
        [[1 / 6, -R2 / 12 + 1j * R6 / 12], [-R2 / 12 - 1j * R6 / 12, 1 / 3]],
    ]
)


def test_sic_effects_match_exact_values():
    np.testing.assert_allclose(sic_qubit().effects, SIC_EFFECTS, atol=1e-15)


def test_sic_is_valid_and_ic():
    povm = sic_qubit()
    assert validate(povm) == []
    assert is_ic(povm) == (True, 4)


def test_sic_pairwise_overlaps():
    e = sic_qubit().effects
    gram = np.einsum("ajk,bkj->ab", e, e).real
    # tr(E_i E_j) = (1 + n_i.n_j) / 8 with n_i.n_j = -1/3
    np.testing.assert_allclose(gram, np.where(np.eye(4), 1 / 4, 1 / 12), atol=1e-15)


def test_constructor_checks():
    with pytest.raises(ValueError):
        Povm(np.zeros((2, 2, 3)))
    with pytest.raises(ValueError):
        Povm(np.eye(2)[None], labels=("a", "b"))
    with pytest.raises(ValueError):
        Povm(np.array([[[0, 1], [0, 0]]]))


def test_validate_reports_violations():
    bad = Povm(np.array([np.diag([1.5, 0.0]), np.diag([-0.5, 1.0])]))
    problems = validate(bad)
    assert len(problems) == 1 and "not positive" in problems[0]
    short = Povm(np.array([np.diag([0.5, 0.5])]))
    assert "sum to the identity" in validate(short)[0]
    with pytest.raises(ValueError):
        short.check()


def test_effects_are_read_only():
    povm = sic_qubit()
    with pytest.raises(ValueError):
        povm.effects[0, 0, 0] = 1


@given(st.integers(1, 4), st.integers(1, 10), st.integers(0, 10**6))
def test_random_povm_is_valid_and_deterministic(d, n, seed):
    a = random_povm(d, n, seed)
    assert validate(a) == []
    assert a.n_outcomes == n and a.dim == d
    np.testing.assert_array_equal(a.effects, random_povm(d, n, seed).effects)


@given(st.integers(0, 10**6))
def test_probabilities_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    povm = random_povm(3, 7, seed)
    rho = random_density_matrix(3, rng)
    p = born_probabilities(povm, rho)
    assert np.all(p >= -1e-12)
    assert np.isclose(p.sum(), 1.0)
    np.testing.assert_allclose(mixed_probabilities(povm, rho[None])[0], p, atol=1e-14)


def test_pure_probabilities_match_density_matrix():
    rng = np.random.default_rng(3)
    povm = random_povm(3, 5, 1)
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    rho = np.outer(psi, psi.conj()) / np.vdot(psi, psi).real
    np.testing.assert_allclose(pure_probabilities(povm, 7 * psi)[0], born_probabilities(povm, rho), atol=1e-14)


def test_tensor_product_layout():
    a, b = sic_qubit(), qutrit_case_ii()
    ab = tensor_povm(a, b)
    assert ab.dim == 6 and ab.n_outcomes == 4 * 8
    assert ab.labels[0] == "0,0" and ab.labels[9] == "1,1"
    np.testing.assert_allclose(ab.effects[9], np.kron(a.effects[1], b.effects[1]), atol=1e-15)
    assert validate(ab) == []


def test_tensor_with_trivial_povm_scales_the_complement():
    b = qutrit_case_ii()
    product = tensor_povm(trivial_povm(2), b)
    # span is {I} (x) R(B): 1 * 8, complement 36 - 8
    assert operator_span(product).dim == 8
    assert complement(operator_span(product)).dim == 28


def test_tensor_n_is_associative():
    parts = [sic_qubit(), sic_qubit(), qutrit_case_ii()]
    left = tensor_povm(tensor_povm(parts[0], parts[1]), parts[2])
    np.testing.assert_allclose(tensor_povm_n(parts).effects, left.effects)


def test_qutrit_case_ii_complement():
    povm = qutrit_case_ii((1, 1, -2))
    assert povm.n_outcomes == 8
    assert validate(povm) == []
    perp = complement(operator_span(povm))
    assert perp.dim == 1
    g = perp.basis[0] * np.sign(perp.basis[0][0, 0].real)
    np.testing.assert_allclose(g, np.diag([1, 1, -2]) / np.sqrt(6), atol=1e-12)


def test_qutrit_case_ii_rejects_trace():
    with pytest.raises(ValueError):
        qutrit_case_ii((1, 1, 1))


def test_from_span_spans_exactly():
    d = 4
    perp_gen = np.diag([1.0, 1.0, -1.0, -1.0])
    povm = diag_complement_povm([1, 1, -1, -1])
    assert validate(povm) == []
    span = operator_span(povm)
    assert span.dim == 15
    assert povm.n_outcomes == 15
    assert abs(np.trace(span.project(perp_gen))) < 1e-12
    assert np.linalg.norm(span.project(perp_gen)) < 1e-10
    assert span.contains(np.eye(d))


def test_from_span_needs_identity():
    with pytest.raises(ValueError):
        from_span([np.diag([1.0, -1.0])])


def test_from_span_full_basis_is_ic():
    from localdist.operators import hermitian_basis

    povm = from_span(hermitian_basis(2))
    assert validate(povm) == [] and is_ic(povm)[0]


@given(st.integers(0, 10**6), st.floats(0.0, 1.0))
def test_born_map_is_affine(seed, lam):
    rng = np.random.default_rng(seed)
    povm = random_povm(3, 6, seed)
    r1, r2 = random_density_matrix(3, rng), random_density_matrix(3, rng)
    mixed = born_probabilities(povm, lam * r1 + (1 - lam) * r2)
    split = lam * born_probabilities(povm, r1) + (1 - lam) * born_probabilities(povm, r2)
    np.testing.assert_allclose(mixed, split, atol=1e-10)


@given(st.integers(1, 8), st.integers(0, 10**6))
def test_generated_povms_validate(k, seed):
    rng = np.random.default_rng(seed)
    gens = []
    for _ in range(k):
        h = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        h = h + h.conj().T
        gens.append(h - np.trace(h).real / 3 * np.eye(3))
    povm = povm_with_complement(gens)
    assert validate(povm, 1e-9) == []
    assert operator_span(povm).dim == 9 - k
