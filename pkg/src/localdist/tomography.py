"""State reconstruction from outcome statistics.

The functional API (:func:`expectation_coeffs`, :func:`linear_inversion`,
:func:`pure_state_fit`) is wrapped by two scikit-learn style transformers,
:class:`LinearInversionTomography` and :class:`PureStateTomography`, which
map rows of outcome probabilities to state estimates and back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import DimensionError, check_hermitian, check_positive_int, check_seed, check_tol
from .operators import DEFAULT_TOL, hvec
from .povm import Povm, born_probabilities, mixed_probabilities, pure_probabilities
from .span import operator_span


class OutsideSpanError(ValueError):
    """The observable is not a real combination of the effects."""


@dataclass
class ExpansionCoefficients:
    alphas: np.ndarray
    residual: float

    def expectation(self, probabilities) -> float:
        return float(np.dot(self.alphas, probabilities))


def expectation_coeffs(povm: Povm, observable, tol: float = 1e-9) -> ExpansionCoefficients:
    """Minimum-norm real ``alpha`` with ``sum_x alpha_x A(x) = observable``.

    Then ``<O> = sum_x alpha_x p(x)`` for every state. Raises
    :class:`OutsideSpanError` when no exact combination exists.
    """
    tol = check_tol(tol)
    obs = check_hermitian(observable, "observable")
    if obs.shape[0] != povm.dim:
        raise DimensionError(f"observable has dim {obs.shape[0]}, POVM has dim {povm.dim}")
    a = hvec(povm.effects).T
    alphas = np.linalg.lstsq(a, hvec(obs), rcond=None)[0]
    residual = float(np.linalg.norm(a @ alphas - hvec(obs)))
    if residual > tol * max(1.0, float(np.linalg.norm(obs))):
        raise OutsideSpanError(f"observable is outside the operator span (residual {residual:.3e})")
    return ExpansionCoefficients(alphas, residual)


def _probability_rows(povm: Povm, stats) -> np.ndarray:
    p = np.asarray(stats, dtype=float)
    if p.shape[-1] != povm.n_outcomes:
        raise DimensionError(f"expected {povm.n_outcomes} probabilities, got {p.shape[-1]}")
    return p


def _inversion_map(povm: Povm, tol: float):
    span = operator_span(povm, tol)
    # m[x, k] = tr(Q_k A(x)); full column rank because the effects span R(A)
    m = hvec(povm.effects) @ hvec(span.basis).T
    return span, np.linalg.pinv(m)


def linear_inversion(povm: Povm, stats, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Least-squares Hermitian estimate inside the operator span, trace fixed to one.

    Returns ``(rho_hat, residual)`` where the residual is the Euclidean misfit
    between the estimate's probabilities and ``stats``. With exact statistics
    of ``rho`` the estimate is the orthogonal projection of ``rho`` onto the
    span, which is ``rho`` itself for informationally complete POVMs.
    """
    p = _probability_rows(povm, stats)
    span, pinv = _inversion_map(povm, tol)
    rho = _invert(span, pinv, p[None], povm.dim)[0]
    residual = float(np.linalg.norm(mixed_probabilities(povm, rho[None])[0] - p))
    return rho, residual


def _invert(span, pinv, rows, d):
    rhos = np.tensordot(rows @ pinv.T, span.basis, axes=1)
    rhos = (rhos + np.swapaxes(rhos, 1, 2).conj()) / 2
    tr = np.trace(rhos, axis1=1, axis2=2).real
    # identity is in the span, so this correction stays inside it
    return rhos + ((1 - tr) / d)[:, None, None] * np.eye(d)


# --- pure-state fitting ---------------------------------------------------


def fit_objective(povm: Povm, stats, psi) -> float:
    """``F(psi) = sum_x (psi^dagger A(x) psi - p_x)**2`` (``psi`` not renormalized)."""
    psi = np.asarray(psi, dtype=complex)
    q = np.einsum("j,xjk,k->x", psi.conj(), povm.effects, psi).real
    return float(np.sum((q - np.asarray(stats)) ** 2))


def fit_gradient(povm: Povm, stats, psi) -> np.ndarray:
    """Complex gradient ``g`` of :func:`fit_objective`: ``dF = Re <g, d psi>``."""
    psi = np.asarray(psi, dtype=complex)
    a_psi = povm.effects @ psi
    r = np.einsum("j,xj->x", psi.conj(), a_psi).real - np.asarray(stats)
    return 4 * np.einsum("x,xj->j", r, a_psi)


@dataclass
class PureStateFit:
    state: np.ndarray
    residual: float
    start: int

    def fidelity(self, other) -> float:
        other = np.asarray(other, dtype=complex)
        return float(abs(np.vdot(other / np.linalg.norm(other), self.state)) ** 2)


def fix_phase(psi) -> np.ndarray:
    """Normalize and rotate the largest-magnitude amplitude onto the positive real axis."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    k = int(np.argmax(np.abs(psi)))
    return psi * np.exp(-1j * np.angle(psi[k]))


def _fit_from(effects, p, z0):
    d = effects.shape[1]

    def split(x):
        return x[:d] + 1j * x[d:]

    def res(x):
        z = split(x)
        n = np.vdot(z, z).real
        return np.einsum("j,xjk,k->x", z.conj(), effects, z).real / n - p

    def jac(x):
        z = split(x)
        n = np.vdot(z, z).real
        az = effects @ z
        f = np.einsum("j,xj->x", z.conj(), az).real
        grad_f = np.concatenate([2 * az.real, 2 * az.imag], axis=1)
        grad_n = np.concatenate([2 * z.real, 2 * z.imag])
        return (grad_f - np.outer(f / n, grad_n)) / n

    sol = least_squares(res, np.concatenate([z0.real, z0.imag]), jac=jac, method="trf",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=500)
    return fix_phase(split(sol.x)), float(np.sum(sol.fun**2))


def pure_state_fit(povm: Povm, stats, starts: int = 16, seed: int = 0) -> PureStateFit:
    """Best-fitting pure state for ``stats`` by multi-start nonlinear least squares.

    The fit minimizes ``sum_x (<psi|A(x)|psi> - p_x)**2`` over unit vectors.
    For a pure-state complete POVM and exact pure-state statistics the
    minimizer is unique up to global phase. Ties go to the lowest start index.
    """
    p = _probability_rows(povm, stats)
    starts = check_positive_int(starts, "starts")
    rng = np.random.default_rng(check_seed(seed))
    z0s = rng.normal(size=(starts, povm.dim)) + 1j * rng.normal(size=(starts, povm.dim))
    best = None
    for i, z0 in enumerate(z0s):
        psi, r = _fit_from(povm.effects, p, z0)
        if best is None or r < best.residual:
            best = PureStateFit(psi, r, i)
    return best


def statistics_distance(povm: Povm, rho1, rho2) -> float:
    """Largest difference in outcome probability between two states."""
    return float(np.max(np.abs(born_probabilities(povm, rho1) - born_probabilities(povm, rho2))))


# --- estimators -----------------------------------------------------------


class LinearInversionTomography(TransformerMixin, BaseEstimator):
    """Linear-inversion state estimation as a transformer.

    ``transform`` maps rows of outcome probabilities to density-matrix
    estimates of shape ``(n, d, d)``; ``inverse_transform`` maps density
    matrices back to probabilities.

    Parameters
    ----------
    povm : Povm
        The measurement that produced the statistics.
    tol : float
        Relative threshold used to decide the dimension of the operator span.
    """

    def __init__(self, povm=None, tol=DEFAULT_TOL):
        self.povm = povm
        self.tol = tol

    def fit(self, X=None, y=None):
        if not isinstance(self.povm, Povm):
            raise TypeError("povm must be a Povm instance")
        self.povm.check()
        self.span_, self.pinv_ = _inversion_map(self.povm, check_tol(self.tol))
        self.n_features_in_ = self.povm.n_outcomes
        self.informationally_complete_ = self.span_.dim == self.povm.dim**2
        return self

    def transform(self, X):
        check_is_fitted(self, "pinv_")
        X = check_array(X, ensure_2d=True)
        X = _probability_rows(self.povm, X)
        return _invert(self.span_, self.pinv_, X, self.povm.dim)

    def inverse_transform(self, X):
        check_is_fitted(self, "pinv_")
        return mixed_probabilities(self.povm, np.asarray(X, dtype=complex).reshape(-1, self.povm.dim, self.povm.dim))


class PureStateTomography(TransformerMixin, BaseEstimator):
    """Pure-state fitting as a transformer returning state vectors ``(n, d)``.

    Use :meth:`reconstruct` for the fit residual of a single row.
    """

    def __init__(self, povm=None, n_starts=16, random_state=0):
        self.povm = povm
        self.n_starts = n_starts
        self.random_state = random_state

    def fit(self, X=None, y=None):
        if not isinstance(self.povm, Povm):
            raise TypeError("povm must be a Povm instance")
        self.povm.check()
        check_positive_int(self.n_starts, "n_starts")
        check_seed(self.random_state)
        self.n_features_in_ = self.povm.n_outcomes
        self.span_dim_ = operator_span(self.povm).dim
        return self

    def reconstruct(self, probabilities) -> PureStateFit:
        check_is_fitted(self, "span_dim_")
        return pure_state_fit(self.povm, probabilities, self.n_starts, self.random_state)

    def transform(self, X):
        X = check_array(X, ensure_2d=True)
        return np.array([self.reconstruct(row).state for row in X])

    def inverse_transform(self, X):
        check_is_fitted(self, "span_dim_")
        return pure_probabilities(self.povm, X)
