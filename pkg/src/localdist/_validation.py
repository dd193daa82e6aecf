"""Input validation helpers shared by the public API."""

from __future__ import annotations

import numbers

import numpy as np

HERMITIAN_REPAIR_ATOL = 1e-9


class DimensionError(ValueError):
    """Raised when operands live on Hilbert spaces of different dimension."""


class NotHermitianError(ValueError):
    pass


class NotAStateError(ValueError):
    pass


def check_tol(tol: float, name: str = "tol") -> float:
    if not isinstance(tol, numbers.Real) or not np.isfinite(tol) or tol <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {tol!r}")
    return float(tol)


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral) or seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    return int(seed)


def check_square(a, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_hermitian(a, name: str = "matrix", atol: float = HERMITIAN_REPAIR_ATOL) -> np.ndarray:
    """Return ``(a + a^dagger) / 2`` after checking that ``a`` is Hermitian.

    Asymmetry up to ``atol`` (absolute, elementwise) is repaired silently;
    anything larger raises :class:`NotHermitianError`.
    """
    arr = check_square(a, name)
    dev = np.max(np.abs(arr - arr.conj().T))
    if dev > atol:
        raise NotHermitianError(f"{name} is not Hermitian (max asymmetry {dev:.3e})")
    return (arr + arr.conj().T) / 2


def check_same_dim(*mats: np.ndarray) -> int:
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def check_density_matrix(rho, name: str = "state", atol: float = 1e-8) -> np.ndarray:
    rho = check_hermitian(rho, name)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > atol:
        raise NotAStateError(f"{name} has trace {tr:.12g}, expected 1")
    lam_min = np.linalg.eigvalsh(rho)[0]
    if lam_min < -atol:
        raise NotAStateError(f"{name} is not positive semidefinite (min eigenvalue {lam_min:.3e})")
    return rho


def check_probability_vector(p, n_outcomes: int | None = None, atol: float = 1e-8) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"probabilities must be one-dimensional, got shape {p.shape}")
    if n_outcomes is not None and p.shape[0] != n_outcomes:
        raise DimensionError(f"expected {n_outcomes} probabilities, got {p.shape[0]}")
    if np.any(p < -1e-9) or np.any(p > 1 + 1e-9) or abs(p.sum() - 1.0) > atol:
        raise ValueError("probabilities must lie in [0, 1] and sum to 1")
    return p
