"""Dense Hermitian-matrix primitives.

Hermitian matrices are plain ``numpy`` complex arrays of shape ``(d, d)``.
Every public function that accepts one runs it through
:func:`hermitian`, which symmetrizes small asymmetries and rejects
large ones.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._validation import (
    check_hermitian,
    check_same_dim,
    check_square,
    check_tol,
)

DEFAULT_TOL = 1e-8

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class EigenSystem(NamedTuple):
    """Eigenvalues in decreasing order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian(a) -> np.ndarray:
    """Validate ``a`` as a Hermitian matrix and return its symmetrized copy."""
    return check_hermitian(a)


def hs_inner(s, t) -> float:
    """Hilbert-Schmidt inner product ``tr(S T)`` of two Hermitian matrices."""
    s = hermitian(s)
    t = hermitian(t)
    check_same_dim(s, t)
    # tr(ST) = sum_jk S_jk T_kj = sum_jk S_jk conj(T_jk) for Hermitian T
    return float(np.vdot(t, s).real)


def hs_norm(t) -> float:
    return float(np.linalg.norm(np.asarray(t)))


def eigh(t) -> EigenSystem:
    t = hermitian(t)
    w, v = np.linalg.eigh(t)
    return EigenSystem(w[::-1].copy(), v[:, ::-1].copy())


def _scaled_spectrum(t, tol: float) -> tuple[np.ndarray, float]:
    tol = check_tol(tol)
    w = np.linalg.eigvalsh(hermitian(t))
    scale = max(1.0, float(np.max(np.abs(w))))
    return w, tol * scale


def inertia(t, tol: float = DEFAULT_TOL) -> tuple[int, int, int]:
    """Return ``(n_positive, n_negative, n_zero)`` eigenvalue counts.

    An eigenvalue counts as nonzero when ``|lambda| > tol * max(1, max|lambda|)``.
    """
    w, thr = _scaled_spectrum(t, tol)
    n_pos = int(np.sum(w > thr))
    n_neg = int(np.sum(w < -thr))
    return n_pos, n_neg, len(w) - n_pos - n_neg


def rank_eps(t, tol: float = DEFAULT_TOL) -> int:
    n_pos, n_neg, _ = inertia(t, tol)
    return n_pos + n_neg


def rank_pm(t, tol: float = DEFAULT_TOL) -> int:
    """Smaller of the numbers of strictly positive and strictly negative eigenvalues."""
    n_pos, n_neg, _ = inertia(t, tol)
    return min(n_pos, n_neg)


def tensor(s, t) -> np.ndarray:
    """Kronecker product ``S (x) T`` with row index ``(j, m) -> j * dim(T) + m``."""
    return np.kron(hermitian(s), hermitian(t))


def compress(t, basis_vectors) -> np.ndarray:
    """Compression ``V^dagger T V`` onto the span of orthonormal columns ``V``."""
    t = hermitian(t)
    v = np.asarray(basis_vectors, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    if v.ndim != 2 or v.shape[0] != t.shape[0]:
        raise ValueError(
            f"basis_vectors must have {t.shape[0]} rows, got shape {v.shape}"
        )
    gram_dev = np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1])))
    if gram_dev > 1e-8:
        raise ValueError(f"basis_vectors are not orthonormal (Gram deviation {gram_dev:.3e})")
    c = v.conj().T @ t @ v
    return (c + c.conj().T) / 2


def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal basis of the ``d**2``-dimensional real space of Hermitian matrices.

    The first element is ``I / sqrt(d)``; the rest are generalized Gell-Mann
    matrices (symmetric, antisymmetric, diagonal), all traceless.
    """
    basis = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1 / np.sqrt(2)
            anti = np.zeros((d, d), dtype=complex)
            anti[j, k] = -1j / np.sqrt(2)
            anti[k, j] = 1j / np.sqrt(2)
            basis.extend([sym, anti])
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        basis.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    return np.array(basis)


def hvec(t) -> np.ndarray:
    """Real isometric embedding of Hermitian matrices: ``hvec(S) . hvec(T) = tr(S T)``.

    Accepts a single matrix or a stack ``(..., d, d)``.
    """
    t = np.asarray(t, dtype=complex)
    flat = t.reshape(*t.shape[:-2], -1)
    return np.concatenate([flat.real, flat.imag], axis=-1)


def unhvec(v, d: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = d * d
    m = (v[..., :n] + 1j * v[..., n:]).reshape(*v.shape[:-1], d, d)
    return (m + np.swapaxes(m, -1, -2).conj()) / 2


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """Unit vector from a normalized complex Gaussian (unitarily invariant)."""
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return psi / np.linalg.norm(psi)


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def direct_sum(*blocks) -> np.ndarray:
    """Block-diagonal direct sum, used to embed small generators (e.g. ``X (+) 0``)."""
    mats = [check_square(b) for b in blocks]
    d = sum(m.shape[0] for m in mats)
    out = np.zeros((d, d), dtype=complex)
    i = 0
    for m in mats:
        n = m.shape[0]
        out[i : i + n, i : i + n] = m
        i += n
    return out
