"""Finite-outcome POVMs: validation, generators, tensor products and the Born map."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from ._validation import (
    DimensionError,
    check_density_matrix,
    check_hermitian,
    check_positive_int,
    check_seed,
    check_tol,
)
from .operators import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, hvec

LABEL_SEPARATOR = ","


@dataclass(frozen=True, eq=False)
class Povm:
    """A list of effects ``A(x)`` on a ``dim``-dimensional Hilbert space.

    Construction only checks shapes and Hermiticity; positivity and the
    completeness relation are reported by :func:`validate` so that broken
    measurements can still be inspected.
    """

    effects: np.ndarray
    labels: tuple[str, ...] = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        effects = np.asarray(self.effects, dtype=complex)
        if effects.ndim == 2:
            effects = effects[None]
        if effects.ndim != 3 or effects.shape[0] < 1 or effects.shape[1] != effects.shape[2]:
            raise ValueError(f"effects must have shape (n, d, d), got {effects.shape}")
        effects = np.array([check_hermitian(e, f"effect {i}") for i, e in enumerate(effects)])
        effects.setflags(write=False)
        labels = tuple(str(x) for x in self.labels) or tuple(str(i) for i in range(len(effects)))
        if len(labels) != len(effects):
            raise ValueError(f"{len(labels)} labels for {len(effects)} effects")
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.effects.shape[0]

    def __len__(self) -> int:
        return self.n_outcomes

    def check(self, tol: float = 1e-9) -> "Povm":
        problems = validate(self, tol)
        if problems:
            raise ValueError("invalid POVM: " + "; ".join(problems))
        return self


def validate(povm: Povm, tol: float = 1e-9) -> list[str]:
    """List every violated POVM invariant; an empty list means valid."""
    tol = check_tol(tol)
    problems = []
    for label, e in zip(povm.labels, povm.effects):
        lam_min = np.linalg.eigvalsh(e)[0]
        if lam_min < -tol * max(1.0, np.linalg.norm(e)):
            problems.append(f"effect {label!r} is not positive (min eigenvalue {lam_min:.3e})")
    dev = np.max(np.abs(povm.effects.sum(axis=0) - np.eye(povm.dim)))
    if dev > tol:
        problems.append(f"effects do not sum to the identity (max deviation {dev:.3e})")
    return problems


def born_probabilities(povm: Povm, state) -> np.ndarray:
    """Outcome probabilities ``tr(rho A(x))`` of a density matrix."""
    rho = check_density_matrix(state)
    if rho.shape[0] != povm.dim:
        raise DimensionError(f"state has dim {rho.shape[0]}, POVM has dim {povm.dim}")
    # tr(rho A) = sum_jk rho_jk A_kj
    return np.einsum("jk,xkj->x", rho, povm.effects).real


def pure_probabilities(povm: Povm, psis) -> np.ndarray:
    """Born probabilities of a batch of state vectors, shape ``(n_states, n_outcomes)``.

    Vectors need not be normalized; they are normalized here.
    """
    psis = np.atleast_2d(np.asarray(psis, dtype=complex))
    if psis.shape[1] != povm.dim:
        raise DimensionError(f"vectors have length {psis.shape[1]}, POVM has dim {povm.dim}")
    psis = psis / np.linalg.norm(psis, axis=1, keepdims=True)
    outer = np.einsum("nj,nk->njk", psis.conj(), psis).reshape(len(psis), -1)
    # psi^dagger A psi = sum_jk conj(psi_j) A_jk psi_k
    return (outer @ povm.effects.reshape(povm.n_outcomes, -1).T).real


def mixed_probabilities(povm: Povm, rhos) -> np.ndarray:
    """Batched :func:`born_probabilities` without per-state validation."""
    rhos = np.asarray(rhos, dtype=complex)
    flat = np.swapaxes(rhos, -1, -2).reshape(len(rhos), -1)
    return (flat @ povm.effects.reshape(povm.n_outcomes, -1).T).real


def tensor_povm(a: Povm, b: Povm) -> Povm:
    """Product measurement with effects ``A(x) (x) B(y)`` and labels ``"x,y"``."""
    effects = np.einsum("xjk,ymn->xyjmkn", a.effects, b.effects).reshape(
        a.n_outcomes * b.n_outcomes, a.dim * b.dim, a.dim * b.dim
    )
    labels = [f"{x}{LABEL_SEPARATOR}{y}" for x in a.labels for y in b.labels]
    return Povm(effects, labels)


def tensor_povm_n(parts: Sequence[Povm]) -> Povm:
    if not parts:
        raise ValueError("need at least one POVM")
    return reduce(tensor_povm, parts)


_TETRAHEDRON = np.array(
    [
        [0.0, 0.0, 1.0],
        [2 * np.sqrt(2) / 3, 0.0, -1 / 3],
        [-np.sqrt(2) / 3, np.sqrt(2 / 3), -1 / 3],
        [-np.sqrt(2) / 3, -np.sqrt(2 / 3), -1 / 3],
    ]
)


def sic_qubit() -> Povm:
    """Four-outcome symmetric informationally complete qubit POVM (tetrahedron)."""
    effects = [
        (PAULI_I + n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z) / 4 for n in _TETRAHEDRON
    ]
    return Povm(np.array(effects))


def trivial_povm(dim: int) -> Povm:
    return Povm(np.eye(dim, dtype=complex)[None])


def _orthonormal_rows(vectors: np.ndarray, tol: float) -> np.ndarray:
    if len(vectors) == 0:
        return vectors
    u, s, vt = np.linalg.svd(vectors, full_matrices=False)
    if s[0] == 0:
        return vt[:0]
    r = int(np.sum(s > tol * s[0]))
    return vt[:r]


def from_span(basis, tol: float = 1e-8, max_shrink: int = 60) -> Povm:
    """Build a POVM whose effects span exactly ``span(basis)``.

    The span must contain the identity. With ``G_1..G_m`` an orthonormal
    basis of its traceless part the effects are ``(I + eps G_i) / (m + 1)``
    plus the closing effect ``I - sum_i A_i``; ``eps`` starts at
    ``0.9 / max_i ||G_i||`` and is halved until the closing effect is positive.
    The result has ``m + 1 = dim span`` outcomes.
    """
    mats = np.array([check_hermitian(b, f"basis[{i}]") for i, b in enumerate(basis)])
    if mats.ndim != 3 or len(mats) == 0:
        raise ValueError("basis must be a non-empty list of square matrices")
    d = mats.shape[1]
    rows = _orthonormal_rows(hvec(mats), tol)
    if len(rows) == 0:
        raise ValueError("degenerate basis: spans only the zero matrix")
    ident = hvec(np.eye(d)) / np.sqrt(d)
    resid = ident - rows.T @ (rows @ ident)
    if np.linalg.norm(resid) > 1e-8:
        raise ValueError("identity is not in the span of the basis")
    traceless = rows - np.outer(rows @ ident, ident)
    g_rows = _orthonormal_rows(traceless, tol) if len(rows) > 1 else traceless[:0]
    m = len(g_rows)
    if m != len(rows) - 1:
        raise ValueError("degenerate basis: could not separate the traceless part")
    eye = np.eye(d, dtype=complex)
    if m == 0:
        return Povm(eye[None])
    n = d * d
    gens = (g_rows[:, :n] + 1j * g_rows[:, n:]).reshape(m, d, d)
    gens = (gens + np.swapaxes(gens, 1, 2).conj()) / 2
    eps = 0.9 / max(np.linalg.norm(g, 2) for g in gens)
    total = gens.sum(axis=0)
    for _ in range(max_shrink):
        if np.linalg.eigvalsh(eye - eps * total)[0] >= 0:
            break
        eps /= 2
    else:
        raise RuntimeError("could not make the closing effect positive")
    effects = [(eye + eps * g) / (m + 1) for g in gens]
    effects.append(eye - sum(effects))
    return Povm(np.array(effects))


def random_povm(dim: int, n_outcomes: int, seed: int = 0, max_attempts: int = 10) -> Povm:
    """Random POVM ``A(x) = W^{-1/2} M_x W^{-1/2}`` from Wishart-like ``M_x``.

    Deterministic in ``seed``.
    """
    dim = check_positive_int(dim, "dim")
    n_outcomes = check_positive_int(n_outcomes, "n_outcomes")
    rng = np.random.default_rng(check_seed(seed))
    for _ in range(max_attempts):
        g = rng.normal(size=(n_outcomes, dim, dim)) + 1j * rng.normal(size=(n_outcomes, dim, dim))
        ms = g @ np.swapaxes(g, 1, 2).conj()
        w = ms.sum(axis=0)
        w = (w + w.conj().T) / 2
        lam, v = np.linalg.eigh(w)
        if lam[0] <= 1e-12 * lam[-1]:
            continue
        w_isqrt = (v / np.sqrt(lam)) @ v.conj().T
        effects = w_isqrt @ ms @ w_isqrt
        effects = (effects + np.swapaxes(effects, 1, 2).conj()) / 2
        # absorb the rounding residue of the completeness relation into the effects
        corr = np.eye(dim) - effects.sum(axis=0)
        effects = effects + corr / n_outcomes
        return Povm(effects)
    raise RuntimeError(f"singular frame operator after {max_attempts} attempts")


def qutrit_case_ii(s=(1.0, 1.0, -2.0)) -> Povm:
    """Qutrit POVM whose operator-span complement is the line through ``diag(s)``."""
    s = np.asarray(s, dtype=float)
    if s.shape != (3,) or abs(s.sum()) > 1e-9:
        raise ValueError("s must be three numbers summing to zero")
    return povm_with_complement([np.diag(s)])


def povm_with_complement(generators) -> Povm:
    """POVM whose span complement is ``span(generators)`` (which must be traceless)."""
    from .span import complement, subspace_from_matrices

    gens = [check_hermitian(g) for g in generators]
    d = gens[0].shape[0]
    if any(abs(np.trace(g)) > 1e-9 * max(1.0, np.linalg.norm(g)) for g in gens):
        raise ValueError("complement generators must be traceless")
    span = complement(subspace_from_matrices(gens, d))
    return from_span(span.basis)


def diag_complement_povm(diagonal) -> Povm:
    """POVM whose complement is the line through ``diag(diagonal)``."""
    return povm_with_complement([np.diag(np.asarray(diagonal, dtype=float))])

