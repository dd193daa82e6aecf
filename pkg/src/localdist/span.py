"""Operator spans of POVMs and their Hilbert-Schmidt orthogonal complements."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import DimensionError, check_hermitian, check_tol
from .operators import DEFAULT_TOL, eigh, hermitian_basis, hvec, rank_eps
from .povm import Povm


@dataclass(frozen=True, eq=False)
class OperatorSubspace:
    """Real subspace of ``d x d`` Hermitian matrices with an orthonormal basis."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        d = self.ambient_dim
        basis = np.asarray(self.basis, dtype=complex).reshape(-1, d, d)
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __len__(self) -> int:
        return self.dim

    def gram(self) -> np.ndarray:
        v = hvec(self.basis)
        return v @ v.T

    def coordinates(self, t) -> np.ndarray:
        """Coefficients of the orthogonal projection of ``t`` onto the subspace."""
        return hvec(self.basis) @ hvec(t)

    def element(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        if self.dim == 0:
            return np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
        return np.tensordot(coeffs, self.basis, axes=1)

    def project(self, t) -> np.ndarray:
        t = check_hermitian(t)
        if t.shape[0] != self.ambient_dim:
            raise DimensionError(f"matrix has dim {t.shape[0]}, subspace lives in dim {self.ambient_dim}")
        return self.element(self.coordinates(t))

    def residual(self, t) -> float:
        """HS norm of the component of ``t`` orthogonal to the subspace."""
        return float(np.linalg.norm(check_hermitian(t) - self.project(t)))

    def contains(self, t, tol: float = 1e-8) -> bool:
        return self.residual(t) <= tol * max(1.0, float(np.linalg.norm(t)))

    def negated(self) -> "OperatorSubspace":
        return OperatorSubspace(self.ambient_dim, -self.basis)


def _orthonormalize(vectors: np.ndarray, tol: float) -> np.ndarray:
    if len(vectors) == 0:
        return vectors
    _, s, vt = np.linalg.svd(vectors, full_matrices=False)
    if s[0] == 0:
        return vt[:0]
    return vt[: int(np.sum(s > tol * s[0]))]


def _from_rows(rows: np.ndarray, d: int) -> OperatorSubspace:
    n = d * d
    mats = (rows[:, :n] + 1j * rows[:, n:]).reshape(-1, d, d)
    mats = (mats + np.swapaxes(mats, 1, 2).conj()) / 2
    return OperatorSubspace(d, mats)


def subspace_from_matrices(mats, d: int | None = None, tol: float = DEFAULT_TOL) -> OperatorSubspace:
    """Orthonormal basis of the real span of Hermitian matrices, rank decided at ``tol``."""
    tol = check_tol(tol)
    mats = [check_hermitian(m) for m in mats]
    if not mats:
        if d is None:
            raise ValueError("cannot infer the dimension of an empty span")
        return OperatorSubspace(d, np.zeros((0, d, d)))
    d = mats[0].shape[0] if d is None else d
    if any(m.shape[0] != d for m in mats):
        raise DimensionError("matrices of different dimensions")
    return _from_rows(_orthonormalize(hvec(np.array(mats)), tol), d)


def full_space(d: int) -> OperatorSubspace:
    return OperatorSubspace(d, hermitian_basis(d))


def zero_space(d: int) -> OperatorSubspace:
    return OperatorSubspace(d, np.zeros((0, d, d)))


def operator_span(povm: Povm, tol: float = DEFAULT_TOL) -> OperatorSubspace:
    """Real linear span of the effects of ``povm``."""
    return subspace_from_matrices(povm.effects, povm.dim, tol)


def complement(sub: OperatorSubspace, tol: float = DEFAULT_TOL) -> OperatorSubspace:
    """Orthogonal complement inside all Hermitian ``d x d`` matrices."""
    d = sub.ambient_dim
    full = hvec(hermitian_basis(d))
    if sub.dim:
        v = hvec(sub.basis)
        full = full - (full @ v.T) @ v
    rows = _orthonormalize(full, check_tol(tol))
    # the residual cloud has exactly d^2 - dim(sub) directions; guard against tol drift
    rows = rows[: d * d - sub.dim]
    return _from_rows(rows, d)


def tensor_subspace(s: OperatorSubspace, t: OperatorSubspace) -> OperatorSubspace:
    """Subspace spanned by ``S_i (x) T_j``; orthonormal because tr is multiplicative."""
    d = s.ambient_dim * t.ambient_dim
    if s.dim == 0 or t.dim == 0:
        return zero_space(d)
    basis = np.einsum("ajk,bmn->abjmkn", s.basis, t.basis).reshape(s.dim * t.dim, d, d)
    return OperatorSubspace(d, basis)


def direct_sum_subspace(*subs: OperatorSubspace, tol: float = DEFAULT_TOL) -> OperatorSubspace:
    d = subs[0].ambient_dim
    mats = [b for s in subs for b in s.basis]
    return subspace_from_matrices(mats, d, tol) if mats else zero_space(d)


def max_cross_inner(s: OperatorSubspace, t: OperatorSubspace) -> float:
    if s.dim == 0 or t.dim == 0:
        return 0.0
    return float(np.max(np.abs(hvec(s.basis) @ hvec(t.basis).T)))


def max_projection_residual(inner: OperatorSubspace, outer: OperatorSubspace) -> float:
    """Largest distance of an ``inner`` basis element from ``outer``."""
    if inner.dim == 0:
        return 0.0
    if outer.dim == 0:
        return float(np.max(np.linalg.norm(hvec(inner.basis), axis=1)))
    vi, vo = hvec(inner.basis), hvec(outer.basis)
    res = vi - (vi @ vo.T) @ vo
    return float(np.max(np.linalg.norm(res, axis=1)))


def is_ic(povm: Povm, tol: float = DEFAULT_TOL) -> tuple[bool, int]:
    """Informational completeness and the span dimension it was decided on."""
    dim = operator_span(povm, tol).dim
    return dim == povm.dim**2, dim


def difference_in_kernel(povm: Povm, rho1, rho2, tol: float = 1e-8) -> bool:
    """True when ``rho1 - rho2`` is orthogonal to every effect (same statistics)."""
    rho1, rho2 = check_hermitian(rho1), check_hermitian(rho2)
    if rho1.shape != rho2.shape or rho1.shape[0] != povm.dim:
        raise DimensionError("states and POVM must share a dimension")
    diff = rho1 - rho2
    proj = operator_span(povm).project(diff)
    return float(np.linalg.norm(proj)) <= tol


@dataclass
class BipartiteComplement:
    """The three summands of the complement of a product POVM's span."""

    alice_perp_bob: OperatorSubspace  # R(A)^perp (x) R(B)
    alice_bob_perp: OperatorSubspace  # R(A) (x) R(B)^perp
    both_perp: OperatorSubspace  # R(A)^perp (x) R(B)^perp
    product_complement: OperatorSubspace
    report: dict = field(default_factory=dict)

    @property
    def summands(self) -> tuple[OperatorSubspace, OperatorSubspace, OperatorSubspace]:
        return self.alice_perp_bob, self.alice_bob_perp, self.both_perp

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(s.dim for s in self.summands)


def bipartite_complement(a: Povm, b: Povm, tol: float = DEFAULT_TOL) -> BipartiteComplement:
    from .povm import tensor_povm

    ra, rb = operator_span(a, tol), operator_span(b, tol)
    ca, cb = complement(ra, tol), complement(rb, tol)
    parts = (tensor_subspace(ca, rb), tensor_subspace(ra, cb), tensor_subspace(ca, cb))
    prod_perp = complement(operator_span(tensor_povm(a, b), tol), tol)
    cross = max(
        max_cross_inner(parts[0], parts[1]),
        max_cross_inner(parts[0], parts[2]),
        max_cross_inner(parts[1], parts[2]),
    )
    containment = max(max_projection_residual(p, prod_perp) for p in parts)
    expected = (a.dim * b.dim) ** 2 - ra.dim * rb.dim
    total = sum(p.dim for p in parts)
    report = {
        "max_cross_inner": cross,
        "max_containment_residual": containment,
        "dims": [p.dim for p in parts],
        "dim_sum": total,
        "expected_dim": expected,
        "product_complement_dim": prod_perp.dim,
        "orthogonal": cross <= 1e-9,
        "contained": containment <= 1e-9,
        "dims_match": total == expected == prod_perp.dim,
    }
    return BipartiteComplement(*parts, prod_perp, report)


@dataclass
class QutritClassification:
    """Which of the qutrit complement cases a POVM falls in.

    ``case`` is ``"ic"`` (empty complement), ``"full_rank_line"`` (complement
    spanned by one invertible traceless ``S``, the span-deficient pure-state
    complete case) or ``"other"`` (not pure-state complete).
    """

    case: str
    complement_dim: int
    generator: np.ndarray | None = None
    generator_eigenvalues: np.ndarray | None = None
    generator_eigenvectors: np.ndarray | None = None
    min_rank: float | None = None
    certificate: object = None

    @property
    def psic(self) -> bool:
        return self.case != "other"


def qutrit_classify(a: Povm, tol: float = DEFAULT_TOL, trials: int = 64, seed: int = 0) -> QutritClassification:
    if a.dim != 3:
        raise DimensionError(f"qutrit classification needs dim 3, got {a.dim}")
    perp = complement(operator_span(a, tol), tol)
    if perp.dim == 0:
        return QutritClassification("ic", 0, min_rank=float("inf"))
    if perp.dim == 1:
        s = perp.basis[0] / np.linalg.norm(perp.basis[0])
        r = rank_eps(s, tol)
        if r == 3:
            es = eigh(s)
            return QutritClassification(
                "full_rank_line", 1, s, es.eigenvalues, es.eigenvectors, min_rank=3
            )
        return QutritClassification("other", 1, s, min_rank=r)
    from .rank import min_rank_search

    cert = min_rank_search(perp, trials=trials, seed=seed, tol=tol)
    return QutritClassification("other", perp.dim, min_rank=cert.min_found, certificate=cert)
