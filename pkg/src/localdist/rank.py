"""Minimum rank and minimum rank-pm searches over matrix subspaces, and certification.

A POVM is pure-state complete iff no nonzero element of its span complement
has rank <= 2, and verifiably so iff every nonzero complement element has
``rank_pm >= 2``. Deciding either for a general subspace is a minimum-rank
problem, so answers come in two strengths: ``exact`` (empty or
one-dimensional complement, or a re-verified witness) and ``empirical``
(randomized search found nothing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from ._validation import check_positive_int, check_seed, check_tol
from .operators import DEFAULT_TOL, hs_norm, inertia, projector, rank_eps, rank_pm
from .povm import Povm, mixed_probabilities
from .span import OperatorSubspace, complement, operator_span

RANK = "rank"
RANK_PM = "rank_pm"
BORDERLINE_ENERGY = 1e-6

_rank_fn = {RANK: rank_eps, RANK_PM: rank_pm}


@dataclass
class RankCertificate:
    """Result of a minimum-rank (or minimum rank-pm) search over a subspace.

    ``min_found`` is ``math.inf`` for the zero subspace. ``objective`` is the
    smallest tail energy reached at the last target level that was tried; a
    value below ``BORDERLINE_ENERGY`` without a verified witness marks the
    search ``borderline``.
    """

    target: str
    min_found: float
    witness_coeffs: np.ndarray | None
    method: str
    trials: int
    tol: float
    witness: np.ndarray | None = None
    objective: float = float("nan")
    borderline: bool = False
    levels: list = field(default_factory=list)

    def reevaluate(self) -> int | float:
        if self.witness is None:
            return math.inf
        return _rank_fn[self.target](self.witness, self.tol)


def _check_target(target: str) -> str:
    if target not in (RANK, RANK_PM):
        raise ValueError(f"target must be {RANK!r} or {RANK_PM!r}, got {target!r}")
    return target


def _trivial_certificate(sub: OperatorSubspace, target: str, tol: float, method: str, trials: int):
    if sub.dim == 0:
        return RankCertificate(target, math.inf, None, method, trials, tol)
    if sub.dim == 1:
        coeffs = np.array([1.0])
        w = sub.element(coeffs)
        return RankCertificate(
            target, _rank_fn[target](w, tol), coeffs, "exact", trials, tol, witness=w, objective=0.0
        )
    return None


# --- objectives ----------------------------------------------------------


def _tail_indices(w: np.ndarray, target: str, level: int, side: int) -> np.ndarray:
    """Indices (into ascending ``w``) of the eigenvalues that must vanish.

    For ``rank`` these are the ``d - level`` smallest in magnitude; for
    ``rank_pm`` on side ``+1`` the positive eigenvalues beyond the ``level``
    largest (side ``-1`` mirrors this for negative ones).
    """
    d = len(w)
    if target == RANK:
        return np.argsort(np.abs(w), kind="stable")[: d - level]
    if side > 0:
        cand = np.arange(d - level - 1, -1, -1)  # descending order, skipping the top `level`
        return cand[w[cand] > 0]
    cand = np.arange(level, d)
    return cand[w[cand] < 0]


def _objective_batch(basis, coeffs, target, level):
    """Tail energy and its Euclidean gradient for a batch of coefficient vectors.

    For ``rank_pm`` the better of the two sign orientations is used per row.
    """
    t = np.tensordot(coeffs, basis, axes=1)
    w, v = np.linalg.eigh(t)
    n, d = w.shape
    if target == RANK:
        idx = np.argsort(np.abs(w), axis=1, kind="stable")[:, : d - level]
        tail_w = np.take_along_axis(w, idx, axis=1)
        tail_v = np.take_along_axis(v, idx[:, None, :], axis=2)
    else:
        # side +1: eigenvalues at descending positions >= level that are positive
        desc = w[:, ::-1]
        pos = np.where(desc[:, level:] > 0, desc[:, level:], 0.0)
        asc_neg = np.where(w[:, level:] < 0, w[:, level:], 0.0)
        e_pos = np.sum(pos**2, axis=1)
        e_neg = np.sum(asc_neg**2, axis=1)
        use_pos = e_pos <= e_neg
        tail_w = np.where(use_pos[:, None], pos, asc_neg)
        v_desc = v[:, :, ::-1][:, :, level:]
        v_asc = v[:, :, level:]
        tail_v = np.where(use_pos[:, None, None], v_desc, v_asc)
    energy = np.sum(tail_w**2, axis=1)
    # d lambda_j / d c_k = <v_j| B_k |v_j>, so grad_k = 2 sum_il B_k[i, l] Q[i, l]
    # with Q = sum_j lambda_j conj(v_j) v_j^T
    q = (tail_v.conj() * tail_w[:, None, :]) @ np.swapaxes(tail_v, 1, 2)
    grad = 2 * (q.reshape(n, -1) @ basis.reshape(len(basis), -1).T).real
    return energy, grad


def _descend(basis, starts, target, level, iters, step0):
    """Projected gradient descent on the unit sphere, one adaptive step per start."""
    c = starts.copy()
    f, g = _objective_batch(basis, c, target, level)
    step = np.full(len(c), step0)
    for _ in range(iters):
        g_t = g - np.sum(g * c, axis=1, keepdims=True) * c
        trial = c - step[:, None] * g_t
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        f_new, g_new = _objective_batch(basis, trial, target, level)
        better = f_new < f
        c = np.where(better[:, None], trial, c)
        f = np.where(better, f_new, f)
        g = np.where(better[:, None], g_new, g)
        step = np.where(better, step * 1.5, step / 2)
        if np.all((f < 1e-28) | (step < 1e-14)):
            break
    return c, f


def _block_residual(basis, c, target, level):
    t = np.tensordot(c, basis, axes=1)
    w, v = np.linalg.eigh(t)
    if target == RANK:
        idx = _tail_indices(w, target, level, +1)
    else:
        ip = _tail_indices(w, target, level, +1)
        im = _tail_indices(w, target, level, -1)
        idx = ip if np.sum(w[ip] ** 2) <= np.sum(w[im] ** 2) else im
    vt = v[:, idx]
    block = vt.conj().T @ t @ vt
    jac_blocks = vt.conj().T[None] @ basis @ vt[None]
    res = np.concatenate([block.real.ravel(), block.imag.ravel()])
    jac = np.concatenate(
        [jac_blocks.real.reshape(len(basis), -1), jac_blocks.imag.reshape(len(basis), -1)], axis=1
    ).T
    return res, jac


def _polish(basis, c, target, level, iters=40):
    """Gauss-Newton on the vanishing of the tail block, constrained to the sphere."""
    c = c / np.linalg.norm(c)
    res, jac = _block_residual(basis, c, target, level)
    f = float(res @ res)
    for _ in range(iters):
        if f < 1e-30:
            break
        a = np.vstack([jac, c[None]])
        b = np.concatenate([-res, [0.0]])
        delta = np.linalg.lstsq(a, b, rcond=None)[0]
        alpha = 1.0
        improved = False
        for _ in range(30):
            trial = c + alpha * delta
            trial /= np.linalg.norm(trial)
            r_t, j_t = _block_residual(basis, trial, target, level)
            f_t = float(r_t @ r_t)
            if f_t < f:
                c, res, jac, f = trial, r_t, j_t, f_t
                improved = True
                break
            alpha /= 2
        if not improved:
            break
    return c, f


def _randomized_search(sub, target, trials, seed, tol, levels, iters=200, step0=1e-2, n_polish=16):
    trials = check_positive_int(trials, "trials")
    seed = check_seed(seed)
    tol = check_tol(tol)
    rng = np.random.default_rng(seed)
    basis = sub.basis
    starts = rng.normal(size=(trials, sub.dim))
    starts /= np.linalg.norm(starts, axis=1, keepdims=True)
    rank_fn = _rank_fn[target]
    best = None  # (value, energy, index, coeffs)
    history = []
    last_energy = float("nan")
    for level in levels:
        c, f = _descend(basis, starts, target, level, iters, step0)
        order = np.lexsort((np.arange(trials), f))[: min(n_polish, trials)]
        polished = []
        for i in order:
            ci, fi = _polish(basis, c[i], target, level)
            polished.append((fi, int(i), ci))
        polished.sort(key=lambda p: (p[0], p[1]))
        last_energy = polished[0][0]
        history.append({"level": int(level), "energy": float(last_energy)})
        for fi, i, ci in polished:
            val = rank_fn(np.tensordot(ci, basis, axes=1), tol)
            key = (val, fi, i)
            if best is None or key < best[:3]:
                best = (val, fi, i, ci)
        if best[0] <= level:
            break
    val, _, _, coeffs = best
    witness = np.tensordot(coeffs, basis, axes=1)
    found_level = val <= levels[-1] if levels else False
    borderline = (not found_level) and last_energy < BORDERLINE_ENERGY
    return RankCertificate(
        target,
        int(val),
        coeffs / np.linalg.norm(coeffs),
        "randomized",
        trials,
        tol,
        witness=witness,
        objective=float(last_energy),
        borderline=bool(borderline),
        levels=history,
    )


def min_rank_search(
    sub: OperatorSubspace,
    trials: int = 64,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_target: int | None = None,
) -> RankCertificate:
    """Search for the least rank of a nonzero element of ``sub``.

    Target ranks ``1, 2, ..., max_target`` are tried in turn (default: up to
    ``d - 1``); each level runs ``trials`` seeded multi-start descents on the
    tail energy ``sum_{j>r} sigma_j(T(c))**2`` over the unit sphere followed
    by a Gauss-Newton polish. The search stops at the first level where a
    polished point has that rank at ``tol``. Otherwise ``min_found`` is the
    smallest rank seen, which is only an upper bound on the true minimum.
    """
    tol = check_tol(tol)
    triv = _trivial_certificate(sub, RANK, tol, "randomized", trials)
    if triv is not None:
        return triv
    d = sub.ambient_dim
    top = d - 1 if max_target is None else min(max_target, d - 1)
    return _randomized_search(sub, RANK, trials, seed, tol, list(range(1, top + 1)))


def min_rank_pm_search(
    sub: OperatorSubspace,
    trials: int = 64,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_target: int | None = None,
) -> RankCertificate:
    """Search for the least ``rank_pm`` of a nonzero element of ``sub``.

    Level ``r`` minimizes the energy of the positive eigenvalues beyond the
    ``r`` largest (or, whichever is smaller, of the negative ones beyond the
    ``r`` most negative); zero energy means ``rank_pm <= r``. Since ``T`` and
    ``-T`` have equal ``rank_pm`` both orientations are scored on every start.
    """
    tol = check_tol(tol)
    triv = _trivial_certificate(sub, RANK_PM, tol, "randomized", trials)
    if triv is not None:
        return triv
    d = sub.ambient_dim
    top = d // 2 - 1 if max_target is None else min(max_target, d // 2 - 1)
    return _randomized_search(sub, RANK_PM, trials, seed, tol, list(range(0, top + 1)))


# --- exhaustive oracle ---------------------------------------------------


def _batch_values(mats, target, tol):
    """Vectorized ``rank_eps`` / ``rank_pm`` over a stack of Hermitian matrices."""
    w = np.linalg.eigvalsh(mats)
    thr = tol * np.maximum(1.0, np.max(np.abs(w), axis=1))
    n_pos = np.sum(w > thr[:, None], axis=1)
    n_neg = np.sum(w < -thr[:, None], axis=1)
    return n_pos + n_neg if target == RANK else np.minimum(n_pos, n_neg)


def _circle_candidates(basis, n_points):
    """Grid angles plus every refined eigenvalue root and local |eigenvalue| minimum."""
    theta = np.linspace(0, 2 * np.pi, n_points, endpoint=False)
    b0, b1 = basis

    def eigs(th):
        return np.linalg.eigvalsh(np.cos(th) * b0 + np.sin(th) * b1)

    w = np.linalg.eigvalsh(np.cos(theta)[:, None, None] * b0 + np.sin(theta)[:, None, None] * b1)
    d = w.shape[1]
    cands = list(theta)
    roots = []
    h = theta[1] - theta[0]
    for j in range(d):
        lam = w[:, j]
        nxt = np.roll(lam, -1)
        for i in np.nonzero(np.sign(lam) * np.sign(nxt) < 0)[0]:
            lo = theta[i]
            root = brentq(lambda x: eigs(x)[j], lo, lo + h, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            roots.append(root % (2 * np.pi))
        mag = np.abs(lam)
        local_min = (mag <= np.roll(mag, 1)) & (mag <= np.roll(mag, -1))
        for i in np.nonzero(local_min)[0]:
            center = theta[i]
            res = minimize_scalar(
                lambda x: abs(eigs(center + x)[j]),
                bounds=(-h, h),
                method="bounded",
                options={"xatol": 1e-15},
            )
            roots.append((center + res.x) % (2 * np.pi))
    roots = sorted(roots)
    cands.extend(roots)
    cands.extend((a + b) / 2 for a, b in zip(roots, roots[1:]))
    return np.array(cands)


def _sphere_candidates(basis, n_points, target, tol):
    th = np.linspace(0, np.pi, n_points)
    ph = np.linspace(0, 2 * np.pi, 2 * n_points, endpoint=False)
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    coords = np.stack(
        [np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1
    ).reshape(-1, 3)
    d = basis.shape[1]
    levels = range(1, d) if target == RANK else range(0, d // 2)
    extra = []
    for level in levels:
        energy, _ = _objective_batch(basis, coords, target, level)
        for i in np.argsort(energy, kind="stable")[:20]:

            def tail(x, level=level):
                c = x / np.linalg.norm(x)
                e, _ = _objective_batch(basis, c[None], target, level)
                return float(np.sqrt(e[0]))

            res = minimize(tail, coords[i], method="Nelder-Mead", options={"xatol": 1e-13, "fatol": 1e-16})
            extra.append(res.x / np.linalg.norm(res.x))
    return np.vstack([coords, np.array(extra).reshape(-1, 3)])


def brute_force_min_rank(
    sub: OperatorSubspace,
    grid_points_per_angle: int = 3600,
    target: str = RANK,
    tol: float = DEFAULT_TOL,
) -> RankCertificate:
    """Exhaustive evaluation over a unit-sphere grid, for subspaces of dimension <= 3.

    On a two-dimensional subspace every sign change of a sorted eigenvalue
    between neighbouring grid angles is bracketed and solved with Brent's
    method, and local minima of each ``|eigenvalue|`` are refined, so isolated
    rank drops are not missed. Used as an independent cross-check only.
    """
    target = _check_target(target)
    tol = check_tol(tol)
    n = check_positive_int(grid_points_per_angle, "grid_points_per_angle", 4)
    if sub.dim > 3:
        raise ValueError(f"brute force supports subspaces of dimension <= 3, got {sub.dim}")
    triv = _trivial_certificate(sub, target, tol, "exhaustive", n)
    if triv is not None:
        triv.method = "exhaustive"
        return triv
    if sub.dim == 2:
        theta = _circle_candidates(sub.basis, n)
        coords = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    else:
        coords = _sphere_candidates(sub.basis, n, target, tol)
    mats = np.tensordot(coords, sub.basis, axes=1)
    values = _batch_values(mats, target, tol)
    i = int(np.argmin(values))
    return RankCertificate(
        target, int(values[i]), coords[i], "exhaustive", n, tol, witness=mats[i], objective=0.0
    )


# --- witnesses -----------------------------------------------------------


def psic_witness_states(t, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Two distinct pure states whose difference is proportional to ``t``.

    ``t`` must be traceless with rank 2, so its spectrum is ``{lam, -lam}``
    and ``t = lam (u u^dagger - v v^dagger)``.
    """
    t = np.asarray(t, dtype=complex)
    scale = max(1.0, hs_norm(t))
    if abs(np.trace(t)) > tol * scale:
        raise ValueError("witness generator must be traceless")
    if rank_eps(t, tol) != 2:
        raise ValueError(f"witness generator must have rank 2, got {rank_eps(t, tol)}")
    w, v = np.linalg.eigh((t + t.conj().T) / 2)
    return projector(v[:, -1]), projector(v[:, 0])


def vpsic_witness_states(t, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """A pure state and a different state (generally mixed) with difference in ``span{t}``.

    With the sign of ``t`` chosen so that exactly one eigenvalue ``lam_1`` is
    strictly positive (eigenvector ``u``), the pair is ``u u^dagger`` and
    ``u u^dagger - t / lam_1``.
    """
    t = np.asarray(t, dtype=complex)
    t = (t + t.conj().T) / 2
    if abs(np.trace(t)) > tol * max(1.0, hs_norm(t)):
        raise ValueError("witness generator must be traceless")
    n_pos, n_neg, _ = inertia(t, tol)
    if min(n_pos, n_neg) != 1:
        raise ValueError(f"witness generator must have rank_pm 1, got {min(n_pos, n_neg)}")
    if n_pos != 1:
        t = -t
    w, v = np.linalg.eigh(t)
    u = v[:, -1]
    pure = projector(u)
    sigma = pure - t / w[-1]
    sigma = (sigma + sigma.conj().T) / 2
    return pure, sigma


# --- certification -------------------------------------------------------

IC, PSIC, VPSIC = "IC", "PSIC", "VPSIC"


@dataclass
class CertificationReport:
    property: str
    holds: str  # "yes" | "no" | "undetermined"
    strength: str  # "exact" | "empirical"
    span_dim: int
    complement_dim: int
    reason: str
    certificate: RankCertificate | None = None
    oracle: RankCertificate | None = None
    witnesses: tuple | None = None
    witness_distance: float | None = None


def _witness_distance(povm: Povm, pair) -> float:
    p = mixed_probabilities(povm, np.array(pair))
    return float(np.max(np.abs(p[0] - p[1])))


def _ic_witness(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = t.shape[0]
    shift = t / (d * np.linalg.norm(t, 2))
    return np.eye(d) / d + shift, np.eye(d) / d - shift


def certify_povm(
    povm: Povm,
    prop: str,
    trials: int = 64,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    oracle_grid: int | None = None,
) -> CertificationReport:
    """Decide ``IC``, ``PSIC`` or ``VPSIC`` for a POVM.

    IC is decided exactly from the span dimension. PSIC and VPSIC are exact
    when the complement has dimension <= 1 or when a rank witness is found
    and re-verified; otherwise the randomized search (cross-checked by the
    grid oracle for complements of dimension <= 3) gives an empirical yes,
    or ``undetermined`` if it got suspiciously close to a witness.
    """
    if prop not in (IC, PSIC, VPSIC):
        raise ValueError(f"unknown property {prop!r}")
    span = operator_span(povm, tol)
    perp = complement(span, tol)
    common = dict(span_dim=span.dim, complement_dim=perp.dim)

    if perp.dim == 0:
        return CertificationReport(prop, "yes", "exact", reason="complement is {0}", **common)

    if prop == IC:
        pair = _ic_witness(perp.basis[0])
        return CertificationReport(
            prop, "no", "exact", reason=f"span dimension {span.dim} < {povm.dim ** 2}",
            witnesses=pair, witness_distance=_witness_distance(povm, pair), **common,
        )

    target, limit = (RANK, 2) if prop == PSIC else (RANK_PM, 1)
    make = psic_witness_states if prop == PSIC else vpsic_witness_states
    if povm.dim <= (2 if prop == PSIC else 3):
        # traceless and nonzero: rank <= 2 in dim 2, rank_pm <= 1 in dim <= 3
        g = perp.basis[0]
        cert = _trivial_certificate(OperatorSubspace(povm.dim, g[None]), target, tol, "exact", 0)
        pair = make(g, tol)
        return CertificationReport(
            prop, "no", "exact", reason=f"every nonzero complement element in dim {povm.dim} has {target} <= {limit}",
            certificate=cert, witnesses=pair, witness_distance=_witness_distance(povm, pair), **common,
        )
    search = min_rank_search if prop == PSIC else min_rank_pm_search
    cert = search(perp, trials=trials, seed=seed, tol=tol, max_target=limit)
    oracle = None
    if 2 <= perp.dim <= 3 and cert.min_found > limit:
        grid = oracle_grid or (3600 if perp.dim == 2 else 60)
        oracle = brute_force_min_rank(perp, grid, target, tol)
        if oracle.min_found < cert.min_found:
            cert, oracle = oracle, cert
    exact = cert.method in ("exact", "exhaustive") and perp.dim == 1

    if cert.min_found <= limit:
        pair = make(cert.witness, tol)
        return CertificationReport(
            prop, "no", "exact", reason=f"complement element with {target} {cert.min_found}",
            certificate=cert, oracle=oracle, witnesses=pair,
            witness_distance=_witness_distance(povm, pair), **common,
        )
    if exact:
        return CertificationReport(
            prop, "yes", "exact", reason=f"one-dimensional complement, generator {target} {cert.min_found}",
            certificate=cert, **common,
        )
    if cert.borderline:
        return CertificationReport(
            prop, "undetermined", "empirical",
            reason=f"search tail energy {cert.objective:.3e} is borderline",
            certificate=cert, oracle=oracle, **common,
        )
    return CertificationReport(
        prop, "yes", "empirical", reason=f"no complement element with {target} <= {limit} found",
        certificate=cert, oracle=oracle, **common,
    )
