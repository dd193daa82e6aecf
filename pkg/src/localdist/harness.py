"""Numerical verification of the local-distinguishability results for product POVMs.

Each ``check_*`` function builds a concrete instance from a seed, runs a list
of named checks and returns a :class:`PropositionReport`. Normal runs are
expected to come out ``consistent``; probe runs (a deliberately corrupted
factor) are expected to come out ``refuted`` with an explicit witness pair.
Anything else is a ``violation-candidate`` and carries enough data to
reproduce it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from ._validation import check_seed
from .operators import (
    DEFAULT_TOL,
    compress,
    inertia,
    projector,
    random_hermitian,
    rank_eps,
    rank_pm,
)
from .povm import (
    Povm,
    diag_complement_povm,
    povm_with_complement,
    mixed_probabilities,
    pure_probabilities,
    qutrit_case_ii,
    random_povm,
    sic_qubit,
    tensor_povm,
    tensor_povm_n,
)
from .rank import PSIC, VPSIC, IC, certify_povm, min_rank_pm_search, min_rank_search
from .span import (
    OperatorSubspace,
    bipartite_complement,
    complement,
    full_space,
    is_ic,
    max_cross_inner,
    max_projection_residual,
    operator_span,
    qutrit_classify,
    tensor_subspace,
)

MAX_PRODUCT_DIM = 36
DISTINCT_STATS = 1e-9
SAME_STATE_FIDELITY = 1 - 1e-12
EQUAL_STATS = 1e-9

CONSISTENT = "consistent"
REFUTED = "refuted"
VIOLATION = "violation-candidate"


class BudgetExceeded(ValueError):
    pass


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "margin": float(self.margin), **self.detail}


@dataclass
class PropositionReport:
    proposition: str
    instance: dict
    seed: int
    checks: list[Check] = field(default_factory=list)
    expect: str = CONSISTENT
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def verdict(self) -> str:
        return self.expect if self.passed else VIOLATION

    def add(self, name: str, passed: bool, margin: float, **detail) -> Check:
        check = Check(name, bool(passed), float(margin), detail)
        self.checks.append(check)
        return check

    def extend(self, other: "PropositionReport", prefix: str) -> None:
        for c in other.checks:
            self.checks.append(Check(f"{prefix}{c.name}", c.passed, c.margin, c.detail))
        self.witnesses.update({f"{prefix}{k}": v for k, v in other.witnesses.items()})

    def to_dict(self) -> dict:
        out = {
            "proposition": self.proposition,
            "instance": self.instance,
            "checks": [c.to_dict() for c in self.checks],
            "seed": self.seed,
            "verdict": self.verdict,
        }
        if self.witnesses:
            out["witnesses"] = {k: _encode_pair(v) for k, v in self.witnesses.items()}
        return out


def _encode_pair(pair) -> list:
    return [[[[float(z.real), float(z.imag)] for z in row] for row in m] for m in pair]


# --- instance builders -----------------------------------------------------


def ic_povm(d: int, seed: int) -> Povm:
    """Random informationally complete POVM with ``d**2 + 2`` outcomes."""
    for k in range(20):
        povm = random_povm(d, d * d + 2, seed + 1000 * k)
        if is_ic(povm)[0]:
            return povm
    raise RuntimeError("could not draw an informationally complete POVM")


def _padded(values, d: int) -> np.ndarray:
    diag = np.zeros(d)
    diag[: len(values)] = values
    return diag


def psic_povm(d: int, s=None) -> Povm:
    """Pure-state complete reference POVM: IC for qubits, span-deficient otherwise."""
    if d == 2:
        return sic_qubit()
    if d == 3:
        return qutrit_case_ii((1.0, 1.0, -2.0) if s is None else s)
    return diag_complement_povm(_padded([1, 1, -1, -1], d))


def vpsic_povm(d: int) -> Povm:
    """Complement spanned by ``diag(1, 1, -1, -1, 0, ...)``: VPSIC but not IC for d >= 4."""
    if d < 4:
        raise ValueError("span-deficient VPSIC POVMs need dimension >= 4")
    return diag_complement_povm(_padded([1, 1, -1, -1], d))


def non_psic_povm(d: int) -> Povm:
    """Complement spanned by ``diag(1, -1, 0, ...)``, which has rank 2."""
    return diag_complement_povm(_padded([1, -1], d))


def non_vpsic_povm(d: int) -> Povm:
    """Complement spanned by ``diag(2, -1, -1, 0, ...)`` (rank 3, rank_pm 1)."""
    return diag_complement_povm(_padded([2, -1, -1], d))


def _check_budget(*dims: int) -> int:
    total = math.prod(dims)
    if total > MAX_PRODUCT_DIM:
        raise BudgetExceeded(f"product dimension {total} exceeds the budget of {MAX_PRODUCT_DIM}")
    return total


# --- shared checks -----------------------------------------------------------


def _pure_pairs(povm: Povm, n_pairs: int, rng) -> tuple[float, int]:
    """Smallest statistics distance over random pure pairs, and how many were skipped."""
    d = povm.dim
    z = rng.normal(size=(2 * n_pairs, d)) + 1j * rng.normal(size=(2 * n_pairs, d))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    psi, phi = z[:n_pairs], z[n_pairs:]
    fid = np.abs(np.sum(psi.conj() * phi, axis=1)) ** 2
    keep = fid < SAME_STATE_FIDELITY
    p = pure_probabilities(povm, psi[keep])
    q = pure_probabilities(povm, phi[keep])
    dist = np.max(np.abs(p - q), axis=1)
    return float(dist.min()), int(n_pairs - keep.sum())


def _pure_mixed_pairs(povm: Povm, n_pairs: int, rng) -> float:
    d = povm.dim
    z = rng.normal(size=(n_pairs, d)) + 1j * rng.normal(size=(n_pairs, d))
    p = pure_probabilities(povm, z)
    ranks = rng.integers(2, d + 1, size=n_pairs)
    g = rng.normal(size=(n_pairs, d, d)) + 1j * rng.normal(size=(n_pairs, d, d))
    # zero out columns beyond each sample's rank so every mixed state has rank >= 2
    g = g * (np.arange(d)[None, None, :] < ranks[:, None, None])
    rhos = g @ np.swapaxes(g, 1, 2).conj()
    rhos /= np.trace(rhos, axis1=1, axis2=2).real[:, None, None]
    q = mixed_probabilities(povm, rhos)
    return float(np.max(np.abs(p - q), axis=1).min())


def _add_pure_pair_check(report, povm, n_pairs, rng):
    dmin, skipped = _pure_pairs(povm, n_pairs, rng)
    report.add("pure_pairs_distinguished", dmin > DISTINCT_STATS, dmin - DISTINCT_STATS,
               n_pairs=n_pairs, skipped_equal=skipped, min_distance=dmin)


def _add_min_rank_check(report, perp, trials, seed, tol):
    cert = min_rank_search(perp, trials=trials, seed=seed, tol=tol, max_target=2)
    ok = cert.min_found >= 3 and not cert.borderline
    report.add("randomized_min_rank_ge_3", ok, cert.objective,
               min_found=float(cert.min_found), complement_dim=perp.dim, trials=trials)
    if not ok and cert.witness is not None and cert.min_found == 2:
        from .rank import psic_witness_states

        report.witnesses["search_witness"] = psic_witness_states(cert.witness, tol)
    return cert


def lift_witness(pair, factor_dims, position: int):
    """Embed a factor witness pair, padding other factors with ``|0><0|``."""
    pads = [projector(np.eye(d)[0]) for d in factor_dims]
    out = []
    for rho in pair:
        mats = list(pads)
        mats[position] = rho
        out.append(reduce(np.kron, mats))
    return tuple(out)


def _add_lifted_witness_check(report, name, factor_povms, position, prop=PSIC, seed=0, trials=64, tol=DEFAULT_TOL):
    """Certify the corrupted factor, lift its witness, confirm equal product statistics."""
    factor = factor_povms[position]
    cert = certify_povm(factor, prop, trials=trials, seed=seed, tol=tol)
    if cert.holds != "no":
        report.add(name, False, float("nan"), reason="factor witness not found")
        return None
    pair = lift_witness(cert.witnesses, [p.dim for p in factor_povms], position)
    product = tensor_povm_n(factor_povms)
    p = mixed_probabilities(product, np.array(pair))
    dist = float(np.max(np.abs(p[0] - p[1])))
    separation = float(np.linalg.norm(pair[0] - pair[1]))
    report.add(name, dist <= EQUAL_STATS and separation > 1e-6, EQUAL_STATS - dist,
               statistics_distance=dist, state_separation=separation)
    report.witnesses[name] = pair
    return pair


# --- closed forms ------------------------------------------------------------


def product_min_rank(d_a: int, g, tol: float = DEFAULT_TOL) -> int:
    """Least rank over nonzero ``M (x) G`` with ``M`` Hermitian on ``C^d_a``: ``rank(G)``."""
    return rank_eps(g, tol)


def product_min_rank_pm(d_a: int, g, tol: float = DEFAULT_TOL) -> int:
    """Least ``rank_pm`` over nonzero ``M (x) G`` from the inertias of ``M`` and ``G``.

    ``M (x) G`` has ``p_M p_G + n_M n_G`` positive and ``p_M n_G + n_M p_G``
    negative eigenvalues; minimize over all admissible ``(p_M, n_M)``.
    """
    p_g, n_g, _ = inertia(g, tol)
    best = math.inf
    for p_m in range(d_a + 1):
        for n_m in range(d_a + 1 - p_m):
            if p_m + n_m == 0:
                continue
            best = min(best, p_m * p_g + n_m * n_g, p_m * n_g + n_m * p_g)
    return int(best)


# --- interlacing and proof machinery ----------------------------------------


def check_interlacing(t, block_cols, seed: int = 0, slack: float = 1e-9) -> Check:
    """Cauchy interlacing for the compression of ``t`` onto ``block_cols``.

    ``block_cols`` is a list of standard-basis indices, a matrix of
    orthonormal columns, or an integer ``k`` for a seeded random isometry
    with ``k`` columns. Also checks that ``rank_pm`` of the compression
    bounds ``rank_pm(t)`` from below whenever it is at least 2.
    """
    t = np.asarray(t, dtype=complex)
    n = t.shape[0]
    if isinstance(block_cols, (int, np.integer)):
        rng = np.random.default_rng(check_seed(seed))
        g = rng.normal(size=(n, block_cols)) + 1j * rng.normal(size=(n, block_cols))
        block_cols = np.linalg.qr(g)[0]
    cols = np.asarray(block_cols)
    if cols.ndim == 1:
        if len(set(cols.tolist())) != len(cols) or cols.min() < 0 or cols.max() >= n:
            raise ValueError("block_cols must be distinct indices into the matrix")
        cols = np.eye(n)[:, cols]
    k = cols.shape[1]
    if not 1 <= k <= n:
        raise ValueError("bad block selection")
    c = compress(t, cols)
    lam = np.linalg.eigvalsh(t)[::-1]
    mu = np.linalg.eigvalsh(c)[::-1]
    upper = lam[:k] - mu
    lower = mu - lam[n - k :]
    margin = float(min(upper.min(), lower.min()))
    ok = margin >= -slack
    rp_c, rp_t = rank_pm(c), rank_pm(t)
    implication = rp_c < 2 or rp_t >= 2
    return Check("interlacing", ok and implication, margin,
                 {"rank_pm_compression": rp_c, "rank_pm_full": rp_t})


def interlacing_suite(n_draws: int = 1000, seed: int = 0, slack: float = 1e-9) -> PropositionReport:
    """Random ``(T, block)`` draws: coordinate blocks and random isometries."""
    rng = np.random.default_rng(check_seed(seed))
    report = PropositionReport("interlacing", {"n_draws": n_draws}, seed)
    worst, failures = math.inf, 0
    for i in range(n_draws):
        d_a, d_b = rng.integers(2, 4), rng.integers(2, 5)
        n = int(d_a * d_b)
        t = random_hermitian(n, rng)
        if i % 2 == 0:
            j = rng.integers(d_a)
            cols = np.arange(j * d_b, (j + 1) * d_b)
        else:
            g = rng.normal(size=(n, d_b)) + 1j * rng.normal(size=(n, d_b))
            cols = np.linalg.qr(g)[0]
        chk = check_interlacing(t, cols, slack=slack)
        worst = min(worst, chk.margin)
        failures += not chk.passed
    report.add("interlacing_random_draws", failures == 0, worst, failures=failures)
    return report


def _u_block(alpha: float, beta: float, n: int) -> np.ndarray:
    e = np.eye(n)
    ea, eb = np.exp(1j * alpha), np.exp(1j * beta)
    r2, r3 = np.sqrt(2), np.sqrt(3)
    return np.block([
        [r2 * e, r2 * ea * e, r2 * eb * e],
        [r3 * e, 0 * e, -r3 * eb * e],
        [e, -2 * ea * e, eb * e],
    ]) / np.sqrt(6)


def _re(x):
    return (x + x.conj().T) / 2


def _im(x):
    return (x - x.conj().T) / 2j


TRIG_GRID = (0.0, 0.9, 1.7, 2.6, 3.5, 4.3, 5.2)


def trig_gram_rank(grid=TRIG_GRID) -> int:
    """Rank of the seven functions ``1, cos a, sin a, cos b, sin b, cos(b-a), sin(b-a)`` on a grid."""
    a, b = np.meshgrid(np.asarray(grid), np.asarray(grid), indexing="ij")
    a, b = a.ravel(), b.ravel()
    f = np.stack([np.ones_like(a), np.cos(a), np.sin(a), np.cos(b), np.sin(b), np.cos(b - a), np.sin(b - a)], axis=1)
    gram = f.T @ f
    s = np.linalg.svd(gram, compute_uv=False)
    return int(np.sum(s > 1e-10 * s[0]))


def check_proof_unitaries(seed: int = 0, n_angles: int = 20) -> PropositionReport:
    """Unitarity and conjugation identities used in the product-rank arguments."""
    rng = np.random.default_rng(check_seed(seed))
    report = PropositionReport("proof-machinery", {"n_angles": n_angles}, seed)

    # block structure over a span-deficient d_B = 3 measurement
    b = random_povm(3, 5, seed)
    perp = complement(operator_span(b))
    n = 3
    angles = [(0.3, 1.1)] + [tuple(rng.uniform(0, 2 * np.pi, 2)) for _ in range(n_angles)]
    unitarity = max(
        np.max(np.abs(_u_block(a, bb, n) @ _u_block(a, bb, n).conj().T - np.eye(3 * n))) for a, bb in angles
    )
    report.add("u_unitary", unitarity <= 1e-12, 1e-12 - unitarity, max_deviation=float(unitarity))

    s = rng.normal(size=3)
    s -= s.mean()
    worst = 0.0
    for alpha, beta in angles:
        el = random_hermitian(n, rng)
        rs = [perp.element(rng.normal(size=perp.dim)) for _ in range(3)]
        offd = {(j, k): perp.element(rng.normal(size=perp.dim)) + 1j * perp.element(rng.normal(size=perp.dim))
                for j in range(3) for k in range(j)}
        blocks = [[None] * 3 for _ in range(3)]
        for j in range(3):
            blocks[j][j] = s[j] * el + rs[j]
        for (j, k), x in offd.items():
            blocks[j][k] = x
            blocks[k][j] = x.conj().T
        t = np.block(blocks)
        u = _u_block(alpha, beta, n)
        direct = (u @ t @ u.conj().T)[:n, :n]
        t21, t31, t32 = offd[(1, 0)], offd[(2, 0)], offd[(2, 1)]
        formula = sum(rs) / 3 + (2 / 3) * (
            _re(t21) * np.cos(alpha) - _im(t21) * np.sin(alpha)
            + _re(t31) * np.cos(beta) - _im(t31) * np.sin(beta)
            + _re(t32) * np.cos(beta - alpha) - _im(t32) * np.sin(beta - alpha)
        )
        worst = max(worst, float(np.max(np.abs(direct - formula))))
    report.add("t11_formula", worst <= 1e-10, 1e-10 - worst, max_deviation=worst)

    # 2x2 off-diagonal block identities
    e = np.eye(n)
    v = np.block([[e, -1j * e], [-1j * e, e]]) / np.sqrt(2)
    w = np.block([[e, -e], [e, e]]) / np.sqrt(2)
    dev, rank_ok = 0.0, True
    for _ in range(n_angles):
        x = perp.element(rng.normal(size=perp.dim)) + 1j * perp.element(rng.normal(size=perp.dim))
        tt = np.block([[0 * e, x], [x.conj().T, 0 * e]])
        re, im = _re(x), _im(x)
        t0 = np.block([[im, re], [re, -im]])
        t_plus = np.block([[re, 1j * im], [-1j * im, -re]])
        dev = max(dev, np.max(np.abs(v @ t0 @ v.conj().T - tt)), np.max(np.abs(w @ t_plus @ w.conj().T - tt)))
        rank_ok &= rank_eps(tt) == rank_eps(t0) >= max(rank_eps(re), rank_eps(im))
        rank_ok &= rank_pm(t_plus) >= rank_pm(re) and rank_pm(t0) >= rank_pm(im)
    report.add("v_conjugation", dev <= 1e-12 and rank_ok, 1e-12 - dev, max_deviation=float(dev), rank_bounds=bool(rank_ok))

    r = trig_gram_rank()
    report.add("trig_independence", r == 7, r - 6, gram_rank=r)
    return report


# --- propositions ------------------------------------------------------------


def _complement_equals(target: OperatorSubspace, expected: OperatorSubspace) -> tuple[bool, float]:
    res = max(max_projection_residual(expected, target), max_projection_residual(target, expected))
    return target.dim == expected.dim and res <= 1e-9, res


def check_prop1(dims=(2, 3), seed: int = 0, corrupt_b: bool = False, n_pairs: int = 10_000,
                trials: int = 64, tol: float = DEFAULT_TOL) -> PropositionReport:
    """IC on one side and pure-state completeness on the other give a pure-state complete product."""
    d_a, d_b = dims
    if d_a not in (2, 3) or d_b not in (3, 4):
        raise ValueError("check_prop1 supports d_A in {2, 3} and d_B in {3, 4}")
    seed = check_seed(seed)
    rng = np.random.default_rng(seed)
    a = ic_povm(d_a, seed)
    b = non_psic_povm(d_b) if corrupt_b else psic_povm(d_b)
    report = PropositionReport(
        "1", {"dims": [d_a, d_b], "a": "random-ic", "b": "non-psic" if corrupt_b else "psic", "n_pairs": n_pairs},
        seed, expect=REFUTED if corrupt_b else CONSISTENT,
    )
    ab = tensor_povm(a, b)
    perp = complement(operator_span(ab, tol), tol)
    if corrupt_b:
        _add_lifted_witness_check(report, "lifted_witness", [a, b], 1, PSIC, seed, trials, tol)
        cert = min_rank_search(perp, trials=trials, seed=seed, tol=tol, max_target=2)
        report.add("product_search_finds_rank_2", cert.min_found <= 2, 2 - cert.min_found,
                   min_found=float(cert.min_found))
        return report

    report.add("a_informationally_complete", is_ic(a, tol)[0], 0.0)
    cb = certify_povm(b, PSIC, trials=trials, seed=seed, tol=tol)
    report.add("b_pure_state_complete", cb.holds == "yes", 0.0, strength=cb.strength)
    rb_perp = complement(operator_span(b, tol), tol)
    ok, res = _complement_equals(perp, tensor_subspace(full_space(d_a), rb_perp))
    report.add("complement_is_full_tensor_b_perp", ok, 1e-9 - res, residual=res, dim=perp.dim)
    if rb_perp.dim == 1:
        mr = product_min_rank(d_a, rb_perp.basis[0], tol)
        report.add("closed_form_min_rank_ge_3", mr >= 3, mr - 2, min_rank=mr)
    _add_min_rank_check(report, perp, trials, seed, tol)
    _add_pure_pair_check(report, ab, n_pairs, rng)
    return report


def check_prop2(d_b: int = 3, seed: int = 0, s=(1.0, 1.0, -2.0), corrupt_a: bool = False,
                n_pairs: int = 10_000, trials: int = 64, tol: float = DEFAULT_TOL) -> PropositionReport:
    """Qutrit on one side: the product is pure-state complete iff both factors are."""
    if d_b not in (3, 4):
        raise ValueError("check_prop2 supports d_B in {3, 4}")
    seed = check_seed(seed)
    rng = np.random.default_rng(seed)
    s = tuple(float(x) for x in s)
    a = non_psic_povm(3) if corrupt_a else qutrit_case_ii(s)
    b = psic_povm(d_b)
    report = PropositionReport(
        "2", {"d_b": d_b, "s": list(s), "a": "non-psic" if corrupt_a else "case-ii", "n_pairs": n_pairs},
        seed, expect=REFUTED if corrupt_a else CONSISTENT,
    )
    if corrupt_a:
        cls = qutrit_classify(a, tol, trials, seed)
        report.add("a_not_pure_state_complete", not cls.psic, 0.0, case=cls.case)
        _add_lifted_witness_check(report, "lifted_witness", [a, b], 0, PSIC, seed, trials, tol)
        return report

    cls = qutrit_classify(a, tol, trials, seed)
    sdiag = cls.generator_eigenvalues if cls.generator_eigenvalues is not None else np.full(3, np.nan)
    trace_gap = abs(float(sdiag.sum()))
    report.add("a_case_ii", cls.case == "full_rank_line" and trace_gap <= 1e-9, 1e-9 - trace_gap, case=cls.case)
    cb = certify_povm(b, PSIC, trials=trials, seed=seed, tol=tol)
    report.add("b_pure_state_complete", cb.holds == "yes", 0.0, strength=cb.strength)

    ab = tensor_povm(a, b)
    perp = complement(operator_span(ab, tol), tol)
    s_line = OperatorSubspace(3, cls.generator[None])
    rb = operator_span(b, tol)
    first = tensor_subspace(s_line, full_space(d_b))
    second = tensor_subspace(operator_span(a, tol), complement(rb, tol))
    cross = max_cross_inner(first, second)
    contained = max(max_projection_residual(first, perp), max_projection_residual(second, perp))
    dims_ok = first.dim + second.dim == perp.dim
    report.add("qutrit_product_decomposition", cross <= 1e-9 and contained <= 1e-9 and dims_ok,
               1e-9 - max(cross, contained), dims=[first.dim, second.dim], complement_dim=perp.dim)
    _add_min_rank_check(report, perp, trials, seed, tol)
    _add_pure_pair_check(report, ab, n_pairs, rng)
    _add_lifted_witness_check(report, "converse_lifted_witness", [non_psic_povm(3), b], 0, PSIC, seed, trials, tol)
    return report


def check_prop3(dims=(2, 4), seed: int = 0, probe: str | None = None, n_pairs: int = 10_000,
                trials: int = 64, tol: float = DEFAULT_TOL) -> PropositionReport:
    """IC on one side and verifiable pure-state completeness on the other.

    ``probe`` selects an expected-failure instance: ``"qutrit-a"`` replaces
    the IC factor by a span-deficient qutrit, ``"non-vpsic-b"`` gives the
    second factor a rank_pm-1 complement.
    """
    d_a, d_b = dims
    if d_b < 4:
        raise ValueError("check_prop3 needs d_B >= 4")
    if probe not in (None, "qutrit-a", "non-vpsic-b"):
        raise ValueError(f"unknown probe {probe!r}")
    _check_budget(d_a, d_b)
    seed = check_seed(seed)
    rng = np.random.default_rng(seed)
    if probe == "qutrit-a":
        d_a = 3
        a = qutrit_case_ii()
    else:
        a = ic_povm(d_a, seed)
    b = non_vpsic_povm(d_b) if probe == "non-vpsic-b" else vpsic_povm(d_b)
    report = PropositionReport(
        "3", {"dims": [d_a, d_b], "probe": probe, "n_pairs": n_pairs}, seed,
        expect=REFUTED if probe else CONSISTENT,
    )
    ab = tensor_povm(a, b)
    perp = complement(operator_span(ab, tol), tol)

    if probe == "qutrit-a":
        cert = min_rank_pm_search(perp, trials=trials, seed=seed, tol=tol, max_target=1)
        report.add("rank_pm_1_element_found", cert.min_found <= 1, 1 - cert.min_found,
                   min_found=float(cert.min_found))
        _add_lifted_witness_check(report, "lifted_witness", [a, b], 0, VPSIC, seed, trials, tol)
        return report
    if probe == "non-vpsic-b":
        _add_lifted_witness_check(report, "lifted_witness", [a, b], 1, VPSIC, seed, trials, tol)
        return report

    report.add("a_informationally_complete", is_ic(a, tol)[0], 0.0)
    cb = certify_povm(b, VPSIC, trials=trials, seed=seed, tol=tol)
    report.add("b_verifiably_pure_state_complete", cb.holds == "yes" and cb.complement_dim > 0, 0.0,
               strength=cb.strength, complement_dim=cb.complement_dim)
    g_line = complement(operator_span(b, tol), tol)
    ok, res = _complement_equals(perp, tensor_subspace(full_space(d_a), g_line))
    report.add("complement_is_full_tensor_g", ok, 1e-9 - res, residual=res, dim=perp.dim)
    mr = product_min_rank_pm(d_a, g_line.basis[0], tol)
    report.add("closed_form_min_rank_pm_eq_2", mr == 2, mr - 1, min_rank_pm=mr)
    cert = min_rank_pm_search(perp, trials=trials, seed=seed, tol=tol, max_target=1)
    ok = cert.min_found >= 2 and not cert.borderline
    report.add("randomized_min_rank_pm_ge_2", ok, cert.objective, min_found=float(cert.min_found))
    dmin = _pure_mixed_pairs(ab, n_pairs, rng)
    report.add("pure_mixed_pairs_distinguished", dmin > DISTINCT_STATS, dmin - DISTINCT_STATS,
               n_pairs=n_pairs, min_distance=dmin)
    worst, bad = math.inf, 0
    for _ in range(20):
        t = perp.element(rng.normal(size=perp.dim))
        for i in range(d_a):
            chk = check_interlacing(t, np.arange(i * d_b, (i + 1) * d_b))
            worst = min(worst, chk.margin)
            bad += not chk.passed
    report.add("interlacing_on_complement", bad == 0, worst, failures=bad)
    return report


def check_prop4(seed: int = 0, n_pairs: int = 10_000, trials: int = 64, tol: float = DEFAULT_TOL) -> PropositionReport:
    """Qutrit on one side: verifiable pure-state completeness reduces to IC."""
    seed = check_seed(seed)
    report = PropositionReport("4", {"n_pairs": n_pairs}, seed)
    for name, a in (("case_ii", qutrit_case_ii()), ("ic", ic_povm(3, seed))):
        v = certify_povm(a, VPSIC, trials=trials, seed=seed, tol=tol)
        c = certify_povm(a, IC, trials=trials, seed=seed, tol=tol)
        report.add(f"qutrit_{name}_vpsic_equals_ic", v.holds == c.holds, 0.0, vpsic=v.holds, ic=c.holds)
        if name == "case_ii":
            s = complement(operator_span(a, tol), tol).basis[0]
            report.add("case_ii_generator_rank_pm_1", rank_pm(s, tol) == 1, 0.0)
    report.extend(check_prop3((3, 4), seed, n_pairs=n_pairs, trials=trials, tol=tol), "prop3:")
    return report


_QUTRIT_S = ((1.0, 1.0, -2.0), (1.0, 2.0, -3.0))


def _factor_povms(factors) -> list[Povm]:
    out, n_qutrits = [], 0
    for f in factors:
        if f == 2:
            out.append(sic_qubit())
        elif f == 3:
            out.append(qutrit_case_ii(_QUTRIT_S[n_qutrits % 2]))
            n_qutrits += 1
        else:
            raise ValueError(f"factors must be 2 or 3, got {f}")
    return out


def _multipartite_checks(report, parts, seed, n_pairs, trials, tol, rng):
    product = tensor_povm_n(parts)
    span_dims = [operator_span(p, tol).dim for p in parts]
    r = operator_span(product, tol).dim
    report.add("span_dimension_multiplicative", r == math.prod(span_dims), 0.0,
               span_dim=r, factor_span_dims=span_dims)
    perp = complement(operator_span(product, tol), tol)
    expected = product.dim**2 - math.prod(span_dims)
    report.add("complement_dimension", perp.dim == expected, 0.0, complement_dim=perp.dim, expected=expected)
    _add_min_rank_check(report, perp, trials, seed, tol)
    _add_pure_pair_check(report, product, n_pairs, rng)
    for i, f in enumerate(parts):
        corrupted = list(parts)
        corrupted[i] = non_psic_povm(f.dim)
        _add_lifted_witness_check(report, f"converse_factor_{i}", corrupted, i, PSIC, seed, trials, tol)


def check_multipartite(factors, seed: int = 0, corrupt: int | None = None, n_pairs: int = 10_000,
                       trials: int = 64, tol: float = DEFAULT_TOL) -> PropositionReport:
    """Tensor products of qubit and qutrit pure-state complete POVMs."""
    factors = [int(f) for f in factors]
    if len(factors) < 2:
        raise ValueError("need at least two factors")
    _check_budget(*factors)
    seed = check_seed(seed)
    rng = np.random.default_rng(seed)
    parts = _factor_povms(factors)
    report = PropositionReport("multi", {"factors": factors, "corrupt": corrupt, "n_pairs": n_pairs}, seed,
                               expect=REFUTED if corrupt is not None else CONSISTENT)
    if corrupt is not None:
        if not 0 <= corrupt < len(parts):
            raise ValueError("corrupt index out of range")
        parts[corrupt] = non_psic_povm(factors[corrupt])
        _add_lifted_witness_check(report, "lifted_witness", parts, corrupt, PSIC, seed, trials, tol)
        return report
    _multipartite_checks(report, parts, seed, n_pairs, trials, tol, rng)
    return report


def factor_dims(d: int) -> list[int]:
    """Split ``d = 2**n 3**m`` into qubit and qutrit factors."""
    out = []
    for p in (2, 3):
        while d % p == 0:
            out.append(p)
            d //= p
    if d != 1:
        raise ValueError("dimension has prime factors other than 2 and 3")
    return out


def check_factorized_dims(n_a: int, m_a: int, n_b: int, m_b: int, seed: int = 0, n_pairs: int = 10_000,
                          trials: int = 64, tol: float = DEFAULT_TOL) -> PropositionReport:
    """``d_A = 2**n_a 3**m_a``, ``d_B = 2**n_b 3**m_b`` with factorized pure-state complete POVMs."""
    fa = [2] * n_a + [3] * m_a
    fb = [2] * n_b + [3] * m_b
    if not fa or not fb:
        raise ValueError("both sides need at least one factor")
    _check_budget(*fa, *fb)
    seed = check_seed(seed)
    rng = np.random.default_rng(seed)
    parts = _factor_povms(fa + fb)
    a = tensor_povm_n(parts[: len(fa)])
    b = tensor_povm_n(parts[len(fa):])
    report = PropositionReport("dims", {"d_a": a.dim, "d_b": b.dim, "factors_a": fa, "factors_b": fb,
                                        "n_pairs": n_pairs}, seed)
    for side, povm in (("a", a), ("b", b)):
        perp = complement(operator_span(povm, tol), tol)
        if perp.dim == 0:
            report.add(f"{side}_pure_state_complete", True, 0.0, strength="exact")
        else:
            cert = min_rank_search(perp, trials=trials, seed=seed, tol=tol, max_target=2)
            report.add(f"{side}_pure_state_complete", cert.min_found >= 3 and not cert.borderline,
                       cert.objective, strength="empirical")
    bc = bipartite_complement(a, b, tol)
    report.add("complement_decomposition", bc.report["orthogonal"] and bc.report["contained"]
               and bc.report["dims_match"], 1e-9 - bc.report["max_containment_residual"], dims=bc.report["dims"])
    _multipartite_checks(report, parts, seed, n_pairs, trials, tol, rng)
    return report


EMPIRICAL = "empirical"


def explore_psic_product(d_a: int, d_b: int, seed: int = 0, n_pairs: int = 10_000, trials: int = 64,
                         tol: float = DEFAULT_TOL) -> PropositionReport:
    """Exploratory probe of products of two span-deficient pure-state complete POVMs.

    Each factor has a one-dimensional complement spanned by a random traceless
    generator of rank at least 3. No result covers this case in general, so a
    passing run is reported with verdict ``"empirical"`` rather than as a
    theorem check.
    """
    if min(d_a, d_b) < 3:
        raise ValueError("both factors need dimension >= 3 to be span-deficient and pure-state complete")
    _check_budget(d_a, d_b)
    seed = check_seed(seed)
    rng = np.random.default_rng(seed)
    parts = []
    for d in (d_a, d_b):
        g = random_hermitian(d, rng)
        g -= np.trace(g).real / d * np.eye(d)
        parts.append(povm_with_complement([g]))
    report = PropositionReport("explore", {"dims": [d_a, d_b], "n_pairs": n_pairs}, seed, expect=EMPIRICAL)
    for name, p in zip("ab", parts):
        g = complement(operator_span(p, tol), tol).basis[0]
        report.add(f"{name}_generator_rank_ge_3", rank_eps(g, tol) >= 3, rank_eps(g, tol) - 2)
    product = tensor_povm(*parts)
    perp = complement(operator_span(product, tol), tol)
    _add_min_rank_check(report, perp, trials, seed, tol)
    _add_pure_pair_check(report, product, n_pairs, rng)
    return report
