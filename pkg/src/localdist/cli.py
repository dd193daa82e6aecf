"""Command-line interface.

Exit codes: 0 success or consistent, 1 usage/IO/budget error, 2 property
refuted with a witness, 3 undetermined.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__, harness
from .io import (
    FormatError,
    decode_matrix,
    dumps,
    encode_matrix,
    encode_vector,
    load_povm,
    load_state,
    load_stats,
    povm_to_dict,
    read_json,
    state_to_dict,
    stats_to_dict,
    write_text,
)
from .operators import DEFAULT_TOL, random_density_matrix, random_pure_state
from .povm import (
    diag_complement_povm,
    from_span,
    mixed_probabilities,
    qutrit_case_ii,
    random_povm,
    sic_qubit,
    tensor_povm,
    validate,
)
from .rank import IC, PSIC, VPSIC, CertificationReport, certify_povm
from .tomography import linear_inversion, pure_state_fit

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REFUTED = 2
EXIT_UNDETERMINED = 3

_PROPERTIES = {"ic": IC, "psic": PSIC, "vpsic": VPSIC}


class CliError(Exception):
    """Usage or input problem; reported on stderr with exit code 1."""


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return value


def _pos_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _pos_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


# --- output helpers ------------------------------------------------------------


class _Output:
    """Human summary and JSON document; the JSON goes to ``--out`` or stdout."""

    def __init__(self, args, argv):
        self.out = getattr(args, "out", None)
        self.argv = argv
        # keep stdout clean for the JSON when it has nowhere else to go
        self.summary_stream = sys.stdout if self.out else sys.stderr

    def say(self, line: str = "") -> None:
        print(line, file=self.summary_stream)

    def emit(self, doc: dict) -> None:
        text = dumps(doc)
        if self.out:
            try:
                write_text(self.out, text)
            except OSError as exc:
                raise CliError(f"cannot write {self.out}: {exc.strerror or exc}") from exc
        else:
            sys.stdout.write(text)

    def report(self, body: dict, args) -> None:
        doc = {
            "tool_version": __version__,
            "invocation": list(self.argv),
            "seed": getattr(args, "seed", None),
        }
        for key in ("tol", "trials"):
            if hasattr(args, key):
                doc[key] = getattr(args, key)
        doc.update(body)
        self.emit(doc)


def _load_valid_povm(path: str, tol: float = 1e-9):
    povm = load_povm(path)
    problems = validate(povm, tol)
    if problems:
        raise CliError(f"{path}: invalid POVM: " + "; ".join(problems))
    return povm


# --- gen -------------------------------------------------------------------------


def _cmd_gen(args, out: _Output) -> int:
    kind = args.kind
    if kind == "sic2":
        povm = sic_qubit()
        meta = {"kind": "sic2"}
    elif kind == "random":
        if args.dim is None or args.outcomes is None:
            raise CliError("gen random needs --dim and --outcomes")
        povm = random_povm(args.dim, args.outcomes, args.seed)
        meta = {"kind": "random", "dim": args.dim, "outcomes": args.outcomes, "seed": args.seed}
    elif kind == "from-span":
        if not args.basis:
            raise CliError("gen from-span needs --basis FILE")
        doc = read_json(args.basis)
        mats = doc.get("basis")
        if not isinstance(mats, list) or not mats:
            raise FormatError("basis document needs a non-empty 'basis' list of matrices")
        basis = [decode_matrix(m, what=f"basis[{i}]") for i, m in enumerate(mats)]
        povm = from_span(basis, args.tol)
        meta = {"kind": "from-span", "source": args.basis}
    elif kind == "qutrit-psic":
        s = args.s if args.s is not None else [1.0, 1.0, -2.0]
        povm = qutrit_case_ii(s)
        meta = {"kind": "qutrit-psic", "s": list(s)}
    elif kind == "dim4-vpsic":
        povm = diag_complement_povm([1.0, 1.0, -1.0, -1.0])
        meta = {"kind": "dim4-vpsic", "complement": [1.0, 1.0, -1.0, -1.0]}
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(f"unknown kind {kind}")
    povm = type(povm)(povm.effects, povm.labels, meta)
    out.say(f"generated {kind}: dim {povm.dim}, {povm.n_outcomes} outcomes")
    out.emit(povm_to_dict(povm))
    return EXIT_OK


# --- validate / tensor ---------------------------------------------------------------


def _cmd_validate(args, out: _Output) -> int:
    povm = load_povm(args.povm)
    problems = validate(povm, args.tol)
    out.say(f"{args.povm}: dim {povm.dim}, {povm.n_outcomes} outcomes, " + ("valid" if not problems else "INVALID"))
    for p in problems:
        out.say(f"  {p}")
    out.report({"valid": not problems, "problems": problems, "dim": povm.dim, "n_outcomes": povm.n_outcomes}, args)
    return EXIT_OK if not problems else EXIT_ERROR


def _cmd_tensor(args, out: _Output) -> int:
    a = _load_valid_povm(args.a)
    b = _load_valid_povm(args.b)
    product = tensor_povm(a, b)
    meta = {"kind": "tensor", "factors": [
        {"path": args.a, "dim": a.dim, "n_outcomes": a.n_outcomes, "metadata": a.metadata},
        {"path": args.b, "dim": b.dim, "n_outcomes": b.n_outcomes, "metadata": b.metadata},
    ]}
    product = type(product)(product.effects, product.labels, meta)
    out.say(f"tensor product: dim {product.dim}, {product.n_outcomes} outcomes")
    out.emit(povm_to_dict(product))
    return EXIT_OK


# --- certify -------------------------------------------------------------------------


def certification_to_dict(rep: CertificationReport) -> dict:
    doc = {
        "property": rep.property,
        "holds": rep.holds,
        "strength": rep.strength,
        "span_dim": rep.span_dim,
        "complement_dim": rep.complement_dim,
        "reason": rep.reason,
    }
    for key, cert in (("search", rep.certificate), ("oracle", rep.oracle)):
        if cert is not None:
            doc[key] = {
                "target": cert.target,
                "method": cert.method,
                "min_found": cert.min_found if np.isfinite(cert.min_found) else None,
                "trials": cert.trials,
                "objective": cert.objective,
                "borderline": cert.borderline,
            }
            if cert.witness is not None and np.isfinite(cert.min_found):
                doc[key]["witness"] = encode_matrix(cert.witness)
    if rep.witnesses is not None:
        doc["witnesses"] = [encode_matrix(w) for w in rep.witnesses]
        doc["witness_distance"] = rep.witness_distance
    return doc


def _cmd_certify(args, out: _Output) -> int:
    povm = _load_valid_povm(args.povm)
    prop = _PROPERTIES[args.property]
    rep = certify_povm(povm, prop, trials=args.trials, seed=args.seed, tol=args.tol)
    out.say(f"{prop}: {rep.holds} ({rep.strength}) span dim {rep.span_dim}, complement dim {rep.complement_dim}")
    out.say(f"  {rep.reason}")
    if rep.witnesses is not None:
        out.say(f"  witness pair statistics distance {rep.witness_distance:.3e}")
    out.report(certification_to_dict(rep), args)
    return {"yes": EXIT_OK, "no": EXIT_REFUTED}.get(rep.holds, EXIT_UNDETERMINED)


# --- check -----------------------------------------------------------------------------


def _run_check(args) -> harness.PropositionReport:
    common = {"seed": args.seed, "trials": args.trials, "tol": args.tol}
    pairs = {"n_pairs": args.pairs}
    prop = args.proposition
    if prop == "1":
        return harness.check_prop1((args.da or 2, args.db or 3), corrupt_b=args.corrupt_b, **pairs, **common)
    if prop == "2":
        s = args.s if args.s is not None else (1.0, 1.0, -2.0)
        return harness.check_prop2(args.db or 3, s=s, corrupt_a=args.corrupt_a, **pairs, **common)
    if prop == "3":
        return harness.check_prop3((args.da or 2, args.db or 4), probe=args.probe, **pairs, **common)
    if prop == "4":
        return harness.check_prop4(**pairs, **common)
    if prop == "multi":
        factors = args.factors or [2, 3]
        return harness.check_multipartite(factors, corrupt=args.corrupt, **pairs, **common)
    if prop == "dims":
        fa = harness.factor_dims(args.da or 2)
        fb = harness.factor_dims(args.db or 6)
        return harness.check_factorized_dims(fa.count(2), fa.count(3), fb.count(2), fb.count(3), **pairs, **common)
    if prop == "interlacing":
        return harness.interlacing_suite(args.draws, args.seed)
    if prop == "unitaries":
        return harness.check_proof_unitaries(args.seed)
    if prop == "explore":
        return harness.explore_psic_product(args.da or 4, args.db or 4, **pairs, **common)
    raise CliError(f"unknown proposition {prop}")  # pragma: no cover


def _cmd_check(args, out: _Output) -> int:
    try:
        rep = _run_check(args)
    except harness.BudgetExceeded as exc:
        raise CliError(str(exc)) from exc
    out.say(f"check {args.proposition}: {rep.verdict}")
    for c in rep.checks:
        out.say(f"  [{'pass' if c.passed else 'FAIL'}] {c.name}  margin {c.margin:.3e}")
    body = rep.to_dict()
    if rep.verdict == harness.VIOLATION:
        out.say("  violation candidate: reproduce with the seed and instance recorded in the report")
    out.report(body, args)
    if rep.verdict in (harness.CONSISTENT, harness.EMPIRICAL):
        return EXIT_OK
    return EXIT_REFUTED


# --- simulate / reconstruct -------------------------------------------------------------------


def _cmd_simulate(args, out: _Output) -> int:
    povm = _load_valid_povm(args.povm)
    rng = np.random.default_rng(args.seed)
    if args.state:
        rho = load_state(args.state)
        if rho.shape[0] != povm.dim:
            raise CliError(f"state has dim {rho.shape[0]}, POVM has dim {povm.dim}")
        source = args.state
    elif args.random == "pure":
        psi = random_pure_state(povm.dim, rng)
        rho = np.outer(psi, psi.conj())
        source = "random-pure"
    else:
        rho = random_density_matrix(povm.dim, rng)
        source = "random-mixed"
    p = mixed_probabilities(povm, rho[None])[0]
    out.say(f"statistics of {source} state under {args.povm}: {len(p)} outcomes")
    doc = stats_to_dict(p, args.povm)
    if args.state_out:
        try:
            write_text(args.state_out, dumps(state_to_dict(rho, source=source, seed=args.seed)))
        except OSError as exc:
            raise CliError(f"cannot write {args.state_out}: {exc.strerror or exc}") from exc
    out.emit(doc)
    return EXIT_OK


def _cmd_reconstruct(args, out: _Output) -> int:
    povm = _load_valid_povm(args.povm)
    p, _ = load_stats(args.stats)
    if len(p) != povm.n_outcomes:
        raise CliError(f"statistics have {len(p)} entries, POVM has {povm.n_outcomes} outcomes")
    diag = {"mode": args.mode}
    if args.mode == "linear":
        rho, residual = linear_inversion(povm, p, args.tol)
    else:
        fit = pure_state_fit(povm, p, starts=args.starts, seed=args.seed)
        rho = np.outer(fit.state, fit.state.conj())
        residual = fit.residual
        diag["vector"] = encode_vector(fit.state)
        diag["starts"] = args.starts
    diag["residual"] = float(residual)
    if args.reference:
        ref = load_state(args.reference)
        if ref.shape != rho.shape:
            raise CliError("reference state has the wrong dimension")
        diag["recovery_error"] = float(np.max(np.abs(rho - ref)))
        # Uhlmann fidelity reduces to tr(rho ref) when either state is pure
        diag["fidelity_overlap"] = float(np.real(np.trace(rho @ ref)))
    out.say(f"{args.mode} reconstruction: residual {residual:.3e}")
    if "recovery_error" in diag:
        out.say(f"  recovery error {diag['recovery_error']:.3e}, overlap {diag['fidelity_overlap']:.12f}")
    out.report(state_to_dict(rho, **diag), args)
    return EXIT_OK


# --- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="localdist",
        description="Certify completeness properties of POVMs and check product-measurement results.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials=True):
        p.add_argument("--seed", type=_nonneg_int, default=0)
        p.add_argument("--tol", type=_pos_float, default=DEFAULT_TOL)
        if trials:
            p.add_argument("--trials", type=_pos_int, default=64)
        p.add_argument("--out", help="write JSON here (default: stdout, summary on stderr)")

    p = sub.add_parser("gen", help="generate a POVM file")
    p.add_argument("kind", choices=["sic2", "random", "from-span", "qutrit-psic", "dim4-vpsic"])
    p.add_argument("--dim", type=_pos_int)
    p.add_argument("--outcomes", type=_pos_int)
    p.add_argument("--s", type=_floats, help="diagonal of the qutrit complement generator, e.g. 1,1,-2")
    p.add_argument("--basis", help="JSON file with a 'basis' list of matrices (from-span)")
    common(p, trials=False)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("validate", help="check positivity and completeness of a POVM file")
    p.add_argument("povm")
    p.add_argument("--tol", type=_pos_float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("certify", help="decide IC / PSIC / VPSIC for a POVM file")
    p.add_argument("povm")
    p.add_argument("--property", choices=sorted(_PROPERTIES), default="psic")
    common(p)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("tensor", help="tensor product of two POVM files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_tensor)

    p = sub.add_parser("check", help="run a proposition check")
    p.add_argument("proposition", choices=["1", "2", "3", "4", "multi", "dims", "interlacing", "unitaries", "explore"])
    p.add_argument("--da", type=_pos_int, help="dimension of the first factor")
    p.add_argument("--db", type=_pos_int, help="dimension of the second factor")
    p.add_argument("--s", type=_floats, help="qutrit generator diagonal for check 2")
    p.add_argument("--factors", type=_ints, help="comma-separated factor dimensions for check multi")
    p.add_argument("--corrupt-a", action="store_true", help="check 2: non-PSIC qutrit factor")
    p.add_argument("--corrupt-b", action="store_true", help="check 1: non-PSIC second factor")
    p.add_argument("--corrupt", type=_nonneg_int, help="check multi: index of the factor to corrupt")
    p.add_argument("--probe", choices=["qutrit-a", "non-vpsic-b"], help="check 3 expected-failure probe")
    p.add_argument("--pairs", type=_pos_int, default=10_000, help="random state pairs per instance")
    p.add_argument("--draws", type=_pos_int, default=1000, help="random draws for check interlacing")
    common(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("simulate", help="outcome statistics of a state")
    p.add_argument("povm")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", help="state JSON file")
    src.add_argument("--random", choices=["pure", "mixed"])
    p.add_argument("--state-out", help="also write the state used")
    common(p, trials=False)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("reconstruct", help="estimate a state from statistics")
    p.add_argument("povm")
    p.add_argument("stats")
    p.add_argument("--mode", choices=["linear", "pure"], default="linear")
    p.add_argument("--starts", type=_pos_int, default=16)
    p.add_argument("--reference", help="state JSON to compare against")
    common(p, trials=False)
    p.set_defaults(func=_cmd_reconstruct)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract reserves 2 for refutations
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    out = _Output(args, argv)
    try:
        return args.func(args, out)
    except (CliError, FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
