"""Command-line interface: ``maxconf <command> ...``.

Commands::

    maxconf confidence ensemble.json [-x 1]
    maxconf optimize ensemble.json [--out cert.json]
    maxconf sequence a.json b.json ... [--mode both]
    maxconf random --dim 2 --n 2 --rank 1 --seed 7 --out e.json
    maxconf certify ensemble.json cert.json

Exit codes: 0 ok, 1 check not met, 2 parse error, 3 validation error,
4 solver stall, 5 dimension cap exceeded, 6 certificate invalid.
Set ``MCD_NO_COLOR`` to disable ANSI styling.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import io, linalg, optimizer, sequence
from .confidence import baseline_mcm_measurement, max_confidences, success_probability
from .ensemble import SequenceEnsemble, average_state, random_ensemble
from .errors import (
    CertificateInvalid,
    DimCapExceeded,
    InvalidEnsemble,
    MaxConfError,
    ParseError,
    SolverStall,
    ValidationError,
)

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_STALL = 4
EXIT_DIM_CAP = 5
EXIT_CERTIFICATE = 6


def _use_color(stream) -> bool:
    return "MCD_NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _mark(ok: bool) -> str:
    word = "PASS" if ok else "FAIL"
    if not _use_color(sys.stdout):
        return word
    return f"\033[{32 if ok else 31}m{word}\033[0m"


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.6f}"


def _tolerances(args) -> dict:
    return {
        "gap": args.tol_gap,
        "slack": args.tol_slack,
        "rank": args.tol_rank,
        "solve": _solve_tol(args),
        "max_iter": args.max_iter,
    }


def _solve_tol(args) -> float:
    return min(optimizer.SOLVE_TOL, args.tol_gap / 10)


def _header(title: str, tol: dict) -> list[str]:
    parts = " ".join(f"{k}={v:g}" for k, v in tol.items())
    return [f"# {title}", f"# tolerances: {parts}"]


def _emit(args, lines: list[str], doc: dict) -> None:
    if args.format == "json":
        sys.stdout.write(io.dump_document(doc))
    else:
        print("\n".join(lines))


def _flags(checks: dict) -> dict:
    return {k: bool(v) for k, v in checks.items()}


def _document(kind: str, tol: dict, **body) -> dict:
    return {"schema": io.SCHEMA, "kind": kind, "tolerances": tol, **body}


def cmd_confidence(args) -> int:
    e = io.load_ensemble(args.ensemble)
    tol = _tolerances(args)
    results = max_confidences(e, args.tol_rank)
    rho0 = average_state(e)
    xs = range(e.n) if args.x is None else [args.x - 1]
    if any(x < 0 or x >= e.n for x in xs):
        raise ValidationError(f"-x must be between 1 and {e.n}", [])
    rows = []
    for x in xs:
        r = results[x]
        norm = abs(float(np.real(np.trace(rho0 @ r.witness))) - 1)
        attained = abs(e.priors[x] * float(np.real(np.trace(e.states[x] @ r.witness))) - r.raw_value)
        rows.append({
            "index": x + 1,
            "C": r.value,
            "support_rank": r.pi_support.rank,
            "kernel_rank": r.pi_kernel.rank,
            "witness_norm_residual": norm,
            "witness_value_residual": attained,
        })
    lines = _header(f"maximum confidence: {args.ensemble}", tol)
    lines.append(", ".join(f"C_{row['index']} = {row['C']:.6f}" for row in rows))
    for row in rows:
        lines.append(
            f"  x={row['index']}  rank(Pi)={row['support_rank']}  rank(Pi_perp)={row['kernel_rank']}"
            f"  |Tr(rho0 E*)-1|={row['witness_norm_residual']:.1e}"
            f"  |eta Tr(rho E*)-C|={row['witness_value_residual']:.1e}"
        )
    _emit(args, lines, _document("confidence-report", tol, input=str(args.ensemble), confidences=rows))
    return EXIT_OK


def cmd_optimize(args) -> int:
    e = io.load_ensemble(args.ensemble)
    tol = _tolerances(args)
    cert = optimizer.certify(e, _solve_tol(args), args.tol_gap, args.tol_slack, args.max_iter, args.tol_rank)
    out = Path(args.out) if args.out else Path(args.ensemble).with_suffix(".certificate.json")
    io.write_document(io.certificate_to_document(cert, tol), out)
    bound = optimizer.lower_bound(e, args.tol_rank)
    baseline = success_probability(e, baseline_mcm_measurement(e, args.tol_rank))
    lines = _header(f"optimal maximum-confidence measurement: {args.ensemble}", tol)
    lines += [
        f"p_G = {cert.p_g:.6f}",
        f"q_G = {cert.q_g:.6f}",
        f"gap = {cert.gap:.3e}",
        "slackness = " + ", ".join(f"{s:.1e}" for s in cert.slackness),
        f"lower bound lambda/n = {bound:.6f}",
        f"baseline success = {baseline:.6f}",
        f"certificate written to {out}",
        f"certified: {_mark(cert.certified)}",
    ]
    failed = [k for k, ok in cert.checks.items() if not ok]
    if failed:
        lines.append("failed checks: " + ", ".join(failed))
    doc = _document(
        "optimization-report", tol, input=str(args.ensemble), p_g=cert.p_g, q_g=cert.q_g, gap=cert.gap,
        slackness=list(cert.slackness), lower_bound=bound, baseline_success=baseline,
        certified=bool(cert.certified), checks=_flags(cert.checks), certificate=str(out),
    )
    _emit(args, lines, doc)
    return EXIT_OK if cert.certified else EXIT_CHECK


def cmd_sequence(args) -> int:
    steps = [io.load_ensemble(p) for p in args.ensembles]
    seq = SequenceEnsemble(tuple(steps))
    tol = {**_tolerances(args), "sequence": sequence.SEQUENCE_TOL, "dim_cap": args.dim_cap}
    pg = sequence.sequence_p_g(seq, _solve_tol(args), args.mode, args.dim_cap, args.max_iter,
                               args.tol_gap, args.tol_slack, args.tol_rank)
    conf = [sequence.sequence_max_confidence(seq, idx, args.mode, args.dim_cap, args.tol_rank)
            for idx in seq.indices()]
    deviations = [r.deviation for r in (pg, *conf) if r.deviation is not None]
    ok = all(d <= sequence.SEQUENCE_TOL for d in deviations)

    lines = _header(f"sequence of {seq.length} step(s), mode={args.mode}", tol)
    lines.append("step  dim  n  p_G")
    for l, (path, step, p) in enumerate(zip(args.ensembles, steps, pg.per_step), start=1):
        lines.append(f"{l:>4}  {step.dim:>3}  {step.n}  {p:.6f}  {path}")
    lines.append(f"p_G product = {_fmt(pg.product)}  direct = {_fmt(pg.direct)}  deviation = {_fmt(pg.deviation)}")
    for r in conf:
        label = ",".join(str(c + 1) for c in r.index)
        lines.append(f"C_({label}) product = {_fmt(r.product)}  direct = {_fmt(r.direct)}"
                     f"  deviation = {_fmt(r.deviation)}")
    if deviations:
        lines.append(f"factorization within {sequence.SEQUENCE_TOL:g}: {_mark(ok)}")
    doc = _document(
        "factorization-report", tol, inputs=[str(p) for p in args.ensembles], mode=args.mode,
        p_g=pg.to_dict(), max_confidence=[r.to_dict() for r in conf], within_tolerance=ok,
    )
    _emit(args, lines, doc)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_random(args) -> int:
    e = random_ensemble(args.dim, args.n, args.rank, args.seed)
    doc = io.ensemble_to_document(e)
    # round-trip through the validating reader before anything is written
    io.ensemble_from_document(json.loads(io.dump_document(doc)))
    out = Path(args.out)
    io.write_document(doc, out)
    rank = linalg.support_projector(average_state(e), args.tol_rank).rank
    full = "full rank" if rank == e.dim else "rank deficient"
    lines = _header(f"random ensemble seed={args.seed}", _tolerances(args))
    lines.append(f"wrote {out}: dim={e.dim} n={e.n} state rank={args.rank} rank(rho0)={rank} ({full})")
    _emit(args, lines, doc)
    return EXIT_OK


def cmd_certify(args) -> int:
    e = io.load_ensemble(args.ensemble)
    m, h = io.load_certificate(args.certificate)
    tol = _tolerances(args)
    chk = optimizer.check_certificate(e, m, h, args.tol_gap, args.tol_slack, rank_tol=args.tol_rank)
    lines = _header(f"certificate check: {args.certificate}", tol)
    for name, ok in chk.checks.items():
        lines.append(f"  {name:<18} {_mark(ok)}")
    lines += [
        f"p = {chk.primal_value:.6f}",
        f"q = {chk.dual_value:.6f}",
        f"gap = {chk.gap:.3e}",
    ]
    doc = _document(
        "certificate-check", tol, input=str(args.ensemble), certificate=str(args.certificate),
        checks=_flags(chk.checks), primal_value=chk.primal_value, dual_value=chk.dual_value, gap=chk.gap,
        slackness=list(chk.slackness), passed=bool(chk.passed),
    )
    _emit(args, lines, doc)
    if not chk.passed:
        raise CertificateInvalid("failed " + ", ".join(chk.failed), chk.failed)
    return EXIT_OK


def _positive(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return val


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-gap", type=_positive, default=optimizer.GAP_TOL)
    common.add_argument("--tol-slack", type=_positive, default=optimizer.SLACK_TOL)
    common.add_argument("--tol-rank", type=_positive, default=linalg.RANK_TOL)
    common.add_argument("--max-iter", type=int, default=500)
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(prog="maxconf", description="Maximum-confidence discrimination tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("confidence", parents=[common], help="maximum confidences of an ensemble")
    p.add_argument("ensemble")
    p.add_argument("-x", type=int, default=None, help="1-based state index (default: all)")
    p.set_defaults(func=cmd_confidence)

    p = sub.add_parser("optimize", parents=[common], help="best maximum-confidence measurement with certificate")
    p.add_argument("ensemble")
    p.add_argument("--out", default=None, help="certificate path (default: <input stem>.certificate.json)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sequence", parents=[common], help="factorization report for a sequence of ensembles")
    p.add_argument("ensembles", nargs="+")
    p.add_argument("--mode", choices=sequence.MODES, default="both")
    p.add_argument("--dim-cap", type=int, default=sequence.DIRECT_DIM_CAP)
    p.set_defaults(func=cmd_sequence)

    p = sub.add_parser("random", parents=[common], help="write a random ensemble")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("certify", parents=[common], help="re-check a certificate without solving")
    p.add_argument("ensemble")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        code, msg = EXIT_PARSE, f"parse error: {exc}"
    except FileNotFoundError as exc:
        code, msg = EXIT_PARSE, f"parse error: cannot read {exc.filename}"
    except (ValidationError, InvalidEnsemble) as exc:
        code, msg = EXIT_VALIDATION, f"validation error: {exc}"
    except SolverStall as exc:
        code, msg = EXIT_STALL, f"solver stall: {exc}"
    except DimCapExceeded as exc:
        code, msg = EXIT_DIM_CAP, f"dimension cap: {exc}"
    except CertificateInvalid as exc:
        code, msg = EXIT_CERTIFICATE, f"certificate invalid: {exc}"
    except (MaxConfError, ValueError) as exc:
        code, msg = EXIT_VALIDATION, f"invalid input: {exc}"
    print(msg, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
