"""``pschur`` command-line front end.

Exit codes: 0 ok, 2 parse error, 3 invariant violation, 4 backend problem,
5 not solvable, 6 defect not positive, 7 not stabilized.
"""

from __future__ import annotations

import argparse
import contextlib
import io as _io
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .classifier import (Governing, classify_cf, classify_trig, equiv_check, governing_clause,
                         verdict)
from .colligation import (FACTOR_TOL, InterpolationInstance, certify_schur_class, factor_check,
                          solve, two_kernel_solve)
from .errors import (BackendError, BadLeadingMoment, DefectNotPositive, DegenerateTolerance,
                     HermitianError, HorizonTooSmall, InexactDegenerate, InstanceParseError,
                     IsometryResidualTooLarge, KernelMismatch, NoRankPreservingExtension,
                     NotSolvable, NumericallySingularCompletion, PreconditionViolated, RangeError)
from .extension import extend_to_class, inertia_trace, stabilization_index
from .inertia import HermitianMatrix, TolerancePolicy, inertia, rank_det
from .kernels import blaschke_case_study, coeff_growth_check, gram_KS, negsq_from_coeffs
from .scalars import EXACT, FLOAT, format_scalar, in_open_disk, parse_exact, parse_float
from .toeplitz import check_corollaries, coeffs_to_moments, verify_identities

EXIT_OK, EXIT_PARSE, EXIT_INVARIANT, EXIT_BACKEND = 0, 2, 3, 4
EXIT_NOT_SOLVABLE, EXIT_DEFECT, EXIT_NOT_STABLE = 5, 6, 7

_ERROR_CODES = [
    (InstanceParseError, EXIT_PARSE),
    ((BackendError, InexactDegenerate, DegenerateTolerance), EXIT_BACKEND),
    ((NotSolvable, NoRankPreservingExtension, HorizonTooSmall), EXIT_NOT_SOLVABLE),
    ((DefectNotPositive, KernelMismatch, NumericallySingularCompletion,
      IsometryResidualTooLarge), EXIT_DEFECT),
    ((HermitianError, RangeError, BadLeadingMoment, PreconditionViolated, ValueError),
     EXIT_INVARIANT),
]


class Outcome(Exception):
    """Carries a finished result with a nonzero exit code."""

    def __init__(self, result: dict, code: int):
        super().__init__(code)
        self.result, self.code = result, code


class _Context:
    """Per-run state: parsed flags and every input text read (for run records)."""

    def __init__(self, args, sources: dict | None):
        self.args = args
        self.sources = sources or {}
        self.inputs: dict = {}

    def read(self, path: str) -> str:
        if path in self.sources:
            text = self.sources[path]
        else:
            try:
                text = Path(path).read_text()
            except OSError as exc:
                raise InstanceParseError(f"cannot read {path}: {exc.strerror}") from None
        self.inputs[path] = {"sha256": io.sha256_text(text), "content": text}
        return text

    def instance(self, kinds: tuple) -> io.Instance:
        inst = io.parse_instance(self.read(self.args.file), self.args.backend)
        if inst.kind not in kinds:
            raise InstanceParseError(f"expected a {' or '.join(kinds)} instance, got {inst.kind}")
        return inst


def _s(x) -> str:
    if isinstance(x, (np.floating, np.complexfloating)):
        x = complex(x)
    return format_scalar(x)


def _iner(i) -> dict:
    return {"nu": i.nu, "zeta": i.zeta, "pi": i.pi}


def _pol(ctx, backend: str) -> TolerancePolicy:
    if backend == EXACT:
        return TolerancePolicy.exact()
    return TolerancePolicy.floating(ctx.args.tol) if ctx.args.tol else TolerancePolicy.floating()


# -- commands --------------------------------------------------------------


def cmd_inertia(ctx) -> dict:
    inst = ctx.instance(("hermitian_matrix", "kernel_sample"))
    if inst.kind == "hermitian_matrix":
        h = HermitianMatrix(inst.data["matrix"], inst.backend)
    else:
        h = gram_KS(list(zip(inst.data["points"], inst.data["values"])))
    pol = _pol(ctx, inst.backend)
    i = inertia(h, pol)
    rank, det = rank_det(h, pol)
    return {"nu": i.nu, "zeta": i.zeta, "pi": i.pi, "sigma": i.signature, "rank": rank,
            "det": _s(det), "backend": inst.backend}


def _classification(cls) -> dict:
    return {
        "governing": cls.governing.value,
        "order": cls.order,
        "label": cls.label.value,
        "base": _iner(cls.base),
        "kernel_dim": cls.kernel_dim,
        "rank": cls.rank,
        "det": _s(cls.det),
        "det_rank_minor": _s(cls.det_rank_minor),
        "threshold": {"nu": cls.threshold_nu, "pi": cls.threshold_pi},
    }


def _query(cls, nu, pi) -> dict:
    return {"nu": nu, "pi": pi, "verdict": verdict(cls, nu, pi).value,
            "clause": governing_clause(cls, nu, pi).value}


def cmd_classify(ctx) -> dict:
    args = ctx.args
    if args.pi is not None and args.nu is None:
        raise InstanceParseError("--pi needs --nu")
    inst = ctx.instance(("coeffs", "moments"))
    if inst.kind == "moments":
        cls = classify_trig(inst.data["c"])
    else:
        cls = classify_cf(inst.data["a"])
    out = {"kind": inst.kind, "backend": inst.backend, "classification": _classification(cls)}
    if args.nu is not None:
        out["query"] = _query(cls, args.nu, args.pi)
    if cls.governing == Governing.COEFF:
        moments = coeffs_to_moments(inst.data["a"])
        tr = classify_trig(moments)
        cross = {"moments": [_s(x) for x in moments], "classification": _classification(tr),
                 "agrees": equiv_check(inst.data["a"])}
        if args.nu is not None:
            # positive squares on the moment side are one more than on the coefficient side
            cross["query"] = _query(tr, args.nu, None if args.pi is None else args.pi + 1)
        out["moment_crosscheck"] = cross
    return out


def cmd_extend(ctx) -> dict:
    args = ctx.args
    inst = ctx.instance(("moments",))
    if inst.backend != EXACT:
        raise BackendError("moment extension runs on the exact backend only")
    c = list(inst.data["c"])
    terms = extend_to_class(c, args.nu, args.pi, horizon=args.horizon)
    trace = inertia_trace(c + terms)
    return {
        "input": [_s(x) for x in c],
        "target": {"nu": args.nu, "pi": args.pi},
        "horizon": args.horizon,
        "terms": [_s(x) for x in terms],
        "trace": [[t.nu, t.zeta, t.pi] for t in trace],
        "reached": _iner(trace[-1]),
        "stabilization_index": stabilization_index(trace),
        "seed": args.seed,
    }


def _c_list(v) -> list:
    return [_s(complex(x)) for x in np.ravel(v)]


def cmd_interpolate(ctx) -> dict:
    args = ctx.args
    inst = ctx.instance(("interpolation",))
    if inst.backend != FLOAT:
        raise BackendError("interpolation runs on the float backend; pass --backend float")
    d = inst.data
    problem = InterpolationInstance(tuple(d["points"]), tuple(d["A"]), tuple(d["B"]), d["w0_index"])
    if args.method == "two-kernel":
        tf = two_kernel_solve(problem.points, problem.A, problem.B)
    else:
        tf = solve(problem)
    col = tf.colligation
    failures = factor_check(problem, tf, args.tol or FACTOR_TOL)
    cert = certify_schur_class(tf, levels=args.levels)
    return {
        "method": args.method,
        "kappa": tf.kappa,
        "state_dim": int(col.T.shape[0]),
        "blocks": {"T": [_c_list(row) for row in col.T], "F": _c_list(col.F),
                   "G": _c_list(col.G), "H": _s(complex(col.H))},
        "metric": [_c_list(row) for row in col.metric],
        "exceptional_points": _c_list(tf.exceptional_points),
        "failures": _c_list(failures),
        "n_failures": len(failures),
        "kappa_prime": cert.kappa_prime,
        "certify_trace": [list(t) for t in cert.trace],
        "within_bound": cert.within_bound,
        "residuals": {k: f"{v:.3e}" for k, v in sorted(col.report.items())},
    }


def cmd_verify(ctx) -> dict:
    args = ctx.args
    inst = ctx.instance(("coeffs",))
    a = inst.data["a"]
    out: dict = {"suite": args.suite, "backend": inst.backend, "n": len(a)}
    if args.suite == "identities":
        rep = verify_identities(a, args.tol or 1e-9)
        out.update(exact=rep.exact, checks=len(rep.checks), passed=rep.passed,
                   max_residual=f"{rep.max_residual:.3e}",
                   failures=[f"{f.name}@r={f.r}" for f in rep.failures()])
        code = EXIT_OK if rep.passed else EXIT_INVARIANT
    elif args.suite == "corollaries":
        rep = check_corollaries(a, args.tol)
        out.update(passed=rep.passed, violations=rep.violations,
                   sides={k: [list(p) for p in v] for k, v in rep.sides.items()},
                   block=[list(p) for p in rep.block])
        code = EXIT_OK if rep.passed else EXIT_INVARIANT
    else:
        r_max = args.r_max or len(a)
        est = negsq_from_coeffs(a, r_max, args.window)
        out.update(kappa=est.kappa, stabilized=est.stabilized, sequence=est.sequence)
        if len(a) >= 4:
            g = coeff_growth_check(a)
            out["growth"] = {"K": _s(g.K), "rho": _s(g.rho), "holds": g.holds,
                             "increasing_trend": g.increasing_trend}
        code = EXIT_OK if est.stabilized else EXIT_NOT_STABLE
    if code:
        raise Outcome(out, code)
    return out


def cmd_demo_blaschke(ctx) -> dict:
    args = ctx.args
    backend = args.backend or EXACT
    conv = parse_exact if backend == EXACT else parse_float
    try:
        pts = [conv(p) for tok in args.points for p in tok.split(",") if p.strip()]
    except ValueError as exc:
        raise InstanceParseError(str(exc)) from None
    if len(pts) < 2:
        raise InstanceParseError("the case study needs w0 and at least one other point")
    for z in pts:
        if not in_open_disk(z):
            raise ValueError(f"point {_s(z)} is not inside the open unit disk")
    if not 0 <= args.w0_index < len(pts):
        raise InstanceParseError("w0 index out of range")
    study = blaschke_case_study(pts, args.w0_index)
    return {
        "points": [_s(z) for z in pts],
        "w0": _s(pts[args.w0_index]),
        "gram": [[_s(x) for x in row] for row in study.gram.entries],
        "inertia": _iner(study.inertia),
        "witness": [[_s(x) for x in row] for row in study.witness.entries],
        "witness_det": _s(study.witness_det),
        "backend": backend,
    }


COMMANDS = {
    "inertia": cmd_inertia,
    "classify": cmd_classify,
    "extend": cmd_extend,
    "interpolate": cmd_interpolate,
    "verify": cmd_verify,
    "demo-blaschke": cmd_demo_blaschke,
}


# -- output ----------------------------------------------------------------


def _flatten(prefix: str, value, rows: list):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], rows)
    elif isinstance(value, list) and value and isinstance(value[0], list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    elif isinstance(value, list):
        rows.append((prefix, ", ".join(str(v) for v in value) or "-"))
    else:
        rows.append((prefix, "-" if value is None else str(value)))


def render_table(result: dict) -> str:
    rows: list = []
    _flatten("", result, rows)
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def render(result: dict, table: bool) -> str:
    return render_table(result) if table else io.dumps(result)


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=[EXACT, FLOAT], default=None,
                        help="override the backend declared by the input")
    common.add_argument("--tol", type=float, default=None,
                        help="relative tolerance for float runs")
    common.add_argument("--seed", type=int, default=0, help="seed recorded with the run")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="table", action="store_false", default=False,
                     help="JSON output (default)")
    fmt.add_argument("--table", dest="table", action="store_true", default=False,
                     help="aligned key/value table")
    common.add_argument("--record", metavar="PATH", default=None,
                        help="write a replayable run record to PATH")

    parser = argparse.ArgumentParser(prog="pschur", description="Indefinite Schur-class toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inertia", parents=[common], help="inertia of a Hermitian matrix")
    p.add_argument("file")

    p = sub.add_parser("classify", parents=[common], help="solvability of an extension problem")
    p.add_argument("file")
    p.add_argument("--nu", type=int, default=None)
    p.add_argument("--pi", type=int, default=None)

    p = sub.add_parser("extend", parents=[common], help="extend moments into a target class")
    p.add_argument("file")
    p.add_argument("--nu", type=int, required=True)
    p.add_argument("--pi", type=int, default=None)
    p.add_argument("--horizon", type=int, default=8)

    p = sub.add_parser("interpolate", parents=[common], help="solve an interpolation problem")
    p.add_argument("file")
    p.add_argument("--method", choices=["rectangular", "two-kernel"], default="rectangular")
    p.add_argument("--levels", type=int, default=3, help="grid levels for the class certificate")

    p = sub.add_parser("verify", parents=[common], help="run a verification suite on coefficients")
    p.add_argument("file")
    p.add_argument("--suite", choices=["identities", "corollaries", "negsq"], default="identities")
    p.add_argument("--r-max", type=int, default=None)
    p.add_argument("--window", type=int, default=3)

    p = sub.add_parser("demo-blaschke", parents=[common], help="the constant-one Gram case study")
    p.add_argument("--points", nargs="+", default=["0", "1/2"],
                   help="disk points; comma-separated form --points=0,-1/3 allows negatives")
    p.add_argument("--w0-index", type=int, default=0)

    p = sub.add_parser("replay", help="rerun a run record and compare output bytes")
    p.add_argument("record")
    return parser


def _strip_record(argv: list) -> list:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
        elif tok == "--record":
            skip = True
        elif not tok.startswith("--record="):
            out.append(tok)
    return out


def execute(argv: list, sources: dict | None = None):
    """Run one command; return ``(exit_code, stdout_text, stderr_text, context)``."""
    parser = build_parser()
    err = _io.StringIO()
    try:
        with contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", err.getvalue(), None
    if args.command == "replay":
        return _replay(args.record)
    ctx = _Context(args, sources)
    try:
        result, code = COMMANDS[args.command](ctx), EXIT_OK
    except Outcome as done:
        result, code = done.result, done.code
    except Exception as exc:
        for types, c in _ERROR_CODES:
            if isinstance(exc, types):
                code = c
                break
        else:
            raise
        result = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        err.write(f"pschur {args.command}: {type(exc).__name__}: {exc}\n")
    return code, render(result, args.table), err.getvalue(), ctx


def _replay(path: str):
    try:
        rec = io.RunRecord.from_json(Path(path).read_text())
    except OSError as exc:
        return EXIT_PARSE, "", f"pschur replay: cannot read {path}: {exc.strerror}\n", None
    except InstanceParseError as exc:
        return EXIT_PARSE, "", f"pschur replay: {exc}\n", None
    sources = {p: e["content"] for p, e in rec.inputs.items()}
    code, out, err, ctx = execute(rec.argv, sources)
    if out != rec.output or code != rec.exit_code:
        err += "pschur replay: output differs from the record\n"
        return EXIT_INVARIANT, out, err, ctx
    return EXIT_OK, out, err, ctx


def main(argv: list | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    record_path = None
    if "--record" in argv[:-1]:
        record_path = argv[argv.index("--record") + 1]
    t0 = time.perf_counter()
    code, out, err, ctx = execute(argv)
    elapsed = time.perf_counter() - t0
    sys.stdout.write(out)
    sys.stderr.write(err)
    if record_path and ctx is not None:
        rec = io.RunRecord(
            argv=_strip_record(argv), inputs=ctx.inputs, versions=io.versions(),
            seed=ctx.args.seed, output=out, exit_code=code, timing={"seconds": elapsed})
        Path(record_path).write_text(rec.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
