"""Command-line entry point: ``psflab <subcommand> ...``.

Every run writes ``manifest.json`` (arguments, package version, kernel
parameters, artifact list) into ``--out-dir``.  Exit codes: 0 success,
1 failed assertion or acceptance check, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .bump import default_kernel
from .regime import (
    INF,
    PsfTag,
    ParamPoint,
    as_ext,
    classify_abs,
    classify_abs_two_sided,
    classify_psf,
    conjugate,
    format_ext,
    reciprocal,
)

OUT_OF_SCOPE = "out of theorem scope, PSF may fail"


class UsageError(Exception):
    pass


# -- helpers ----------------------------------------------------------------------------


def _ext(text: str):
    try:
        return as_ext(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an extended rational: {text!r}") from exc


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        out = [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _point(text: str) -> ParamPoint:
    try:
        return ParamPoint.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _range(text: str) -> np.ndarray:
    try:
        a, b, n = text.split(":")
        return np.linspace(float(a), float(b), int(n))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}") from exc


def _jsonable(v):
    if v is INF:
        return "inf"
    if isinstance(v, Fraction):
        return format_ext(v)
    if isinstance(v, ParamPoint):
        return str(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _jsonable(obj)


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True)


class Run:
    """Output bookkeeping for one invocation."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.out_dir = args.out_dir
        self.artifacts: list[str] = []

    def path(self, name: str) -> str:
        p = name if os.path.isabs(name) else os.path.join(self.out_dir, name)
        os.makedirs(os.path.dirname(p) or ".", exist_ok=True)
        return p

    def write(self, name: str, text: str) -> str:
        p = self.path(name)
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        self.artifacts.append(os.path.relpath(p, self.out_dir))
        return p

    def manifest(self, extra: Optional[dict] = None) -> dict:
        config = {k: v for k, v in vars(self.args).items() if k != "func"}
        data = {
            "psflab_version": __version__,
            "command": self.args.command,
            "argv": self.argv,
            "config": config,
            "kernel": default_kernel().parameters(),
            "artifacts": sorted(self.artifacts),
        }
        if extra:
            data.update(extra)
        os.makedirs(self.out_dir, exist_ok=True)
        with open(os.path.join(self.out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(_clean(data), indent=2, sort_keys=True) + "\n")
        return data


def _csv(header, rows) -> str:
    from .acceptance import csv_text
    return csv_text(header, rows)


# -- subcommands ------------------------------------------------------------------------


def cmd_classify(run: Run) -> int:
    a = run.args
    pt = ParamPoint(a.p, a.q, a.alpha, a.beta)
    out = {"point": pt.as_dict(), "psf": classify_psf(pt).as_dict()}
    if classify_psf(pt).tag is PsfTag.INADMISSIBLE:
        out["note"] = OUT_OF_SCOPE
    if a.abs:
        out["abs"] = classify_abs(pt).value
    if a.two_sided:
        out["abs_two_sided"] = classify_abs_two_sided(pt).value
    print(_dumps(out))
    return 0


def cmd_bump(run: Run) -> int:
    k = default_kernel()
    x = np.linspace(0.0, run.args.x_max, run.args.samples)
    xi = np.linspace(-1.25, 1.25, run.args.samples)
    rows = [("phi", a, b) for a, b in zip(x, k.phi(x))]
    rows += [("phihat", a, b) for a, b in zip(xi, k.phihat(xi))]
    header_row = "# kernel " + json.dumps(k.parameters(), sort_keys=True) + "\n"
    run.write(run.args.dump, header_row + _csv(("table", "x", "value"), rows))
    return 0


def cmd_stepfn(run: Run) -> int:
    from .stepfn import StepSpec, eval_F, eval_Fhat, eval_Ghat
    a = run.args
    spec = StepSpec.load(a.spec)
    k = default_kernel()
    x = a.range
    if a.emit == "F":
        tol = a.tol if a.tol is not None else 1e-12
        val, err = eval_F(spec, k, x, tol=tol, return_error=True)
        body = _csv(("x", "F", "truncation_bound"), [(u, v, err) for u, v in zip(x, val)])
    else:
        f = eval_Fhat if a.emit == "Fhat" else eval_Ghat
        val = np.asarray(f(spec, k, x), dtype=complex)
        body = _csv(("xi", f"{a.emit}_re", f"{a.emit}_im"),
                    [(u, v.real, v.imag) for u, v in zip(x, val)])
    run.write(a.out, body)
    return 0


def cmd_norms(run: Run) -> int:
    from .norms import F_norm, WeightSpec, fourier_norm, sbp_bound_1, sbp_bound_2, sbp_bound_3
    from .stepfn import StepSpec
    a = run.args
    spec = StepSpec.load(a.spec)
    k = default_kernel()
    rtol = a.tol if a.tol is not None else 1e-9
    qp = conjugate(a.q)
    nu = a.nu if a.nu is not None else Fraction(1) - reciprocal(a.q) + Fraction(1, 2)
    m1 = F_norm(spec, k, WeightSpec.shifted(float(a.alpha)), a.p, rtol=rtol)
    m2 = fourier_norm(spec, k, WeightSpec.shifted(float(a.beta)), a.q, "F", rtol=rtol)
    m3 = fourier_norm(spec, k, WeightSpec.shifted(-float(nu)), qp, "G", rtol=rtol)
    out = {
        "N": spec.N,
        "weights": {"alpha": a.alpha, "beta": a.beta, "nu": nu, "p": a.p, "q": a.q, "q_conj": qp},
        "F": m1.as_dict(),
        "Fhat": m2.as_dict(),
        "Ghat": m3.as_dict(),
        "bound1": sbp_bound_1(spec, float(a.alpha), a.p),
        "bound2": sbp_bound_2(spec, float(a.beta), a.q),
        "bound3": sbp_bound_3(spec, float(nu), a.q),
    }
    print(_dumps(out))
    return 0


def _pair_for(a):
    from .psf import gaussian_pair, perturbed_gaussian_pair, step_pair
    from .stepfn import StepSpec
    if a.family == "gaussian":
        return gaussian_pair(a.t)
    if a.family == "perturbed-gaussian":
        return perturbed_gaussian_pair(a.t, a.lam, a.shift)
    if a.spec is None:
        raise UsageError("--family step needs --spec")
    return step_pair(StepSpec.load(a.spec))


def cmd_psf_run(run: Run) -> int:
    from .psf import psf_defect_series
    a = run.args
    series = psf_defect_series(_pair_for(a), a.point, a.N, seed=a.seed, family=a.family)
    run.write(a.out, series.to_csv())
    return 0


def _parse_signs(text: Optional[str], n: int):
    from .signsearch import random_signs
    if text is None:
        return None
    kind, _, val = text.partition(":")
    if kind == "seed":
        return random_signs(n, 1, int(val))[0]
    if kind == "file":
        return np.loadtxt(val, ndmin=1)
    raise UsageError(f"--signs must be seed:<u64> or file:<path>, got {text!r}")


def cmd_family(run: Run) -> int:
    from . import counterexamples as cx
    a = run.args
    N = a.N
    if a.name == "diagonal":
        d = cx.diagonal_function(a.point, N)
        out = {"family": "diagonal", "point": a.point, "J": N, "schedule": d.schedule,
               "weights": d.weights, "params": cx.mainth3_params(a.point).as_dict(),
               "schedule_sums": d.schedule_sums()}
        run.write(a.out, json.dumps(_clean(out), sort_keys=True))
        return 0
    if a.name == "mainth3":
        params = cx.mainth3_params(a.point)
        spec = cx.mainth3_family(a.point, N)
    elif a.name == "extkah2":
        params = cx.extkah2_params(a.point)
        spec = cx.extkah2_family(a.point, N, _parse_signs(a.signs, N + 1))
    else:
        params = cx.extkah2_qinf_params(a.point)
        spec = cx.extkah2_qinf_family(a.point, N, _parse_signs(a.signs, N + 1))
    out = {"family": a.name, "params": params.as_dict(), **spec.to_dict()}
    run.write(a.out, json.dumps(_clean(out), sort_keys=True))
    return 0


def cmd_signs(run: Run) -> int:
    from .signsearch import SignSearchProblem, salem_zygmund_check, search_signs
    a = run.args
    c = np.loadtxt(a.coeffs, ndmin=1)
    if a.q is INF:
        res = salem_zygmund_check(c, a.trials, a.seed)
        out = {"q": "inf", "signs": res.signs, "worst_ratio": res.worst, "ratios": res.ratios}
    else:
        w = np.loadtxt(a.weights, ndmin=1) if a.weights else np.ones_like(c)
        prob = SignSearchProblem(c, w, a.q, trials=a.trials, seed=a.seed)
        res = search_signs(prob, exhaustive=a.exhaustive)
        out = {"q": a.q, "signs": res.signs, "objective": res.objective, "baseline": res.baseline,
               "ratio": res.ratio, "mode": res.mode}
    run.write(a.out, json.dumps(_clean(out), sort_keys=True))
    return 0


def cmd_weights_check(run: Run) -> int:
    from .norms import WeightSpec
    from .weights import WeightPair, power_scales, verdict
    a = run.args
    Bt = a.deltaB_tilde if a.deltaB_tilde is not None else a.deltaB
    pair = WeightPair(WeightSpec.parse(a.u), WeightSpec.parse(a.v),
                      power_scales(a.deltaB), power_scales(Bt))
    rep = verdict(pair, a.p, a.q, a.N_list)
    rows = []
    for which, vals in enumerate(rep.values, start=1):
        for N, v in zip(a.N_list, vals if vals is not None else [math.inf] * len(a.N_list)):
            rows.append((which, N, v if math.isfinite(v) else "inf"))
    run.write(a.out, _csv(("condition", "N", "value"), rows))
    print(_dumps({"verdict": rep.verdict.value, "slopes": list(rep.slopes),
                  "diverging": list(rep.diverging), "unchecked": rep.unchecked}))
    return 0


def cmd_verify(run: Run) -> int:
    from .acceptance import run_suite
    a = run.args
    numbers = a.only or list(range(1, 15))

    def report(r):
        print(r.line(), flush=True)

    results = run_suite(numbers, seed=a.seed, threads=a.threads, second_threads=a.second_threads,
                        report=report)
    summary = []
    for r in results:
        for name, body in r.tables.items():
            run.write(os.path.join("verify", f"criterion_{r.number:02d}_{name}.csv"), body)
        summary.append({"number": r.number, "title": r.title, "passed": r.passed,
                        "metrics": r.metrics, "seconds": r.seconds})
    run.write(os.path.join("verify", "summary.json"),
              json.dumps(_clean(summary), indent=2, sort_keys=True) + "\n")
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


# -- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    g.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    g.add_argument("--tol", type=float, default=None, help="tolerance override")
    g.add_argument("--out-dir", default=".", help="directory for outputs and manifest.json")

    parser = argparse.ArgumentParser(prog="psflab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"psflab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify a parameter point")
    p.add_argument("--p", type=_ext, required=True)
    p.add_argument("--q", type=_ext, required=True)
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("--beta", type=_rational, required=True)
    p.add_argument("--abs", action="store_true", help="also classify absolute convergence")
    p.add_argument("--two-sided", action="store_true", help="also the two-sided absolute check")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bump", parents=[common], help="dump phi and phihat tables")
    p.add_argument("--dump", required=True, help="output CSV")
    p.add_argument("--x-max", type=float, default=32.0)
    p.add_argument("--samples", type=int, default=2049)
    p.set_defaults(func=cmd_bump)

    p = sub.add_parser("stepfn", parents=[common], help="evaluate F, Fhat or Ghat of a spec")
    p.add_argument("--spec", required=True, help="JSON {c: [...], delta: [...]}")
    p.add_argument("--emit", choices=("F", "Fhat", "Ghat"), required=True)
    p.add_argument("--range", type=_range, required=True, help="a:b:n")
    p.add_argument("out", help="output CSV")
    p.set_defaults(func=cmd_stepfn)

    p = sub.add_parser("norms", parents=[common], help="measured norms and coefficient bounds")
    p.add_argument("--spec", required=True)
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("--p", type=_ext, required=True)
    p.add_argument("--beta", type=_rational, required=True)
    p.add_argument("--q", type=_ext, required=True)
    p.add_argument("--nu", type=_rational, default=None, help="default 1/q' + 1/2")
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("psf-run", parents=[common], help="defect series P_N(f) - P_M(fhat)")
    p.add_argument("--family", choices=("gaussian", "perturbed-gaussian", "step"), required=True)
    p.add_argument("--point", type=_point, required=True, help="p,q,alpha,beta")
    p.add_argument("--N", type=_int_list, required=True)
    p.add_argument("--t", type=float, default=1.0, help="Gaussian width parameter")
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--spec", default=None, help="spec JSON for --family step")
    p.add_argument("--out", default="series.csv")
    p.set_defaults(func=cmd_psf_run)

    p = sub.add_parser("family", parents=[common], help="counterexample step specs")
    p.add_argument("--name", choices=("mainth3", "extkah2", "extkah2-inf", "diagonal"),
                   required=True)
    p.add_argument("--point", type=_point, required=True)
    p.add_argument("--N", type=int, required=True, help="truncation (number of pieces for diagonal)")
    p.add_argument("--signs", default=None, help="seed:<u64> or file:<path>")
    p.add_argument("--out", default="spec.json")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("signs", parents=[common], help="random sign search")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--weights", default=None)
    p.add_argument("--q", type=_ext, required=True)
    p.add_argument("--trials", type=int, default=256)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--out", default="signs.json")
    p.set_defaults(func=cmd_signs)

    p = sub.add_parser("weights-check", parents=[common], help="general-weight conditions")
    p.add_argument("--u", required=True, help="pow:a, abs:a, const or file:path")
    p.add_argument("--v", required=True)
    p.add_argument("--deltaB", type=float, required=True, help="Delta_k = 1 + k^B")
    p.add_argument("--deltaB-tilde", type=float, default=None)
    p.add_argument("--p", type=_ext, required=True)
    p.add_argument("--q", type=_ext, required=True)
    p.add_argument("--N-list", type=_int_list, default=[2 ** e for e in range(4, 11)])
    p.add_argument("--out", default="check.csv")
    p.set_defaults(func=cmd_weights_check)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    p.add_argument("--suite", choices=("primary",), default="primary")
    p.add_argument("--only", type=_int_list, default=None, help="criterion numbers")
    p.add_argument("--second-threads", type=int, default=4,
                   help="thread count of the determinism rerun")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print("psflab: --threads must be >= 1", file=sys.stderr)
        return 2
    r = Run(args, argv)
    try:
        code = args.func(r)
    except AssertionError as exc:
        print(f"psflab: check failed: {exc}", file=sys.stderr)
        code = 1
    except (UsageError, ValueError, OSError) as exc:
        print(f"psflab: {exc}", file=sys.stderr)
        return 2
    r.manifest({"exit_code": code})
    return code


def replay(manifest_path: str, out_dir: Optional[str] = None) -> int:
    """Rerun the command recorded in a manifest, optionally into another directory."""
    with open(manifest_path, encoding="utf-8") as fh:
        argv = json.load(fh)["argv"]
    if out_dir is not None:
        argv = _without_out_dir(argv) + ["--out-dir", out_dir]
    return run(argv)


def _without_out_dir(argv: list) -> list:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok == "--out-dir":
            skip = True
            continue
        if tok.startswith("--out-dir="):
            continue
        out.append(tok)
    return out


def main() -> None:
    sys.exit(run())
