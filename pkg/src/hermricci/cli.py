"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when an identity fails, 2 on usage
errors (bad ids, bad points, out-of-range parameters).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import integrate as I
from .catalog import CATALOG, default_ids, hopf_family, parse_metric_id, predicted_scalar
from .connection import torsion_norm_sq
from .curvature import Curvatures
from .identities import random_points, run_suite, tolerance
from .jets import JetError, as_points, evaluate_jet

SCHEMA = "hermricci/1"
CSV_COLUMNS = ("lambda", "s", "s_C", "s_LC", "s_H", "s_R", "torsion_norm_sq", "predicted_s")
DEFAULT_LAMBDAS = "-0.9,-0.875,-0.75,-0.5,0,1,10"
INTEGRAL_IDENTITIES = ("volume", "ddbar-omega", "torsion-wedge", "omega-power", "balanced-diagnostic")


class UsageError(Exception):
    pass


def _plain(x):
    """Convert numpy values to JSON-ready Python values; NaN becomes null."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _plain(float(np.real(x))), "im": _plain(float(np.imag(x)))}
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return None if not math.isfinite(x) else x
    return x


def _dump(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _matrix(a) -> dict:
    a = np.asarray(a)
    return {"re": np.real(a).tolist(), "im": np.imag(a).tolist()}


def _spec(text: str):
    try:
        return parse_metric_id(text)
    except JetError as exc:
        raise UsageError(str(exc)) from exc


def parse_point(text: str, n: int) -> np.ndarray:
    try:
        vals = [complex(t.strip().replace(" ", "")) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse point {text!r}") from exc
    try:
        return as_points(np.array(vals, dtype=complex), n)
    except JetError as exc:
        raise UsageError(str(exc)) from exc


def parse_lambdas(text: str) -> list[float]:
    out = []
    for t in text.split(","):
        t = t.strip()
        try:
            if "/" in t:
                a, b = t.split("/", 1)
                out.append(float(a) / float(b))
            else:
                out.append(float(t))
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"cannot parse lambda {t!r}") from exc
    return out


# --- report ----------------------------------------------------------------

def build_report(spec_id: str, point: str, mode: str, tol: float | None) -> dict:
    spec = _spec(spec_id)
    z = parse_point(point, spec.n)
    tol = tolerance(mode) if tol is None else tol
    try:
        j = evaluate_jet(spec, z, mode)
        res = run_suite(spec, z[None, :], mode)
    except JetError as exc:
        raise UsageError(str(exc)) from exc
    cv = Curvatures.of(j)
    residuals = {k: float(v[0]) for k, v in res.items()}
    passed = {k: v <= tol for k, v in residuals.items()}
    return {
        "schema": SCHEMA,
        "kind": "report",
        "metric": spec_id,
        "params": spec.params,
        "n": spec.n,
        "point": [[float(c.real), float(c.imag)] for c in z],
        "mode": mode,
        "tolerance": tol,
        "ricci": {k: _matrix(v) for k, v in cv.ricci().as_dict().items()},
        "scalars": {k: float(v) for k, v in cv.scalars().as_dict().items()},
        "torsion_norm_sq": float(torsion_norm_sq(j)),
        "residuals": residuals,
        "pass": passed,
        "all_pass": all(passed.values()),
    }


def _table(rep: dict) -> str:
    out = io.StringIO()
    out.write(f"metric {rep['metric']}  mode {rep['mode']}  point {rep['point']}\n")
    out.write("scalars\n")
    for k, v in rep["scalars"].items():
        out.write(f"  {k:<16} {v: .12g}\n")
    out.write(f"  {'torsion_norm_sq':<16} {rep['torsion_norm_sq']: .12g}\n")
    out.write("ricci forms (real part, herm11 coefficients)\n")
    for k, m in rep["ricci"].items():
        rows = "; ".join(" ".join(f"{x: .6g}" for x in row) for row in m["re"])
        out.write(f"  {k:<8} [{rows}]\n")
    out.write(f"identities (tolerance {rep['tolerance']:g})\n")
    for k in sorted(rep["residuals"]):
        flag = "PASS" if rep["pass"][k] else "FAIL"
        out.write(f"  {flag} {k:<40} {rep['residuals'][k]:.3e}\n")
    return out.getvalue()


def cmd_report(args) -> int:
    rep = build_report(args.metric, args.point, args.mode, args.tol)
    sys.stdout.write(_dump(rep) if args.json else _table(rep))
    return 0 if rep["all_pass"] else 1


# --- verify ----------------------------------------------------------------

def verify_metric(spec_id: str, points: int, seed: int, mode: str, tol: float | None) -> dict:
    spec = _spec(spec_id)
    tol = tolerance(mode) if tol is None else tol
    try:
        z = random_points(spec, points, seed)
        res = run_suite(spec, z, mode)
    except JetError as exc:
        raise UsageError(str(exc)) from exc
    worst = {k: float(np.max(v)) for k, v in res.items()}
    failures = sorted(k for k, v in worst.items() if not v <= tol)
    return {"metric": spec_id, "points": points, "seed": seed, "mode": mode, "tolerance": tol,
            "max_residuals": worst, "failures": failures, "pass": not failures}


def cmd_verify(args) -> int:
    if args.points < 1:
        raise UsageError("--points must be positive")
    ids = args.metric or default_ids()
    results = [verify_metric(m, args.points, args.seed, args.mode, args.tol) for m in ids]
    ok = all(r["pass"] for r in results)
    if args.json:
        sys.stdout.write(_dump({"schema": SCHEMA, "kind": "verify", "results": results, "pass": ok}))
    else:
        for r in results:
            flag = "PASS" if r["pass"] else "FAIL"
            worst = max(r["max_residuals"].values())
            extra = f"  failing: {', '.join(r['failures'])}" if r["failures"] else ""
            print(f"{flag} {r['metric']}  points={r['points']} mode={r['mode']} "
                  f"max residual {worst:.3e} (tol {r['tolerance']:g}){extra}")
    return 0 if ok else 1


# --- scan-lambda -----------------------------------------------------------

def scan_rows(n: int, lambdas: list[float], mode: str = "analytic") -> list[dict]:
    if n < 2:
        raise UsageError("n must be at least 2")
    rows = []
    z = np.zeros(n, complex)
    z[0] = 1.0
    for lam in lambdas:
        if not lam > -1:
            raise UsageError(f"lambda must exceed -1, got {lam!r}")
        spec = hopf_family(n, lam)
        j = evaluate_jet(spec, z, mode)
        sc = Curvatures.of(j).scalars().as_dict()
        rows.append({"lambda": lam, **{k: float(v) for k, v in sc.items()},
                     "torsion_norm_sq": float(torsion_norm_sq(j)),
                     "predicted_s": predicted_scalar(n, lam)})
    return rows


def cmd_scan_lambda(args) -> int:
    tol = tolerance(args.mode) if args.tol is None else args.tol
    rows = scan_rows(args.n, parse_lambdas(args.lambdas), args.mode)
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([repr(float(r[c])) for c in CSV_COLUMNS])
    text = buf.getvalue()
    if args.csv and args.csv != "-":
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    bad = [r["lambda"] for r in rows
           if abs(r["s"] - r["predicted_s"]) > tol * max(1.0, abs(r["predicted_s"]))]
    for lam in bad:
        print(f"scalar curvature disagrees with the prediction at lambda={lam!r}", file=sys.stderr)
    return 1 if bad else 0


# --- integrate -------------------------------------------------------------

def run_integral(spec_id: str, identity: str, k: int | None, samples: int, seed: int,
                 partitions: int, workers: int, tol: float) -> dict:
    spec = _spec(spec_id)
    if samples < 2:
        raise UsageError("--samples must be at least 2")
    if spec.domain is None:
        raise UsageError(f"{spec_id} has no compact fundamental domain to integrate over")
    kw = {"partitions": partitions, "workers": workers}
    try:
        if identity == "balanced-diagnostic":
            out = I.balanced_diagnostic(spec, samples, seed, rel_tol=tol, **kw)
            return {"schema": SCHEMA, "metric": spec_id, **out, "pass": True}
        if identity == "volume":
            est = I.volume(spec, samples, seed, **kw)
            ok = (not math.isfinite(est.rhs)) or abs(est.lhs - est.rhs) <= 3 * est.stderr_lhs
        else:
            if identity == "ddbar-omega":
                est, _ = I.check_ddbar_omega(spec, samples, seed, **kw)
            elif identity == "torsion-wedge":
                est, _ = I.check_torsion_wedge(spec, samples, seed, **kw)
            elif identity == "omega-power":
                if k is None:
                    raise UsageError("omega-power needs --k")
                est, _ = I.check_power(spec, k, samples, seed, **kw)
            else:
                raise UsageError(f"unknown identity {identity!r}")
            ok = est.residual <= tol
    except JetError as exc:
        raise UsageError(str(exc)) from exc
    return {"schema": SCHEMA, "metric": spec_id, "tolerance": tol, **est.as_dict(), "pass": bool(ok)}


def cmd_integrate(args) -> int:
    out = run_integral(args.metric, args.identity, args.k, args.samples, args.seed,
                       args.partitions, args.workers, args.tol)
    sys.stdout.write(_dump(out))
    return 0 if out["pass"] else 1


# --- catalog ---------------------------------------------------------------

def cmd_catalog(args) -> int:
    doc = {
        "schema": SCHEMA,
        "families": CATALOG,
        "default_ids": default_ids(),
        "id_grammar": {
            "factor": "family:key=value,... (n defaults to 2)",
            "weight": "factor~seed=S,amp=A[,kind=poly|hopf] multiplies the metric by exp(f)",
            "product": "factor*factor builds the block-diagonal product metric",
        },
        "integral_identities": list(INTEGRAL_IDENTITIES),
    }
    sys.stdout.write(_dump(doc))
    return 0


# --- entry -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hermricci",
                                description="Curvature identities of Hermitian metrics.")
    sub = p.add_subparsers(dest="command", required=True)

    def mode_opts(sp):
        sp.add_argument("--mode", choices=("analytic", "numeric"), default="analytic")
        sp.add_argument("--tol", type=float, default=None,
                        help="residual tolerance (default 1e-8 analytic, 1e-4 numeric)")

    r = sub.add_parser("report", help="curvature report at one chart point")
    r.add_argument("metric")
    r.add_argument("--point", required=True, help="comma-separated complex coordinates, e.g. 1,0.5j")
    mode_opts(r)
    fmt = r.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--table", action="store_true", help="plain-text table (default)")
    r.set_defaults(func=cmd_report)

    v = sub.add_parser("verify", help="identity suite at random points")
    v.add_argument("metric", nargs="*", help="metric ids (default: the catalog defaults)")
    v.add_argument("--points", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    mode_opts(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scan-lambda", help="scalar curvatures along the Hopf family, as CSV")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--lambdas", default=DEFAULT_LAMBDAS, help="comma-separated values; fractions allowed")
    s.add_argument("--csv", default="-", help="output path ('-' for stdout)")
    mode_opts(s)
    s.set_defaults(func=cmd_scan_lambda)

    g = sub.add_parser("integrate", help="Monte Carlo check of a global identity")
    g.add_argument("metric")
    g.add_argument("identity", choices=INTEGRAL_IDENTITIES)
    g.add_argument("--k", type=int, default=None)
    g.add_argument("--samples", type=int, default=I.DEFAULT_SAMPLES)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--partitions", type=int, default=I.DEFAULT_PARTITIONS)
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--tol", type=float, default=0.02, help="relative tolerance")
    g.set_defaults(func=cmd_integrate)

    c = sub.add_parser("catalog", help="list metric families and id grammar")
    c.set_defaults(func=cmd_catalog)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hermricci: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
