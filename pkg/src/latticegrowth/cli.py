"""Command-line front end: analyze one model, survey the small-step census, run suites.

Exit codes: 0 success, 1 failed suite or other error, 2 parse error,
3 inessential model, 4 ledger integrity failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any

from .bounds import RESOLVE_TOL, build_ledger, check_claimed_lower_bound
from .enumeration import count_orthant, default_nmax, estimate_growth
from .errors import (
    InessentialModelError,
    InsufficientDataError,
    LatticeGrowthError,
    LedgerIntegrityError,
    StepSetParseError,
)
from .halfplane import best_upper_bound, critical_point
from .orthant import GRID_SPACING, ORTHANT_ESSENTIAL_HORIZON, conjectured_growth
from .smallsteps import enumerate_small_models, fr_classify
from .stepset import (
    StepSet,
    compass_string,
    covariance,
    drift,
    format_stepset,
    is_orthant_essential,
    is_quarterplane_essential,
    parse_stepset,
)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INESSENTIAL, EXIT_INTEGRITY = 0, 1, 2, 3, 4
SIG_DIGITS = 12

SURVEY_COLUMNS = [
    "stepset", "size", "drift_x", "drift_y", "covariance",
    "chosen", "predicted", "theta_star", "min_bound", "fr_applicable",
]


def round_sig(x: float) -> float:
    return float(f"{x:.{SIG_DIGITS}g}")


def clean(obj: Any) -> Any:
    """Round every float to 12 significant digits; tuples become lists."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return round_sig(obj) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(clean(obj), indent=2, ensure_ascii=True) + "\n"


def _squarefree(c: int) -> bool:
    return all(c % (p * p) for p in range(2, int(math.isqrt(c)) + 1))


RADICANDS = [c for c in range(2, 31) if _squarefree(c)]


def recognize_radical(x: float, max_coeff: int = 12, tol: float = 1e-9) -> str | None:
    """Best-effort a + b*sqrt(c) with small integers; None when nothing fits."""
    if x is None or not math.isfinite(x):
        return None
    if abs(x - round(x)) <= tol:
        return str(int(round(x)))
    for c in RADICANDS:
        r = math.sqrt(c)
        for b in range(1, max_coeff + 1):
            for sb in (b, -b):
                a = round(x - sb * r)
                if abs(x - (a + sb * r)) <= tol * max(1.0, abs(x)):
                    rad = f"sqrt({c})" if b == 1 else f"{b}*sqrt({c})"
                    if a == 0:
                        return rad if sb > 0 else f"-{rad}"
                    return f"{a}{'+' if sb > 0 else '-'}{rad}"
    return None


def _with_symbolic(value: float | None) -> dict:
    out: dict[str, Any] = {"value": value}
    sym = recognize_radical(value) if value is not None else None
    if sym is not None:
        out["symbolic"] = {"form": sym, "method": "heuristic"}
    return out


def _check_essential(S: StepSet):
    if S.dimension == 2:
        if not is_quarterplane_essential(S):
            raise InessentialModelError("model not quarter-plane essential")
    elif not is_orthant_essential(S, ORTHANT_ESSENTIAL_HORIZON):
        raise InessentialModelError("model not orthant essential")


def analyze(
    S: StepSet,
    n_max: int | None = None,
    grid: float = GRID_SPACING,
    tol: float = RESOLVE_TOL,
    check_essential: bool = True,
    claim: float | None = None,
) -> dict:
    """Full pipeline for one model: bounds, enumeration, ledger, verdict."""
    if check_essential:
        _check_essential(S)
    d = S.dimension
    n_max = default_nmax(d) if n_max is None else n_max
    report: dict[str, Any] = {
        "model": format_stepset(S),
        "dimension": d,
        "size": S.size,
        "drift": list(drift(S)),
    }
    if d == 2:
        report["compass"] = compass_string(S) if S.is_small() else None
        report["covariance"] = covariance(S)
        upper = best_upper_bound(S, check_essential=False)
        cert = {"theta": upper.data["theta"], "theta_over_pi": upper.data["theta"] / math.pi}
    else:
        upper = conjectured_growth(S, check_essential=False, spacing=grid)
        cert = {"normal": list(upper.data["normal"])}
    cp = critical_point(S)
    report["critical_point"] = {
        "coordinates": list(cp.coordinates),
        "value": cp.inventory_value,
        "converged": cp.converged,
    }
    if d == 2 and S.is_small():
        pred = fr_classify(S)
        v = pred.values
        report["fr"] = {
            "values": {"S": v.cardinality, "rho0_inv": v.rho0_inv, "rhoX_inv": v.rhoX_inv, "rhoY_inv": v.rhoY_inv},
            "drift_signs": list(pred.drift_signs),
            "covariance_sign": pred.covariance_sign,
            "chosen": pred.chosen,
            "predicted_growth": pred.predicted_growth,
            "applicable": pred.applicable,
        }
    ub = _with_symbolic(upper.value)
    ub.update({"certificate": {"tag": upper.tag, "detail": upper.detail}, **cert})
    report["upper_bound"] = ub

    ledger = build_ledger(S, n_max=n_max, tolerance=tol, upper=upper)
    report["lower_bounds"] = [
        {"value": b.value, "certificate": {"tag": b.tag, "detail": b.detail}} for b in ledger.lowers
    ]
    series = ledger.series
    if series is None:
        enum: dict[str, Any] = {"n_max": 0}
    else:
        enum = {"region": series.region, "n_max": series.n_max, "fekete_floor": series.fekete_floor()}
        enum["last_count"] = str(series.counts[-1])
        try:
            est = estimate_growth(series)
            enum["estimate"] = {"growth": est.estimate, "alpha": est.alpha, "fit_indices": list(est.indices)}
        except InsufficientDataError as exc:
            enum["estimate"] = {"growth": None, "note": str(exc)}
    report["enumeration"] = enum
    report["ledger"] = ledger.to_dict()
    resolved = ledger.resolved
    report["resolved"] = _with_symbolic(resolved)
    report["verdict"] = "exact" if resolved is not None else "open"
    if claim is not None:
        report["claim_check"] = check_claimed_lower_bound(S, claim, n_max)
    return report


def survey_rows(jobs: int = 1) -> list[dict]:
    return [e.row() for e in enumerate_small_models(jobs=jobs)]


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        out = []
        for c in columns:
            v = r[c]
            if isinstance(v, float):
                v = f"{v:.{SIG_DIGITS}g}"
            elif v is None:
                v = ""
            out.append(v)
        w.writerow(out)
    return buf.getvalue()


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latticegrowth", description="Growth constants of lattice walks in cones.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="bounds, enumeration and ledger for one step set")
    a.add_argument("model", help='step set, e.g. "N,SW,S,SE" or "(1,1,1);(-1,0,0)x2"')
    a.add_argument("--nmax", type=int, default=None, help="enumeration length (0 skips)")
    a.add_argument("--grid", type=float, default=GRID_SPACING, help="angular grid spacing (d >= 3)")
    a.add_argument("--tol", type=float, default=RESOLVE_TOL, help="ledger resolution tolerance")
    a.add_argument("--format", choices=("json", "csv"), default="json", help="csv prints the count series")
    a.add_argument("--claim", type=float, default=None, help="check a claimed lower bound against the data")
    a.add_argument("--allow-inessential", action="store_true", help="skip the essentiality check")

    s = sub.add_parser("survey", help="the 79 small-step quarter-plane models")
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    s.add_argument("--jobs", type=int, default=1)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("--suite", action="append", default=None, help="suite name (repeatable); default all")
    v.add_argument("--format", choices=("text", "json"), default="text")
    return p


def cmd_analyze(args, out) -> int:
    S = parse_stepset(args.model)
    report = analyze(
        S,
        n_max=args.nmax,
        grid=args.grid,
        tol=args.tol,
        check_essential=not args.allow_inessential,
        claim=args.claim,
    )
    if args.format == "csv":
        if args.nmax == 0:
            raise StepSetParseError("--format csv needs enumeration (nmax > 0)")
        out.write(count_orthant(S, report["enumeration"]["n_max"]).to_csv())
    else:
        out.write(dumps(report))
    return EXIT_OK


def cmd_survey(args, out) -> int:
    rows = survey_rows(args.jobs)
    if args.format == "csv":
        out.write(rows_to_csv(rows, SURVEY_COLUMNS))
    else:
        out.write(dumps({"count": len(rows), "models": rows}))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    from .verify import SUITES, run_suites

    names = args.suite
    if names and any(n not in SUITES for n in names):
        bad = [n for n in names if n not in SUITES]
        print(f"unknown suite(s): {', '.join(bad)}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_PARSE
    results = run_suites(names)
    if args.format == "json":
        out.write(dumps([{"suite": r.name, "passed": r.passed, "detail": r.detail, "seconds": r.seconds} for r in results]))
    else:
        for r in results:
            out.write(r.line() + "\n")
        failed = sum(not r.passed for r in results)
        out.write(f"{len(results) - failed}/{len(results)} suites passed\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {"analyze": cmd_analyze, "survey": cmd_survey, "verify": cmd_verify}


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except StepSetParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InessentialModelError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INESSENTIAL
    except LedgerIntegrityError as exc:
        print(f"ledger integrity: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except LatticeGrowthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
