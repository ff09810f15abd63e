"""Command-line runner for the verification suites.

    nfdelta SUITE [--field Qi] [--q-grid 2,3,4] [--max-norm 50] [--out path.csv] ...

Each suite writes a flat CSV (one row per cell or assertion, with a pass
column) and a JSON sidecar holding the parameters, field data and summary.
Exit codes: 0 all assertions pass, 1 an assertion failed, 2 a resource bound
was hit, 3 the configuration was invalid.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, checks
from .expsums import CostBoundExceeded
from .ideals import IdealError
from .nf import FieldError, NumberField, builtin_fields, field_from_config, field_from_name
from .oscillatory import QuadratureError

EXIT_PASS, EXIT_FAIL, EXIT_BOUND, EXIT_CONFIG = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


# columns per suite, so that an empty parameter grid still yields a header
COLUMNS = {
    "delta-identity": ["field", "norm", "ideal", "Q", "value", "error", "status", "pass"],
    "char-orthogonality": ["field", "norm", "modulus", "gamma", "alphas", "ideals", "orth_error",
                           "primitive_diff", "pass"],
    "poisson": ["field", "R", "lhs", "main", "relative", "pass"],
    "h-decay": ["field", "test", "value", "ceiling", "pass"],
    "avg-I": ["field", "x", "I", "quad_error", "error", "assertion", "pass"],
    "expsum-identities": ["field", "identity", "modulus", "argument", "lhs_abs", "rhs_abs", "relative", "pass"],
    "deligne": ["p", "v", "status", "abs_S", "ratio", "pass"],
    "pdecay": ["field", "rho", "height", "abs_p", "ratio", "normalized", "pass"],
    "count-compare": ["P", "Q", "tol", "direct", "decomposed", "relative", "pass"],
    "singular-series": ["X", "delta", "partial", "pass"],
}


def _floats(text, name):
    if text is None:
        return None
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"{name} must be a comma-separated list of numbers, got {text!r}")


def _ints(text, name):
    vals = _floats(text, name)
    if vals is None:
        return None
    if any(v != int(v) for v in vals):
        raise ConfigError(f"{name} must hold integers, got {text!r}")
    return tuple(int(v) for v in vals)


def _resolve_fields(args, default):
    """Field list from --config, --field (comma list or 'all') or the suite default."""
    if args.config:
        try:
            return [field_from_config(args.config)]
        except FieldError as exc:
            raise ConfigError(str(exc))
    if not args.field:
        return [builtin_fields()[k] for k in default]
    if args.field == "all":
        return list(builtin_fields().values())
    out = []
    table = builtin_fields()
    for name in args.field.split(","):
        name = name.strip()
        try:
            out.append(table[name] if name in table else field_from_name(name))
        except FieldError as exc:
            raise ConfigError(str(exc))
    return out


def _one_field(args, default="Q") -> NumberField:
    fs = _resolve_fields(args, (default,))
    if len(fs) != 1:
        raise ConfigError("this suite takes a single field")
    return fs[0]


def _tol(args, default):
    return default if args.tol is None else args.tol


def _merge(results, name):
    rows = [r for res in results for r in res.rows]
    passed = all(res.passed for res in results)
    summ = "; ".join(res.summary for res in results) if results else "empty grid"
    return checks.CheckResult(name, passed, summ, rows, {"parts": [res.details for res in results]},
                              sum(res.seconds for res in results))


def run_delta_identity(args):
    Qs = _ints(args.q_grid, "--q-grid")
    return checks.check_delta_identity(_resolve_fields(args, checks.FIELDS), (2, 3, 4) if Qs is None else Qs,
                                       args.max_norm or 50, _tol(args, 1e-8))


def run_char_orthogonality(args):
    return checks.check_char_orthogonality(_resolve_fields(args, checks.FIELDS), args.max_norm or 64,
                                           args.alpha_norm, _tol(args, 1e-8))


def run_poisson(args):
    Rs = _floats(args.r_grid, "--r-grid")
    Rs = (0.01, 0.005, 0.0025) if Rs is None else Rs
    at = 0.005 if 0.005 in Rs else (Rs[len(Rs) // 2] if Rs else None)
    return checks.check_poisson(_one_field(args, "Qi"), Rs, _tol(args, 0.03), at)


def run_h_decay(args):
    return checks.check_h_analytics(_resolve_fields(args, checks.FIELDS))


def run_avg_I(args):
    xs = _floats(args.x_grid, "--x-grid")
    return checks.check_averaged_I(_resolve_fields(args, ("Q", "Qi")), (0.1, 0.4) if xs is None else xs,
                                   _tol(args, 0.1))


def run_expsum_identities(args):
    return checks.check_expsum_identities(_resolve_fields(args, checks.FIELDS), args.form or checks.IDENTITY_FORM,
                                          _tol(args, 1e-6), args.seed)


def run_deligne(args):
    ps = _ints(args.p_grid, "--p-grid")
    ps = (7, 13, 19, 31) if ps is None else ps
    if not ps:
        return checks.CheckResult("deligne", True, "empty grid")
    return checks.check_deligne(args.form or "x3+y3+z3", ps, 25, args.seed, field_name=_one_field(args))


def run_pdecay(args):
    rhos = _floats(args.q_grid, "--q-grid")
    return checks.check_pdecay(_resolve_fields(args, ("Q", "Qi", "Qsqrt2")),
                               (0.25, 0.5, 1.0) if rhos is None else rhos, threshold=_tol(args, 1e-3))


def run_count_compare(args):
    K = _one_field(args)
    if K.degree != 1:
        raise ConfigError("count-compare decomposes over Q only")
    Ps = _floats(args.p_grid, "--p-grid")
    Ps = (6.0,) if Ps is None else Ps
    Qs = _floats(args.q_grid, "--q-grid")
    Q = Qs[0] if Qs else None
    res = [checks.check_count(P, _tol(args, 1e-2), form=args.form or checks.COUNT_FORM, Q=Q,
                              max_points=args.max_points) for P in Ps]
    return _merge(res, "count-compare")


def run_singular_series(args):
    return checks.check_singular_series(X=args.max_norm or 30, final_tol=_tol(args, 1e-3), form=args.form)


SUITES = {
    "delta-identity": run_delta_identity,
    "char-orthogonality": run_char_orthogonality,
    "poisson": run_poisson,
    "h-decay": run_h_decay,
    "avg-I": run_avg_I,
    "expsum-identities": run_expsum_identities,
    "deligne": run_deligne,
    "pdecay": run_pdecay,
    "count-compare": run_count_compare,
    "singular-series": run_singular_series,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nfdelta", description="Run a verification suite and write CSV + JSON.")
    p.add_argument("suite_pos", nargs="?", metavar="SUITE", help=f"one of: {', '.join(SUITES)}")
    p.add_argument("--suite", help="suite name (alternative to the positional argument)")
    p.add_argument("--field", help="built-in field name(s), comma separated, or 'all'")
    p.add_argument("--config", help="JSON field description (overrides --field)")
    p.add_argument("--out", help="CSV output path (JSON sidecar alongside); default SUITE.csv")
    p.add_argument("--tol", type=float, help="tolerance of the suite's main assertion")
    p.add_argument("--max-norm", "--norms", dest="max_norm", type=int, help="norm bound (ideals, moduli or cut-off)")
    p.add_argument("--max-points", type=float, default=1e9, help="enumeration cost bound")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    p.add_argument("--q-grid", "--Q", dest="q_grid", help="comma-separated Q values (rho values for pdecay)")
    p.add_argument("--p-grid", "--P", dest="p_grid", help="comma-separated P values (primes for deligne)")
    p.add_argument("--form", help="cubic form, e.g. x3+y3-2z3")
    p.add_argument("--r-grid", help="comma-separated R values for poisson")
    p.add_argument("--x-grid", help="comma-separated x values for avg-I")
    p.add_argument("--alpha-norm", type=int, default=100, help="norm bound on alpha for char-orthogonality")
    return p


def _field_info(K: NumberField) -> dict:
    return {"name": K.name, "min_poly": list(K.min_poly), "disc": K.disc, "r1": K.r1, "r2": K.r2,
            "class_number": K.class_number}


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def write_outputs(out: Path, suite: str, res, meta: dict):
    cols = list(COLUMNS[suite])
    for r in res.rows:
        for k in r:
            if k not in cols:
                cols.insert(len(cols) - 1, k)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(cols)
        for r in res.rows:
            wr.writerow([_cell(r.get(c, "")) for c in cols])
    side = dict(meta)
    side.update({"passed": bool(res.passed), "summary": res.summary, "seconds": res.seconds,
                 "details": res.details, "failed_rows": sum(1 for r in res.rows if not r.get("pass", True))})
    with open(out.with_suffix(".json"), "w") as fh:
        json.dump(side, fh, indent=2, default=str)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    suite = args.suite or args.suite_pos
    if suite not in SUITES:
        print(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or f"{suite}.csv")
    meta = {"suite": suite, "version": __version__, "argv": list(sys.argv[1:] if argv is None else argv),
            "seed": args.seed, "fields": []}
    try:
        fields = _resolve_fields(args, ())
        meta["fields"] = [_field_info(K) for K in fields]
        res = SUITES[suite](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CostBoundExceeded, IdealError, QuadratureError) as exc:
        print(f"resource bound: {exc}", file=sys.stderr)
        write_outputs(out, suite, checks.CheckResult(suite, False, f"stopped: {exc}"), meta)
        return EXIT_BOUND
    except (ValueError, FieldError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_outputs(out, suite, res, meta)
    print(res.line())
    return EXIT_PASS if res.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
