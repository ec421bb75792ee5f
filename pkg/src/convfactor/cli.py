"""Command-line front end.

Subcommands: ``green`` (potential model of a geometry), ``rho``
(convergence-factor estimate), ``classify`` (weight-sequence verdict),
``construct`` (two-sided approximation step), ``trace`` (weighted
partial-sum modulus trace), and ``example`` (built-in scenarios with
expected-fact checks).

Conventions:

* stdout carries exactly one JSON document per run; plot-bound tables go
  to CSV files named by ``--csv``.  Repeated runs with identical inputs
  produce byte-identical JSON: numbers are serialized with 17 significant
  digits, iteration orders are fixed, and no timestamps or machine info
  enter the payload.
* a one-line reproducibility header (package version, the argument vector,
  and the active tolerance block) is printed to stderr.
* exit status 0 on success, 2 on input/validation errors (including usage
  errors), 3 on numerical failures.
* every numeric fact asserted by a scenario carries its provenance tag
  (``paper`` / ``derived`` / ``trivial``); computed quantities are tagged
  ``derived`` as a block.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .classify import (
    SequenceSpec,
    classify_sequence,
    compute_bounds,
    verify_chain,
)
from .config import DEFAULTS
from .construct import construct_step, weighted_sum_trace
from .errors import ConvfactorError, InputError, NumericalError
from .geometry import contains, geometry_from_dict, geometry_to_dict
from .minimax import (
    PiecewiseTarget,
    Polynomial,
    deviation_sequence,
    rho_from_deviations,
)
from .potential import capacity, estimate_rho_green, eval_green_many, solve_green
from .presets import get_preset

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


# ---------------------------------------------------------------------------
# deterministic serialization

def _jser(obj) -> str:
    """Deterministic JSON text: 17-significant-digit floats, fixed order.

    Dicts serialize in insertion order (construction order is fixed by the
    command implementations), complex numbers as [re, im] pairs, non-finite
    floats as the strings "inf"/"-inf"/"nan" (strict JSON has no literals
    for them).
    """
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return "%.17g" % x
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return "[%s, %s]" % (_jser(z.real), _jser(z.imag))
    if isinstance(obj, dict):
        items = ", ".join("%s: %s" % (json.dumps(str(k)), _jser(v))
                          for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_jser(v) for v in obj) + "]"
    return json.dumps(str(obj))


def _sanitize(obj):
    """Restrict a diagnostics payload to JSON-expressible scalar trees."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex(obj)
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return str(obj)


def _emit(payload: dict) -> None:
    sys.stdout.write(_jser(payload) + "\n")


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("%.17g" % float(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# argument parsing helpers

def _parse_point(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise InputError(f"expected a point as 'x' or 'x,y', got {text!r}")


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse {text!r} as a rational or decimal "
                         f"number") from exc


def _parse_coeffs(text: str) -> tuple:
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            out.append(complex(part))
        except ValueError as exc:
            raise InputError(f"bad coefficient {part!r}") from exc
    return tuple(out)


def _load_geometry(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read geometry file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"geometry file {path} is not valid JSON: "
                         f"{exc}") from exc
    return geometry_from_dict(data)


def _rho_payload(est) -> dict:
    diag = {k: v for k, v in est.diagnostics.items()
            if k not in ("level_analyses", "records")}
    return {"value": est.value, "lower": est.lower, "upper": est.upper,
            "method": est.method, "diagnostics": _sanitize(diag)}


def _estimate_rho(L, method: str, nmax, grid):
    """Run the requested route(s); returns (estimate, deviation records)."""
    target = PiecewiseTarget.constants([0.0] + [1.0] * L.n_outer)
    if method == "green":
        return estimate_rho_green(L, grid_resolution=grid), None
    if method == "deviation":
        records = deviation_sequence(L, target, n_max=nmax,
                                     grid_density=grid)
        return rho_from_deviations(records), records
    # both: tightest bracket of whichever routes succeed
    candidates = []
    failures = []
    records = None
    try:
        candidates.append(estimate_rho_green(L, grid_resolution=grid))
    except NumericalError as exc:
        failures.append(f"green-saddle: {exc}")
    try:
        records = deviation_sequence(L, target, n_max=nmax,
                                     grid_density=grid)
        candidates.append(rho_from_deviations(records))
    except NumericalError as exc:
        records = None
        failures.append(f"deviation-fit: {exc}")
    if not candidates:
        raise NumericalError("no route succeeded: " + "; ".join(failures))
    return min(candidates, key=lambda e: e.width), records


# ---------------------------------------------------------------------------
# subcommands

def _cmd_green(args) -> int:
    L = _load_geometry(args.geometry)
    model = solve_green(list(L.components),
                        charges_per_component=args.charges)
    if args.csv:
        x0, y0, x1, y1 = L.bounds()
        pad = 0.35 * L.diameter
        n = args.csv_resolution
        xs = np.linspace(x0 - pad, x1 + pad, n)
        ys = np.linspace(y0 - pad, y1 + pad, n)
        X, Y = np.meshgrid(xs, ys)
        zs = (X + 1j * Y).ravel()
        # the equilibrium potential extends continuously by zero across the
        # boundary; grid nodes falling on the set get that limit value rather
        # than tripping the field evaluator's interior refusal
        outside = np.array([not any(contains(s, z) for s in L.components)
                            for z in zs])
        g = np.zeros(len(zs))
        if outside.any():
            g[outside] = eval_green_many(model, zs[outside])
        _write_csv(args.csv, ["x", "y", "g"],
                   zip(zs.real, zs.imag, g))
    _emit({
        "robin_constant": model.robin_constant,
        "capacity": capacity(model),
        "residual_norm": model.residual_norm,
        "n_components": len(L.components),
        "charges_per_component": args.charges,
        "provenance": "derived",
    })
    return EXIT_OK


def _cmd_rho(args) -> int:
    L = _load_geometry(args.geometry)
    est, records = _estimate_rho(L, args.method, args.nmax, args.grid)
    if args.csv and records is not None:
        _write_csv(args.csv, ["n", "d_hat", "lower_bound"],
                   [(r.n, r.d_hat, r.lower_bound) for r in records])
    elif args.csv:
        print("note: no deviation records to write (method=%s)"
              % args.method, file=sys.stderr)
    payload = _rho_payload(est)
    payload["provenance"] = "derived"
    _emit(payload)
    return EXIT_OK


def _cmd_classify(args) -> int:
    L = _load_geometry(args.geometry)
    z0 = _parse_point(args.z0)
    if args.lam is not None:
        seq = SequenceSpec.from_generator(float(_parse_rational(args.lam)))
    elif args.limit_points:
        pts = tuple(
            math.inf if p.strip() in ("inf", "Infinity") else
            float(_parse_rational(p.strip()))
            for p in args.limit_points.split(","))
        seq = SequenceSpec(limit_points=pts)
    else:
        raise InputError("give either --lambda or --limit-points")
    bounds = compute_bounds(L, z0)
    verdict = classify_sequence(bounds, seq)
    if bounds.rho.width < DEFAULTS.chain_bracket_max:
        chain = verify_chain(bounds)
    else:
        chain = {"skipped": "rho bracket too wide for chain verification"}
    _emit({
        "outcome": verdict.outcome,
        "rule": verdict.rule,
        "margins": {k: list(v) for k, v in verdict.margins.items()},
        "narrative": verdict.narrative,
        "sequence": {"limit_points": list(seq.limit_points),
                     "liminf": seq.liminf, "limsup": seq.limsup},
        "bounds": {
            "z0": bounds.z0, "r0": bounds.r0, "R0": bounds.R0,
            "rho": _rho_payload(bounds.rho),
            "M": bounds.M, "M_uncertainty": bounds.M_uncertainty,
            "M0": bounds.M0, "M0_uncertainty": bounds.M0_uncertainty,
        },
        "chain_check": _sanitize(chain),
        "provenance": "derived",
    })
    return EXIT_OK


def _cmd_construct(args) -> int:
    L = _load_geometry(args.geometry)
    z0 = _parse_point(args.z0)
    p0 = Polynomial(z0, _parse_coeffs(args.p0))
    u = Polynomial(z0, _parse_coeffs(args.u))
    lam = float(_parse_rational(args.lam))
    step = construct_step(L, z0, p0, u, eps0=args.eps0, s0=args.s0,
                          lam=lam, n_max=args.nmax)
    if args.csv:
        _write_csv(args.csv,
                   ["N", "d_hat", "err_K0", "err_Pi", "weighted"],
                   [(t["N"], t["d_hat"], t["err_K0"], t["err_Pi"],
                     t["weighted"])
                    for t in step.diagnostics["trajectory"]])
    rho = step.diagnostics["rho"]
    _emit({
        "N0": step.N0,
        "beta_N0": step.beta_N0,
        "err_K0": step.err_K0,
        "err_Pi": step.err_Pi,
        "S": {"center": step.S.center,
              "coeffs": list(step.S.coeffs),
              "degree": step.S.degree},
        "rate_c0": step.diagnostics["rate_c0"],
        "lambda": lam,
        "window": [rho.upper, 1.0 / rho.upper],
        "provenance": "derived",
    })
    return EXIT_OK


def _cmd_trace(args) -> int:
    if args.ones is not None:
        coeffs = [1] * (args.ones + 1)
    elif args.coeffs:
        coeffs = list(_parse_coeffs(args.coeffs))
    else:
        raise InputError("give either --coeffs or --ones")
    lam = _parse_rational(args.lam)
    w = _parse_point(args.w)
    values = weighted_sum_trace(coeffs, lam, w, (args.n_min, args.nmax))
    if args.csv:
        _write_csv(args.csv, ["n", "modulus"], values)
    payload = {
        "lambda": str(lam),
        "w": w,
        "n_min": args.n_min,
        "n_max": args.nmax,
        "n_points": len(values),
        "first": {"n": values[0][0], "modulus": values[0][1]},
        "last": {"n": values[-1][0], "modulus": values[-1][1]},
        "max_modulus": max(v for _, v in values),
        "min_modulus": min(v for _, v in values),
        "provenance": "derived",
    }
    if not args.csv:
        payload["values"] = [[n, v] for n, v in values]
    _emit(payload)
    return EXIT_OK


def _fact_check(fact, computed) -> dict:
    """Evaluate one expected fact against the computed quantities."""
    got = computed.get(fact.quantity)
    ok = False
    if got is not None:
        slack = computed.get("_width", 0.0) if fact.quantity == "rho" else 0.0
        if fact.relation == "le":
            ok = got <= fact.value + slack
        elif fact.relation == "ge":
            ok = got >= fact.value - slack
        elif fact.relation == "lt":
            ok = got < fact.value
        elif fact.relation == "gt":
            ok = got > fact.value
        elif fact.relation == "eq":
            ok = got == fact.value
        elif fact.relation == "within":
            ok = abs(got - fact.value) <= fact.tolerance
    row = {
        "quantity": fact.quantity,
        "relation": fact.relation,
        "expected": fact.value,
        "computed": got,
        "pass": bool(ok),
        "provenance": fact.provenance,
    }
    if fact.relation == "within":
        row["tolerance"] = fact.tolerance
    if fact.note:
        row["note"] = fact.note
    return row


def _cmd_example(args) -> int:
    params = {}
    if args.name == "ex31":
        params["theta0"] = args.theta0
    elif args.name == "ex32":
        params["beta0"] = args.beta0
        params["m0"] = args.m0
        params["h_search_max"] = args.h_search_max
    preset = get_preset(args.name, **params)
    if args.write_geometry:
        with open(args.write_geometry, "w", encoding="utf-8") as fh:
            fh.write(_jser(geometry_to_dict(preset.L)) + "\n")
    est, _ = _estimate_rho(preset.L, args.method, args.nmax, None)

    computed = {"rho": est.value, "_width": est.width}
    lam_quantities = [f.quantity for f in preset.expected_facts
                      if f.quantity.startswith("verdict:lambda=")]
    if lam_quantities:
        bounds = compute_bounds(preset.L, preset.z0, rho=est)
        for q in lam_quantities:
            lam = float(Fraction(q.split("=", 1)[1]))
            verdict = classify_sequence(bounds,
                                        SequenceSpec.from_generator(lam))
            computed[q] = verdict.outcome

    facts = [_fact_check(f, computed) for f in preset.expected_facts]
    _emit({
        "scenario": preset.name,
        "params": _sanitize(preset.params),
        "z0": complex(preset.z0),
        "n_components": len(preset.L.components),
        "rho": _rho_payload(est),
        "facts": facts,
        "all_pass": all(f["pass"] for f in facts),
        "notes": list(preset.notes),
        "provenance": "derived",
    })
    return EXIT_OK


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="convfactor",
        description="Potential-theoretic convergence factors and weighted "
                    "partial-sum analysis on unions of planar compact sets.")
    ap.add_argument("--version", action="version",
                    version=f"convfactor {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("green", help="equilibrium potential model of a "
                                     "geometry")
    g.add_argument("geometry", help="geometry JSON file")
    g.add_argument("--charges", type=int, default=None,
                   help="charges per component (default: adaptive)")
    g.add_argument("--csv", default=None,
                   help="write a level-curve grid (x, y, g) to this file")
    g.add_argument("--csv-resolution", type=int, default=64,
                   help="grid resolution per axis for --csv (default 64)")
    g.set_defaults(func=_cmd_green)

    r = sub.add_parser("rho", help="asymptotic convergence factor")
    r.add_argument("geometry", help="geometry JSON file")
    r.add_argument("--method", choices=("green", "deviation", "both"),
                   default="both")
    r.add_argument("--nmax", type=int, default=None,
                   help="max degree for the deviation route")
    r.add_argument("--grid", type=int, default=None,
                   help="grid density (deviation) / raster resolution "
                        "(green)")
    r.add_argument("--csv", default=None,
                   help="write deviation records (n, d_hat, lower_bound)")
    r.set_defaults(func=_cmd_rho)

    c = sub.add_parser("classify", help="verdict for a weight sequence")
    c.add_argument("geometry", help="geometry JSON file")
    c.add_argument("--z0", default="0,0",
                   help="expansion point x,y (default 0,0)")
    c.add_argument("--lambda", dest="lam", default=None,
                   help="geometric generator (rational like 1/20 or "
                        "decimal)")
    c.add_argument("--limit-points", default=None,
                   help="comma list of root-sequence limit points "
                        "(inf allowed)")
    c.set_defaults(func=_cmd_classify)

    k = sub.add_parser("construct", help="two-sided approximation step")
    k.add_argument("geometry", help="geometry JSON file")
    k.add_argument("--z0", default="0,0", help="expansion point x,y")
    k.add_argument("--p0", required=True,
                   help="comma list of target coefficients on component 0")
    k.add_argument("--u", required=True,
                   help="comma list of target coefficients on the rest")
    k.add_argument("--eps0", type=float, required=True,
                   help="error budget on component 0")
    k.add_argument("--s0", type=int, required=True,
                   help="far-side error budget is 1/s0")
    k.add_argument("--lambda", dest="lam", required=True,
                   help="weight generator lambda")
    k.add_argument("--nmax", type=int, default=None,
                   help="degree search ceiling (default %d)"
                        % DEFAULTS.construct_n_max)
    k.add_argument("--csv", default=None,
                   help="write the N-search trajectory to this file")
    k.set_defaults(func=_cmd_construct)

    t = sub.add_parser("trace", help="weighted partial-sum modulus trace")
    t.add_argument("--coeffs", default=None,
                   help="comma list of Taylor coefficients about z0")
    t.add_argument("--ones", type=int, default=None,
                   help="use n+1 unit coefficients instead of --coeffs")
    t.add_argument("--lambda", dest="lam", required=True,
                   help="weight generator (rational strings stay exact)")
    t.add_argument("--w", required=True, help="evaluation point x,y")
    t.add_argument("--n-min", type=int, default=1)
    t.add_argument("--nmax", type=int, default=DEFAULTS.trace_n_max)
    t.add_argument("--csv", default=None,
                   help="write (n, modulus) rows to this file")
    t.set_defaults(func=_cmd_trace)

    e = sub.add_parser("example", help="run a built-in scenario")
    e.add_argument("name", choices=("ex31", "ex32", "ex33"))
    e.add_argument("--theta0", type=float, default=18.0,
                   help="ex31 center separation (default 18)")
    e.add_argument("--beta0", type=float, default=0.5,
                   help="ex32 target factor (default 0.5)")
    e.add_argument("--m0", type=int, default=9,
                   help="ex32 ring size (default 9)")
    e.add_argument("--h-search-max", type=float, default=1e12,
                   help="ex32 separation search ceiling")
    e.add_argument("--method", choices=("green", "deviation", "both"),
                   default="both")
    e.add_argument("--nmax", type=int, default=None,
                   help="max degree for the deviation route")
    e.add_argument("--write-geometry", default=None,
                   help="also write the scenario geometry JSON here")
    e.set_defaults(func=_cmd_example)
    return ap


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    tol = ",".join("%s=%s" % (k, v) for k, v in DEFAULTS.as_dict().items())
    print("convfactor %s | args: %s | tolerances: %s"
          % (__version__, " ".join(argv), tol), file=sys.stderr)
    try:
        return args.func(args)
    except InputError as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL
    except ConvfactorError as exc:
        print("internal check failed: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
