"""End-to-end acceptance checks, one per shipped guarantee.

Each test prints a single ``ACCEPTANCE n: PASS/FAIL`` line summarizing the
measured quantities, then asserts.  Heavy inputs come from the session
fixtures, so these tests measure the same objects the unit tests probe.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from oracles.lp_minimax import lp_minimax

from convfactor.classify import SequenceSpec, classify_sequence, verify_chain
from convfactor.construct import weighted_sum_trace
from convfactor.geometry import Disk
from convfactor.minimax import (
    PiecewiseTarget,
    bernstein_check,
    best_polynomial,
    deviation_sequence,
    rho_from_deviations,
)
from convfactor.minimax import _component_grid
from convfactor.potential import capacity, eval_green_many, solve_green
from convfactor.presets import EX33_RHO, EX33_RHO_TOL, ex31_bound


def _report(n: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, detail


def test_polygon_pair_factor_by_both_routes(ex33_green_rho, ex33_dev_rho):
    parts = []
    ok = True
    for est in (ex33_green_rho, ex33_dev_rho):
        hit = (abs(est.value - EX33_RHO) <= EX33_RHO_TOL
               and est.lower <= est.value <= est.upper
               and est.lower <= EX33_RHO <= est.upper
               and est.diagnostics["elapsed_s"] < 300.0)
        ok = ok and hit
        parts.append(f"{est.method} {est.value:.6f} in "
                     f"[{est.lower:.6f}, {est.upper:.6f}] "
                     f"({est.diagnostics['elapsed_s']:.1f}s)")
    _report(1, ok, f"reference {EX33_RHO} +/- {EX33_RHO_TOL}: "
                   + "; ".join(parts))


def test_two_disk_threshold_and_bracket(ex31_green_rho):
    hits = [t for t in range(5, 31) if ex31_bound(float(t)) < 0.5]
    est = ex31_green_rho
    ok = (hits[0] == 18
          and est.value <= 0.48734 + est.width
          and est.value >= 1.0 / 17.0)
    _report(2, ok,
            f"ceiling first < 1/2 at separation {hits[0]}; estimate "
            f"{est.value:.6f} <= 0.48734 + width {est.width:.2g} and "
            f">= 1/17 = {1.0 / 17.0:.6f}")


def test_single_disk_analytic_oracle():
    rng = np.random.default_rng(33)
    worst_field = 0.0
    worst_cap = 0.0
    for center, radius in ((0j, 1.0), (3.0 - 2.0j, 2.0), (-1.0 + 1.0j, 0.5)):
        model = solve_green([Disk(center, radius)])
        r = radius * np.exp(rng.uniform(np.log(1.001), np.log(1e3),
                                        size=1000))
        zs = center + r * np.exp(1j * rng.uniform(0, 2 * np.pi, size=1000))
        exact = np.log(np.abs(zs - center) / radius)
        worst_field = max(worst_field,
                          float(np.max(np.abs(eval_green_many(model, zs)
                                              - exact))))
        worst_cap = max(worst_cap, abs(capacity(model) - radius))
    ok = worst_field <= 1e-8 and worst_cap <= 1e-9
    _report(3, ok,
            f"3 disks x 1000 exterior points: max field error "
            f"{worst_field:.2e} (<= 1e-08), max capacity error "
            f"{worst_cap:.2e} (<= 1e-09)")


def test_weight_sequence_verdict_table(ex31_bounds):
    expected = {
        2.0: ("NONEMPTY", "limit_point_in_window"),
        1.0 / 20.0: ("EMPTY", "decay_below_distance_ratio"),
        20.0: ("EMPTY", "growth_above_potential_bound"),
        2.5: ("UNKNOWN", "undecided_gap"),
    }
    got = {}
    for lam in expected:
        v = classify_sequence(ex31_bounds, SequenceSpec.from_generator(lam))
        got[lam] = (v.outcome, v.rule)
    ok = got == expected
    _report(4, ok, "; ".join(f"lambda={lam:g} -> {o} ({r})"
                             for lam, (o, r) in got.items()))


def test_chain_inequalities_three_geometries(ex31_bounds, ex32_bounds,
                                             disk_hex_bounds):
    parts = []
    ok = True
    for name, bounds in (("two-disk", ex31_bounds),
                         ("ringed-disk", ex32_bounds),
                         ("disk+hexagon", disk_hex_bounds)):
        rep = verify_chain(bounds)
        ok = ok and rep["pass"]
        parts.append(
            f"{name}: 1/R0={rep['inv_R0']:.3g} < rho_lo="
            f"{rep['rho_lower']:.6g} <= rho_hi={rep['rho_upper']:.6g} < 1, "
            f"1/rho_lo={rep['inv_rho_lower']:.4g} < M={rep['M']:.6g} "
            f"[{'PASS' if rep['pass'] else 'FAIL'}]")
    _report(5, ok, "; ".join(parts))


def test_minimax_against_lp_oracle_and_tail_fit(ex31_L, ex31_records):
    target = PiecewiseTarget.constants([0.0, 1.0])
    worst_rel = 0.0
    for n in (4, 8, 12):
        rec = best_polynomial(ex31_L, target, n)
        grids = [_component_grid(s, rec.diagnostics["grid_density"])
                 for s in ex31_L.components]
        exact = lp_minimax(np.concatenate(grids), target.values_on(grids),
                           n, center=9.0, scale=10.0)
        worst_rel = max(worst_rel, abs(rec.d_hat - exact) / exact)
    d_hats = [r.d_hat for r in ex31_records]
    monotone = all(b <= a + 1e-12 for a, b in zip(d_hats, d_hats[1:]))
    fit = rho_from_deviations(ex31_records)
    r2 = fit.diagnostics["r2"]
    ok = worst_rel <= 0.02 and monotone and r2 >= 0.98
    _report(6, ok,
            f"LP agreement at n in (4, 8, 12): worst {100 * worst_rel:.2f}% "
            f"(<= 2%); d_hat non-increasing over n = 1..40: {monotone}; "
            f"tail fit R^2 = {r2:.4f} (>= 0.98)")


def test_target_independence(ex31_independence):
    rep = ex31_independence
    gaps = ", ".join(
        f"|{p['i']}-{p['j']}| = {p['gap']:.4f} <= {p['allowed']:.4f}"
        for p in rep["pairs"])
    _report(7, bool(rep["pass"]),
            f"3 targets, estimates {[f'{v:.4f}' for v in rep['values']]}; "
            f"pairwise {gaps}")


def test_universality_step(ex31_step):
    s = ex31_step
    ok = (s.N0 <= 200 and s.err_K0 < 0.1 and s.err_Pi < 1.0 / 10.0
          and s.S.degree <= s.N0 and s.diagnostics["rate_c0"] < 1.0)
    _report(8, ok,
            f"N0 = {s.N0} (<= 200), err_K0 = {s.err_K0:.4f} (< 0.1), "
            f"err_Pi = {s.err_Pi:.4f} (< 0.1), deg S = {s.S.degree} "
            f"(<= N0), rate c0 = {s.diagnostics['rate_c0']:.4f} (< 1)")


def test_decay_and_blowup_traces():
    # Taylor coefficients of 1/(1-z) about 0 are all ones
    small = weighted_sum_trace([1] * 501, Fraction(1, 20), 18, 500)
    big = weighted_sum_trace([1] * 101, 20, 18, 100)
    first_exact = small[0] == (1, 0.95)
    decayed = small[-1][1] < 1e-6
    blew_up = big[-1][1] > 1e6
    ok = first_exact and decayed and blew_up
    _report(9, ok,
            f"lambda=1/20: first value {small[0][1]!r} (== 0.95 exactly: "
            f"{first_exact}), |u_500| = {small[-1][1]:.2e} (< 1e-06); "
            f"lambda=20: |u_100| = {big[-1][1]:.2e} (> 1e+06)")


def test_growth_bound_on_all_witnesses(ex31_L, ex31_model, ex31_records,
                                       ex32, ex33_L, ex33_model):
    ex32_model = solve_green(list(ex32.L.components))
    small = PiecewiseTarget.constants([0.0] + [1.0] * ex32.L.n_outer)
    ex32_records = deviation_sequence(ex32.L, small, n_min=4, n_max=8)
    hex_target = PiecewiseTarget.constants([0.0, 1.0])
    ex33_records = deviation_sequence(ex33_L, hex_target, n_min=4, n_max=8)

    total = 0
    worst = math.inf
    for L, model, records in ((ex31_L, ex31_model, ex31_records),
                              (ex32.L, ex32_model, ex32_records),
                              (ex33_L, ex33_model, ex33_records)):
        for k, rec in enumerate(records):
            if rec.witness.degree < 1:
                continue
            rep = bernstein_check(rec.witness, L, model, n_points=50,
                                  rng=np.random.default_rng(7000 + k))
            assert rep["pass"] and rep["n_points"] == 50
            worst = min(worst, rep["worst_margin"])
            total += 1
    ok = total >= 40 and worst > -1e-6
    _report(10, ok,
            f"{total} witnesses across 3 geometries, 50 random exterior "
            f"points each: 0 violations, smallest margin {worst:.3e}")


def test_repeated_runs_byte_identical(cli, geom_files):
    commands = {
        "green": ["green", geom_files["ex31"]],
        "rho": ["rho", geom_files["ex33"], "--method", "green"],
        "classify": ["classify", geom_files["ex31"], "--lambda", "2"],
        "construct": ["construct", geom_files["ex31"], "--p0", "0",
                      "--u", "1", "--eps0", "0.1", "--s0", "10",
                      "--lambda", "2", "--nmax", "8"],
        "trace": ["trace", "--ones", "50", "--lambda", "1/20", "--w", "18"],
        "example": ["example", "ex31", "--method", "green"],
    }
    identical = []
    ok = True
    for name, argv in commands.items():
        first, second = cli(argv), cli(argv)
        same = (first.returncode == second.returncode == 0
                and first.stdout == second.stdout)
        ok = ok and same
        identical.append(f"{name}: {'identical' if same else 'DIFFERS'}")
    _report(11, ok, "two runs of each subcommand, stdout compared "
                    "byte-for-byte — " + "; ".join(identical))
