"""Constructive universality step and weighted partial-sum traces.

The heart of the universality mechanism is a single approximation step: find
one polynomial S of degree at most N whose own values sit within eps0 of a
prescribed polynomial p0 on the distinguished component K0, while its
weighted N-th partial sum lambda^N * S lands within 1/s0 of another
prescribed polynomial u on the far components.  Feeding the two-sided
piecewise target (p0 on K0, lambda^{-N} u elsewhere) to the minimax solver
makes both demands a single deviation, and the deviation decays like
(lambda * rho)^N, which is < 1 exactly when lambda lies inside the window
(rho, 1/rho) — so the search over N terminates whenever the window condition
holds, and is refused otherwise rather than presented as a best effort.

The module also traces n -> |lambda^n * S_n(f, z0)(w)| for explicit Taylor
coefficient sequences, the raw material of the decay/blow-up demonstrations.
Traces run in exact rational arithmetic whenever the inputs allow it, so
printed values are correctly rounded rather than accumulated float noise.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .config import DEFAULTS
from .errors import (
    InputError,
    NumericalError,
    RefusedOutsideInterval,
    StepNotFound,
)
from .geometry import CompactSet, boundary_sample, contains
from .minimax import (
    PiecewiseTarget,
    Polynomial,
    best_polynomial,
    estimate_rho_deviation,
)
from .potential import estimate_rho_green
from .records import RhoEstimate


@dataclass(frozen=True)
class UniversalStep:
    """Successful universality step at degree N0.

    S is the constructed polynomial, centered at z0 with degree <= N0, so
    its own N0-th partial sum about z0 reproduces it coefficient-for-
    coefficient.  err_K0 and err_Pi are the two validation-grid errors
    (|S - p0| on K0 and |beta_N0 * S - u| on the far components), and
    beta_N0 = lambda**N0 is the weight the step was built for.
    """

    N0: int
    S: Polynomial
    err_K0: float
    err_Pi: float
    beta_N0: complex
    diagnostics: dict = field(default_factory=dict, compare=False)


def _default_rho(L: CompactSet) -> RhoEstimate:
    """Tightest available convergence-factor bracket for L."""
    candidates = []
    failures = []
    for route in (estimate_rho_green, estimate_rho_deviation):
        try:
            candidates.append(route(L))
        except NumericalError as exc:
            failures.append(f"{route.__name__}: {exc}")
    if not candidates:
        raise NumericalError("no convergence-factor route succeeded: "
                             + "; ".join(failures))
    return min(candidates, key=lambda e: e.width)


def _validation_grids(L: CompactSet, n: int) -> list:
    """Denser boundary grids than the construction used at degree n."""
    base = DEFAULTS.grid_density_factor * (n + 1)
    m = DEFAULTS.validation_grid_factor * base
    return [boundary_sample(s, m) for s in L.components]


def construct_step(L: CompactSet, z0: complex, p0: Polynomial, u: Polynomial,
                   eps0: float, s0: int, lam: float,
                   n_max: int | None = None,
                   rho: RhoEstimate | None = None) -> UniversalStep:
    """Search N = 1..n_max for a polynomial realizing the two-sided step.

    At each N the piecewise target (p0 on component 0, lambda^{-N} u on the
    rest) is handed to the minimax solver at degree N; the witness is
    accepted once BOTH measured errors — |S - p0| on K0 and
    |lambda^N S - u| on the far components — clear their thresholds on
    validation grids four times denser than the construction grids.
    First success wins; the whole trajectory of attempts is returned in the
    diagnostics together with the fitted geometric rate envelope.
    """
    z0 = complex(z0)
    if n_max is None:
        n_max = DEFAULTS.construct_n_max
    if not 1 <= n_max <= DEFAULTS.construct_n_max:
        raise InputError(f"n_max must be in 1..{DEFAULTS.construct_n_max}, "
                         f"got {n_max}")
    if not (eps0 > 0):
        raise InputError(f"eps0 must be positive, got {eps0}")
    if not (int(s0) == s0 and s0 >= 1):
        raise InputError(f"s0 must be a positive integer, got {s0}")
    s0 = int(s0)
    lam = float(lam)
    if len(L.components) < 2:
        raise InputError("the step needs K0 plus at least one far component")
    if not contains(L.components[0], z0):
        raise InputError(f"z0={z0:.6g} is not interior to component 0")
    if all(c == 0 for c in u.coeffs):
        raise InputError("u must not be identically zero")

    if rho is None:
        rho = _default_rho(L)
    lo, hi = rho.upper, 1.0 / rho.upper
    if not (lo < lam < hi):
        raise RefusedOutsideInterval(lam, lo, hi)

    trajectory = []
    best = None  # (max shortfall ratio, N, err_K0, err_Pi)
    hit = None   # first success: (N, err_K0, err_Pi, witness, scale)
    # once a step succeeds, keep measuring a few more degrees so the
    # geometric rate envelope is fit from real data, not a single point
    n_floor = min(n_max, DEFAULTS.rate_fit_min_points)
    for N in range(1, n_max + 1):
        pieces = [p0] + [u.scaled(lam ** (-N)) for _ in L.outer]
        target = PiecewiseTarget(tuple(pieces))
        rec = best_polynomial(L, target, N)
        w = rec.witness
        grids = _validation_grids(L, N)
        sw = w.evaluate(grids[0])
        err_K0 = float(np.max(np.abs(sw - p0.evaluate(grids[0]))))
        err_Pi = 0.0
        scale = lam ** N
        for g in grids[1:]:
            vals = scale * w.evaluate(g) - u.evaluate(g)
            err_Pi = max(err_Pi, float(np.max(np.abs(vals))))
        trajectory.append({"N": N, "d_hat": rec.d_hat, "err_K0": err_K0,
                           "err_Pi": err_Pi,
                           "weighted": rec.d_hat * scale})
        if hit is None:
            if err_K0 < eps0 and err_Pi < 1.0 / s0:
                hit = (N, err_K0, err_Pi, w, scale)
            else:
                shortfall = max(err_K0 / eps0, err_Pi * s0)
                if best is None or shortfall < best[0]:
                    best = (shortfall, N, err_K0, err_Pi)
        if hit is not None and N >= n_floor:
            break
    if hit is None:
        raise StepNotFound(n_max, best[2], best[3])
    N0, err_K0, err_Pi, w, scale = hit
    S = dataclasses.replace(w.recenter(z0), stable_eval=w.stable_eval)
    return UniversalStep(
        N0=N0, S=S, err_K0=err_K0, err_Pi=err_Pi, beta_N0=complex(scale),
        diagnostics={"trajectory": trajectory,
                     "rate_c0": _rate_envelope(trajectory),
                     "rho": rho, "lambda": lam, "eps0": eps0, "s0": s0})


def _rate_envelope(trajectory) -> float:
    """Geometric rate c0 fitted to the weighted deviations d_hat * lambda^N.

    The step mechanism predicts the weighted deviation is bounded by
    const * c0^N with c0 < 1 inside the window; the fit exposes the measured
    rate.  With fewer than two points the rate is undefined and 1.0 is
    returned (no decay demonstrated).
    """
    pts = [(t["N"], t["weighted"]) for t in trajectory if t["weighted"] > 0]
    if len(pts) < 2:
        return 1.0
    ns = np.array([p[0] for p in pts], dtype=float)
    logs = np.log([p[1] for p in pts])
    slope = np.polyfit(ns, logs, 1)[0]
    return float(math.exp(slope))


def _as_fraction(x) -> Fraction | None:
    """Exact Fraction for rational-representable real input, else None."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            return None
    if isinstance(x, float):
        if math.isfinite(x):
            return Fraction(x)
        return None
    if isinstance(x, complex):
        if x.imag == 0 and math.isfinite(x.real):
            return Fraction(x.real)
        return None
    return None


def _float_abs(x: Fraction) -> float:
    """Correctly rounded |x| as a float; overflow collapses to inf."""
    try:
        return abs(float(x))
    except OverflowError:
        return math.inf


def weighted_sum_trace(f_coeffs, lam, w, n_range) -> list:
    """Trace n -> |lambda^n * S_n(f, z0)(w)| for explicit coefficients.

    f_coeffs are the Taylor coefficients of f about the expansion point;
    S_n is the degree-n partial sum evaluated at w.  The weighted value
    satisfies the recurrence u_n = lambda * u_{n-1} + a_n * (lambda*w)^n
    with u_0 = a_0, which is carried in exact rational arithmetic whenever
    lambda is given as a Fraction, int, or string and w and the
    coefficients are real (each printed value is then the correctly
    rounded float of an exact rational, with overflow reported as inf);
    otherwise a float recurrence is used.  n_range is either a maximum n
    (traced from 1) or an inclusive (start, stop) pair.
    """
    if isinstance(n_range, (tuple, list)):
        n_lo, n_hi = int(n_range[0]), int(n_range[1])
    else:
        n_lo, n_hi = 1, int(n_range)
    if not 0 <= n_lo <= n_hi:
        raise InputError(f"bad trace range ({n_lo}, {n_hi})")
    if n_hi > DEFAULTS.trace_n_max:
        raise InputError(f"trace length {n_hi} exceeds the supported "
                         f"maximum {DEFAULTS.trace_n_max}")
    coeffs = list(f_coeffs)
    if len(coeffs) < n_hi + 1:
        coeffs = coeffs + [0] * (n_hi + 1 - len(coeffs))
    if any(isinstance(c, complex) and not math.isfinite(abs(c))
           or isinstance(c, float) and not math.isfinite(c)
           for c in coeffs):
        raise InputError("coefficients must be finite")

    exact = isinstance(lam, (Fraction, int, str))
    lam_q = _as_fraction(lam) if exact else None
    w_q = _as_fraction(w)
    coeff_q = [_as_fraction(c) for c in coeffs]
    if lam_q is not None and w_q is not None and all(
            q is not None for q in coeff_q):
        lw = lam_q * w_q
        u = coeff_q[0]
        pw = Fraction(1)
        out = []
        for n in range(1, n_hi + 1):
            pw *= lw
            u = lam_q * u + coeff_q[n] * pw
            if n >= n_lo:
                out.append((n, _float_abs(u)))
        if n_lo == 0:
            out.insert(0, (0, _float_abs(coeff_q[0])))
        return out

    lam_f = complex(float(lam)) if not isinstance(lam, complex) else lam
    w_f = complex(w)
    lw = lam_f * w_f
    u = complex(coeffs[0])
    pw = 1.0 + 0j
    out = []
    for n in range(1, n_hi + 1):
        pw *= lw
        c = complex(coeffs[n])
        # skip the vanishing term: 0 * overflowed power would poison u
        u = lam_f * u + (c * pw if c != 0 else 0j)
        if n >= n_lo:
            a = abs(u)
            out.append((n, a if math.isfinite(a) else math.inf))
    if n_lo == 0:
        out.insert(0, (0, abs(complex(coeffs[0]))))
    return out
