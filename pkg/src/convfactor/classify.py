"""Classification of weight sequences against a fixed two-part geometry.

Setting: a compact set with distinguished component K0 (hosting the expansion
point z0) and remainder Pi.  A positive weight sequence (b_n) acts on Taylor
partial sums; whether the weighted sums of some function can approximate
everything on Pi depends only on the limit behaviour of b_n^(1/n), and the
decision splits into three regimes:

* decay_below_distance_ratio   — limsup b_n^(1/n) below r0/R0: the weighted
  sums die off too fast on Pi; the universal class is empty.
* growth_above_potential_bound — liminf b_n^(1/n) above the growth ceiling
  M0 = exp(max g over the analysis disk): the weighted sums blow up; empty.
* limit_point_in_window        — some limit point falls strictly inside
  (rho, 1/rho): the universal class is nonempty.  The limit point 1 works
  unconditionally (the classical unweighted case).

Between those regimes lies a genuine open gap; sequences landing there are
reported UNKNOWN rather than extrapolated.  All strict inequalities are
enforced with explicit numerical slack: a verdict is never claimed on the
strength of round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .config import DEFAULTS
from .errors import (
    BadSequenceSpec,
    InputError,
    InternalInconsistency,
    NumericalError,
    PointNotInterior,
    ResidualTooLarge,
)
from .geometry import (
    CompactSet,
    Disk,
    contains,
    dist_interior_point_to_complement,
    dist_point_to_shape,
)
from .minimax import estimate_rho_deviation
from .potential import (
    estimate_rho_green,
    max_green_on_disk,
    max_green_on_shape,
    solve_green,
)
from .records import RhoEstimate

OUTCOME_NONEMPTY = "NONEMPTY"
OUTCOME_EMPTY = "EMPTY"
OUTCOME_UNKNOWN = "UNKNOWN"

RULE_DECAY = "decay_below_distance_ratio"
RULE_GROWTH = "growth_above_potential_bound"
RULE_WINDOW = "limit_point_in_window"
RULE_GAP = "undecided_gap"


@dataclass(frozen=True)
class SequenceSpec:
    """Limit behaviour of the n-th roots of a positive weight sequence.

    limit_points holds the limit points of b_n^(1/n) (math.inf allowed);
    liminf and limsup are derived from it, never supplied.  A geometric
    sequence b_n = lambda^n is described by its single limit point |lambda|.
    """

    limit_points: tuple
    generator: float | None = None

    def __post_init__(self):
        pts = tuple(sorted(float(p) for p in self.limit_points))
        if not pts:
            raise BadSequenceSpec("need at least one limit point")
        if any(p < 0 or math.isnan(p) for p in pts):
            raise BadSequenceSpec(f"limit points must be >= 0, got {pts}")
        object.__setattr__(self, "limit_points", pts)
        if self.generator is not None:
            g = float(self.generator)
            if g == 0 or math.isnan(g) or math.isinf(g):
                raise BadSequenceSpec(f"generator must be finite nonzero, "
                                      f"got {g}")
            object.__setattr__(self, "generator", g)
            if pts != (abs(g),):
                raise BadSequenceSpec(
                    f"generator {g} implies the single limit point {abs(g)}, "
                    f"got {pts}")

    @classmethod
    def from_generator(cls, lam: float) -> "SequenceSpec":
        return cls(limit_points=(abs(float(lam)),), generator=float(lam))

    @property
    def liminf(self) -> float:
        return self.limit_points[0]

    @property
    def limsup(self) -> float:
        return self.limit_points[-1]


@dataclass(frozen=True)
class BoundsRecord:
    """Geometry and potential bounds that drive sequence classification.

    r0/R0 are exact point-to-set distances; rho is the tightest available
    convergence-factor bracket; M and M0 are growth ceilings exp(max g) of
    the complement-of-Pi field over K0's boundary and over the analysis
    disk D(z0, r0), each with an uncertainty derived from the potential
    model's boundary residual.
    """

    z0: complex
    r0: float
    R0: float
    rho: RhoEstimate
    M: float
    M_uncertainty: float
    M0: float
    M0_uncertainty: float
    diagnostics: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Verdict:
    outcome: str
    rule: str
    margins: dict
    narrative: str


def compute_bounds(L: CompactSet, z0: complex,
                   rho: RhoEstimate | None = None) -> BoundsRecord:
    """Distances, convergence factor, and growth ceilings for (L, z0).

    The convergence factor is attempted by both routes — level-set merge of
    the Green's function and the deviation-sequence fit — and the tighter
    bracket wins; one route may fail (far-separated symmetric geometry
    defeats the deviation fit, sub-raster detail can defeat the level-set
    search) as long as the other succeeds.  A precomputed estimate may be
    injected through ``rho`` to skip the estimation.
    """
    z0 = complex(z0)
    if len(L.components) < 2:
        raise InputError("classification needs K0 plus at least one other "
                         "component")
    K0 = L.components[0]
    if not contains(K0, z0):
        raise PointNotInterior(f"z0={z0:.6g} is not interior to component 0")
    r0 = dist_interior_point_to_complement(z0, K0)
    if r0 <= 0:
        raise PointNotInterior(f"z0={z0:.6g} sits on the boundary of "
                               f"component 0")
    R0 = min(dist_point_to_shape(z0, s) for s in L.outer)

    routes: dict = {}
    if rho is None:
        candidates = []
        try:
            est = estimate_rho_green(L)
            candidates.append(est)
            routes["green-saddle"] = est
        except NumericalError as exc:
            routes["green-saddle"] = f"failed: {exc}"
        try:
            est = estimate_rho_deviation(L)
            candidates.append(est)
            routes["deviation-fit"] = est
        except NumericalError as exc:
            routes["deviation-fit"] = f"failed: {exc}"
        if not candidates:
            raise NumericalError(
                "no convergence-factor route succeeded: "
                + "; ".join(f"{k}: {v}" for k, v in routes.items()))
        rho = min(candidates, key=lambda e: e.width)
    else:
        routes["injected"] = rho

    # the growth ceilings need a field model for the far components alone;
    # a small polygon on its own can plateau just above the residual gate
    # (its corner fields carry all the equilibrium mass), so escalate the
    # charge budget, then fall back to a coarse-budget solve whose honestly
    # measured residual propagates into the M uncertainties
    pi_model = None
    for n_charges in (None, 512):
        try:
            pi_model = solve_green(list(L.outer),
                                   charges_per_component=n_charges)
            break
        except ResidualTooLarge:
            continue
    if pi_model is None:
        pi_model = solve_green(list(L.outer), charges_per_component=240)
    resid = pi_model.residual_norm
    g_max, g_arg = max_green_on_shape(pi_model, K0)
    g0_max, g0_arg = max_green_on_disk(pi_model, Disk(z0, r0))
    M = math.exp(g_max)
    M0 = math.exp(g0_max)
    # the charge model's boundary residual bounds the field error everywhere
    # outside Pi (maximum principle), so exp(max g) is known to this factor
    M_unc = M * math.expm1(2.0 * resid)
    M0_unc = M0 * math.expm1(2.0 * resid)
    return BoundsRecord(
        z0=z0, r0=r0, R0=R0, rho=rho,
        M=M, M_uncertainty=M_unc, M0=M0, M0_uncertainty=M0_unc,
        diagnostics={"routes": routes, "pi_residual": resid,
                     "selected_route": rho.method,
                     "M_argmax": g_arg, "M0_argmax": g0_arg})


def _window_pick(bounds: BoundsRecord, seq: SequenceSpec):
    """Best limit point inside (rho_upper, 1/rho_upper), by window margin."""
    lo = bounds.rho.upper
    hi = 1.0 / bounds.rho.upper
    best = None
    for p in seq.limit_points:
        if math.isinf(p):
            continue
        margin = min(p - lo, hi - p)
        if best is None or margin > best[1]:
            best = (p, margin)
    return best, lo, hi


def classify_sequence(bounds: BoundsRecord, seq: SequenceSpec) -> Verdict:
    """Tri-state verdict for a weight sequence on a fixed geometry.

    Decision order: decay rule, growth rule, window rule, gap.  Every fired
    rule records its margin together with the uncertainty it was required
    to clear; strictness always errs toward UNKNOWN.  A decay verdict and a
    window verdict firing together would contradict the chain inequality
    r0/R0 <= rho, so that combination raises InternalInconsistency instead
    of picking one.
    """
    slack = DEFAULTS.strict_slack
    ratio = bounds.r0 / bounds.R0
    width = bounds.rho.width

    decay_fires = seq.limsup < ratio - slack
    growth_floor = bounds.M0 + bounds.M0_uncertainty
    growth_fires = seq.liminf > growth_floor + slack
    pick, win_lo, win_hi = _window_pick(bounds, seq)
    unconditional = any(p == 1.0 for p in seq.limit_points)
    window_fires = unconditional or (pick is not None and pick[1] > width)

    if decay_fires and window_fires:
        raise InternalInconsistency(
            f"decay rule (limsup {seq.limsup:.6g} < r0/R0 {ratio:.6g}) and "
            f"window rule (limit point {pick[0]:.6g} in ({win_lo:.6g}, "
            f"{win_hi:.6g})) cannot both hold; the bounds record is "
            f"inconsistent")

    if decay_fires:
        margins = {"distance_ratio_minus_limsup": (ratio - seq.limsup, slack)}
        narrative = (
            f"limsup of the root sequence is {seq.limsup:.6g}, strictly "
            f"below r0/R0 = {bounds.r0:.6g}/{bounds.R0:.6g} = {ratio:.6g}; "
            f"the weighted partial sums decay on the far component and the "
            f"universal class is empty.")
        return Verdict(OUTCOME_EMPTY, RULE_DECAY, margins, narrative)

    if growth_fires:
        lim = seq.liminf
        gap = math.inf if math.isinf(lim) else lim - growth_floor
        margins = {"liminf_minus_growth_bound": (gap,
                                                 bounds.M0_uncertainty)}
        narrative = (
            f"liminf of the root sequence is {lim:.6g}, strictly above the "
            f"growth ceiling M0 = {bounds.M0:.9g} (uncertainty "
            f"{bounds.M0_uncertainty:.3g}); the weighted partial sums blow "
            f"up on the analysis disk and the universal class is empty.")
        return Verdict(OUTCOME_EMPTY, RULE_GROWTH, margins, narrative)

    if window_fires:
        if unconditional:
            point, margin = 1.0, min(1.0 - win_lo, win_hi - 1.0)
            extra = (" The limit point 1 makes the class nonempty "
                     "unconditionally (classical unweighted case).")
        else:
            point, margin = pick
            extra = ""
        margins = {"window_margin": (margin, width),
                   "limit_point": (point, 0.0)}
        narrative = (
            f"the root sequence has limit point {point:.6g} inside the "
            f"window ({win_lo:.9g}, {win_hi:.9g}) with margin {margin:.6g} "
            f"exceeding the bracket width {width:.3g}; the universal class "
            f"is nonempty.{extra}")
        return Verdict(OUTCOME_NONEMPTY, RULE_WINDOW, margins, narrative)

    margins = {
        "gap_below_window": (win_lo - seq.limsup, width),
        "gap_above_window": (seq.liminf - win_hi, width),
        "liminf_vs_growth_bound": (
            (seq.liminf - growth_floor) if not math.isinf(seq.liminf)
            else math.inf, bounds.M0_uncertainty),
        "limsup_vs_distance_ratio": (seq.limsup - ratio, slack),
    }
    narrative = (
        f"no rule fires: limsup {seq.limsup:.6g} is not below r0/R0 = "
        f"{ratio:.6g}, liminf {seq.liminf:.6g} is not above M0 = "
        f"{bounds.M0:.9g}, and no limit point clears the window "
        f"({win_lo:.9g}, {win_hi:.9g}) by more than the bracket width; "
        f"this is the open gap where neither emptiness nor nonemptiness "
        f"is decided.")
    return Verdict(OUTCOME_UNKNOWN, RULE_GAP, margins, narrative)


def verify_chain(bounds: BoundsRecord) -> dict:
    """Check 1/R0 < rho_lower, rho_upper < 1 and 1/rho_lower < M.

    The three links tie the exact geometry, the convergence factor, and the
    growth ceiling together; a FAIL means at least one estimator is wrong
    (the report is still returned — failing is a result, not an error).
    Requires a usable bracket first: width below chain_bracket_max.
    """
    width = bounds.rho.width
    if width >= DEFAULTS.chain_bracket_max:
        raise InputError(
            f"rho bracket width {width:.4g} is too degenerate for chain "
            f"verification (needs < {DEFAULTS.chain_bracket_max})")
    inv_R0 = 1.0 / bounds.R0
    inv_rho = 1.0 / bounds.rho.lower
    ceiling = bounds.M + bounds.M_uncertainty
    checks = {
        "inv_R0_below_rho": inv_R0 < bounds.rho.lower,
        "rho_below_one": bounds.rho.upper < 1.0,
        "inv_rho_below_M": inv_rho < ceiling,
    }
    return {
        "pass": all(checks.values()),
        "checks": checks,
        "inv_R0": inv_R0,
        "rho_lower": bounds.rho.lower,
        "rho_upper": bounds.rho.upper,
        "inv_rho_lower": inv_rho,
        "M": bounds.M,
        "M_uncertainty": bounds.M_uncertainty,
        "bracket_width": width,
    }
