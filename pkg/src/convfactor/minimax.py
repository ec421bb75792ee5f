"""Discrete minimax approximation of piecewise-polynomial boundary data.

The central object is the degree-n deviation of a compact set L: the smallest
sup-norm distance, over all polynomials p of degree at most n, between p and a
target that prescribes one polynomial per component of L.  Deviations decay
geometrically in n when the components are separated, and the decay rate is an
independent estimator of the set's convergence factor (the level-set route in
:mod:`convfactor.potential` being the other one).

Minimax problems are discretized on boundary grids and solved by Lawson
iteration: iteratively reweighted least squares whose weights are multiplied
by the current residual moduli each round.  The quadratic mean of the
residuals under the (probability) weights is a rigorous lower bound for the
grid minimax value, so every solve reports a bracket, not just a witness.

Conditioning is handled by a tiered basis: scaled monomials about the set
centroid, then a Chebyshev-style recurrence on the bounding box, then a basis
orthogonalized against the actual grid (Arnoldi on the multiplication-by-z
operator).  Witnesses always carry a stable evaluation closure in the basis
they were solved in; their exported monomial coefficients are mathematically
correct but can degrade for extreme scale ratios, which is why downstream
checks evaluate witnesses through the closure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .config import DEFAULTS
from .errors import (
    BernsteinViolation,
    GridTooCoarse,
    InputError,
    InsufficientDecadeRange,
    NonConvergence,
    TooFewPoints,
)
from .geometry import CompactSet, Polygon, boundary_sample
from .potential import GreenModel, eval_green_many
from .records import RhoEstimate

# ---------------------------------------------------------------------------
# polynomials with complex coefficients


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in one complex variable, stored about an expansion center.

    ``coeffs[k]`` multiplies ``(z - center)**k``.  Trailing zero coefficients
    are trimmed on construction; the zero polynomial keeps a single ``0``
    coefficient and reports degree 0.

    ``stable_eval``, when present, is a vectorized closure evaluating the
    polynomial in the (well-conditioned) basis it was computed in; it is
    dropped by every coefficient-level operation (recenter, truncate, sums).
    """

    center: complex
    coeffs: tuple
    stable_eval: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        cs = [complex(c) for c in self.coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [0j]
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, z):
        """Value at z (scalar or array).  Prefers the stable closure."""
        zs = np.asarray(z, dtype=complex)
        if self.stable_eval is not None:
            out = np.asarray(self.stable_eval(zs.ravel()), dtype=complex)
            out = out.reshape(zs.shape)
        else:
            out = npoly.polyval(zs - self.center, np.asarray(self.coeffs))
        return complex(out) if np.isscalar(z) or zs.shape == () else out

    def recenter(self, new_center: complex) -> "Polynomial":
        """Exact Taylor shift of the coefficient vector (synthetic division)."""
        delta = complex(new_center) - self.center
        b = list(self.coeffs)
        if delta != 0:
            # in-place Horner cascade; b[k] becomes the coefficient of
            # (z - new_center)**k
            for k in range(len(b) - 1):
                for j in range(len(b) - 2, k - 1, -1):
                    b[j] = b[j] + delta * b[j + 1]
        return Polynomial(new_center, tuple(b))

    def truncate(self, n: int) -> "Polynomial":
        if n < 0:
            raise InputError(f"cannot truncate to degree {n}")
        return Polynomial(self.center, self.coeffs[:n + 1])

    def scaled(self, a: complex) -> "Polynomial":
        return Polynomial(self.center, tuple(a * c for c in self.coeffs))

    def plus(self, other: "Polynomial") -> "Polynomial":
        """Coefficient-level sum; the other summand is recentered first."""
        q = other.recenter(self.center)
        n = max(len(self.coeffs), len(q.coeffs))
        a = list(self.coeffs) + [0j] * (n - len(self.coeffs))
        for k, c in enumerate(q.coeffs):
            a[k] += c
        return Polynomial(self.center, tuple(a))


def partial_sum(p: Polynomial, n: int, z0: complex) -> Polynomial:
    """Degree-n Taylor partial sum of p developed about z0.

    Recenter-then-truncate on exact coefficient arithmetic.  Idempotent
    (applying it twice with the same n and z0 reproduces the result exactly)
    and linear in p.
    """
    if n < 0:
        raise InputError(f"partial sum order must be >= 0, got {n}")
    return p.recenter(z0).truncate(n)


@dataclass(frozen=True)
class PiecewiseTarget:
    """One prescribed polynomial per component of a compact set."""

    polys: tuple

    def __post_init__(self):
        object.__setattr__(self, "polys", tuple(self.polys))
        if not self.polys:
            raise InputError("piecewise target needs at least one polynomial")

    @classmethod
    def constants(cls, values) -> "PiecewiseTarget":
        return cls(tuple(Polynomial(0.0, (complex(v),)) for v in values))

    def n_pieces(self) -> int:
        return len(self.polys)

    def n_distinct(self) -> int:
        return len({(p.center, p.coeffs) for p in self.polys})

    def values_on(self, grids) -> np.ndarray:
        if len(grids) != len(self.polys):
            raise InputError(
                f"target has {len(self.polys)} pieces for {len(grids)} "
                f"components")
        return np.concatenate([np.asarray(p.evaluate(g), dtype=complex)
                               for p, g in zip(self.polys, grids)])


# ---------------------------------------------------------------------------
# tiered evaluation bases


class _Basis:
    """Degree-graded polynomial basis with a monomial-coefficient export.

    kind "monomial":   ((z - center)/scale)**k
    kind "chebyshev":  three-term recurrence in (z - center)/scale, which is
                       the Chebyshev recurrence along the bounding box axis
    kind "orthogonal": Arnoldi orthogonalization against a fixed grid; the
                       Hessenberg data is kept so the same basis can be
                       evaluated anywhere
    """

    def __init__(self, kind: str, center: complex, scale: float,
                 grid: np.ndarray | None = None, n: int = 0):
        self.kind = kind
        self.center = center
        self.scale = scale
        self._hess = None
        if kind == "orthogonal":
            self._build_arnoldi(grid, n)

    def _build_arnoldi(self, grid: np.ndarray, n: int):
        t = (grid - self.center) / self.scale
        m = len(t)
        H = np.zeros((n + 2, n + 1), dtype=complex)
        Q = np.zeros((m, n + 1), dtype=complex)
        Q[:, 0] = 1.0
        H[0, 0] = math.sqrt(m)  # norm bookkeeping row: ||q_0||
        for k in range(n):
            v = t * Q[:, k]
            for j in range(k + 1):
                h = np.vdot(Q[:, j], v) / m
                H[j, k + 1] = h
                v = v - h * Q[:, j]
            hn = np.linalg.norm(v) / math.sqrt(m)
            if hn == 0.0:
                hn = 1.0  # grid smaller than the degree; frozen direction
            H[k + 1, k + 1] = hn
            Q[:, k + 1] = v / hn
        self._hess = H

    def matrix(self, zs: np.ndarray, n: int) -> np.ndarray:
        t = (np.asarray(zs, dtype=complex) - self.center) / self.scale
        A = np.empty((len(t), n + 1), dtype=complex)
        if self.kind == "monomial":
            A[:, 0] = 1.0
            for k in range(1, n + 1):
                A[:, k] = A[:, k - 1] * t
        elif self.kind == "chebyshev":
            A[:, 0] = 1.0
            if n >= 1:
                A[:, 1] = t
            for k in range(2, n + 1):
                A[:, k] = 2.0 * t * A[:, k - 1] - A[:, k - 2]
        else:
            H = self._hess
            A[:, 0] = 1.0
            for k in range(n):
                v = t * A[:, k]
                for j in range(k + 1):
                    v = v - H[j, k + 1] * A[:, j]
                A[:, k + 1] = v / H[k + 1, k + 1]
        return A

    def to_monomial(self, c: np.ndarray) -> tuple:
        """Coefficients of sum_k c[k] phi_k about self.center, in z-powers.

        For the orthogonal tier on widely separated geometry the conversion
        can underflow at high order; callers needing full accuracy evaluate
        through the basis closure instead.
        """
        n = len(c) - 1
        B = np.zeros((n + 1, n + 1), dtype=complex)  # B[k] = phi_k in t-powers
        B[0, 0] = 1.0
        if self.kind == "monomial":
            for k in range(1, n + 1):
                B[k, k] = 1.0
        elif self.kind == "chebyshev":
            if n >= 1:
                B[1, 1] = 1.0
            for k in range(2, n + 1):
                B[k, 1:] = 2.0 * B[k - 1, :-1]
                B[k] -= B[k - 2]
        else:
            H = self._hess
            for k in range(n):
                v = np.zeros(n + 1, dtype=complex)
                v[1:] = B[k, :-1]  # multiply by t
                for j in range(k + 1):
                    v -= H[j, k + 1] * B[j]
                B[k + 1] = v / H[k + 1, k + 1]
        tc = c @ B  # coefficients in t = (z - center)/scale powers
        with np.errstate(under="ignore", over="ignore"):
            zc = tc * np.power(self.scale, -np.arange(n + 1, dtype=float))
        return tuple(zc)


def _pick_basis(L: CompactSet, grid: np.ndarray, n: int) -> tuple:
    """Escalate through the tiers until the grid matrix is workably conditioned."""
    switch = DEFAULTS.basis_condition_switch
    center, scale = L.centroid, max(L.scale, 1e-300)
    trial = _Basis("monomial", center, scale)
    A = trial.matrix(grid, n)
    cond = np.linalg.cond(A)
    if cond <= switch:
        return trial, A, cond
    xmin, ymin, xmax, ymax = L.bounds()
    mid = complex(0.5 * (xmin + xmax), 0.5 * (ymin + ymax))
    half = max(0.5 * (xmax - xmin), 0.5 * (ymax - ymin), 1e-300)
    trial = _Basis("chebyshev", mid, half)
    A = trial.matrix(grid, n)
    cond = np.linalg.cond(A)
    if cond <= switch:
        return trial, A, cond
    trial = _Basis("orthogonal", center, scale, grid=grid, n=n)
    A = trial.matrix(grid, n)
    return trial, A, np.linalg.cond(A)


# ---------------------------------------------------------------------------
# Lawson iteration


@dataclass(frozen=True)
class DeviationRecord:
    """Bracketed solution of one discrete minimax problem.

    d_hat is the exact maximum grid error of the witness (a true upper bound
    for the grid minimax value); lower_bound is the best weighted-quadratic-
    mean bound collected across Lawson iterations (a true lower bound).
    converged means the two agree to within 10 percent; an unconverged record
    still carries a valid bracket.
    """

    n: int
    d_hat: float
    lower_bound: float
    witness: Polynomial
    converged: bool
    diagnostics: dict = field(default_factory=dict, compare=False)


def _component_grid(shape, density: int) -> np.ndarray:
    m = density
    if isinstance(shape, Polygon):
        m = max(m, 2 * len(shape.vertices))
    return boundary_sample(shape, max(m, 4))


def best_polynomial(L: CompactSet, target: PiecewiseTarget, n: int,
                    grid_density: int | None = None) -> DeviationRecord:
    """Best degree-n sup-norm approximation of the target on boundary grids.

    The grid carries at least 8*(n+1) points per component (denser on
    polygons with many vertices); passing a smaller explicit grid_density
    raises GridTooCoarse.  Lawson iteration runs until the residual moduli
    equalize to lawson_equalize_tol in relative terms or the iteration cap
    is hit; either way the returned bracket is valid.
    """
    if n < 0:
        raise InputError(f"approximation degree must be >= 0, got {n}")
    if target.n_pieces() != len(L.components):
        raise InputError(
            f"target has {target.n_pieces()} pieces for "
            f"{len(L.components)} components")
    floor = DEFAULTS.grid_density_factor * (n + 1)
    if grid_density is None:
        grid_density = floor
    elif grid_density < floor:
        raise GridTooCoarse(
            f"grid density {grid_density} below {floor} = "
            f"{DEFAULTS.grid_density_factor}*(n+1)")
    grids = [_component_grid(s, grid_density) for s in L.components]
    zs = np.concatenate(grids)
    F = target.values_on(grids)

    basis, A, cond = _pick_basis(L, zs, n)
    # column equilibration keeps the weighted solves honest even when the
    # chosen tier is merely adequate
    col = np.linalg.norm(A, axis=0)
    col[col == 0.0] = 1.0
    Ae = A / col

    m = len(zs)
    w = np.full(m, 1.0 / m)
    scale_F = float(np.max(np.abs(F))) if m else 0.0
    noise = DEFAULTS.fit_noise_floor
    lower_best = 0.0
    d_hat = math.inf
    c = np.zeros(n + 1, dtype=complex)
    iters = 0
    for iters in range(1, DEFAULTS.lawson_max_iter + 1):
        sw = np.sqrt(w)
        ce, *_ = np.linalg.lstsq(Ae * sw[:, None], F * sw, rcond=None)
        r = F - Ae @ ce
        c = ce / col
        absr = np.abs(r)
        d_hat = float(absr.max(initial=0.0))
        lower_best = max(lower_best, float(math.sqrt(np.sum(w * absr ** 2))))
        if d_hat <= max(noise, 1e-14 * max(scale_F, 1.0)):
            break
        eq_gap = (d_hat - lower_best) / d_hat
        if eq_gap <= DEFAULTS.lawson_equalize_tol:
            break
        w = w * (absr + 1e-300)
        w = w / w.sum()

    converged = (d_hat <= max(noise, 1e-14 * max(scale_F, 1.0))
                 or d_hat <= 1.1 * lower_best)
    lower_best = min(lower_best, d_hat)

    c_final = c.copy()
    witness = Polynomial(
        basis.center, basis.to_monomial(c_final),
        stable_eval=lambda pts: basis.matrix(pts, n) @ c_final)
    return DeviationRecord(
        n=n, d_hat=d_hat, lower_bound=lower_best, witness=witness,
        converged=converged,
        diagnostics={"iterations": iters, "basis": basis.kind,
                     "grid_points": m, "condition": float(cond),
                     "grid_density": grid_density})


def deviation_sequence(L: CompactSet, target: PiecewiseTarget,
                       n_min: int | None = None, n_max: int | None = None,
                       grid_density: int | None = None) -> list:
    """Deviation records for n = n_min..n_max on one common boundary grid.

    All degrees share the grid sized for n_max, and each record keeps the
    better of the fresh witness and the previous one (a degree-n candidate is
    feasible at every larger degree), so d_hat is non-increasing exactly, not
    just up to solver noise.
    """
    n_min = DEFAULTS.deviation_n_min if n_min is None else n_min
    n_max = DEFAULTS.deviation_n_max if n_max is None else n_max
    if not (0 <= n_min < n_max):
        raise InputError(f"need 0 <= n_min < n_max, got {n_min}, {n_max}")
    if n_max > 60:
        raise InputError(f"degree cap is 60, got n_max={n_max}")
    density = DEFAULTS.grid_density_factor * (n_max + 1)
    if grid_density is not None:
        density = max(density, grid_density)

    records = []
    prev = None
    for n in range(n_min, n_max + 1):
        rec = best_polynomial(L, target, n, grid_density=density)
        if prev is not None and prev.d_hat < rec.d_hat:
            rec = DeviationRecord(
                n=n, d_hat=prev.d_hat,
                lower_bound=min(prev.d_hat, rec.lower_bound),
                witness=prev.witness, converged=prev.converged,
                diagnostics=dict(rec.diagnostics, reused_witness=prev.n))
        records.append(rec)
        prev = rec
    return records


# ---------------------------------------------------------------------------
# convergence factor from the deviation tail


def _ols_tail(ns: np.ndarray, logs: np.ndarray) -> tuple:
    """Geometric-rate fit of a deviation tail: slope of n, 2SE, and R^2.

    The model is ln d = a + slope*n + alpha*ln(n+1) + c*(n mod 2).  The two
    extra regressors absorb the algebraic prefactor and the even/odd
    alternation that disjoint two-plate problems exhibit; without them the
    plain line systematically underestimates exp(slope) by a few percent at
    reachable degrees (the prefactor bleeds into the slope).  The standard
    error comes from the usual OLS covariance of the slope coordinate.
    """
    m = len(ns)
    X = np.column_stack([np.ones(m), ns, np.log1p(ns), ns % 2.0])
    beta, *_ = np.linalg.lstsq(X, logs, rcond=None)
    res = logs - X @ beta
    ss_res = float(res @ res)
    ss_tot = float(np.sum((logs - logs.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    dof = max(m - X.shape[1], 1)
    cov = np.linalg.pinv(X.T @ X) * (ss_res / dof)
    se = math.sqrt(max(cov[1, 1], 0.0))
    return float(beta[1]), 2.0 * se, r2


def rho_from_deviations(records) -> RhoEstimate:
    """Fit log d_hat against n over the longest well-fitting suffix.

    Deviations at or below the double-precision noise floor are discarded
    first.  The estimate is exp(slope of n) with a two-standard-error
    bracket on that slope; the data must span at least two decades or the
    fit would be dominated by the preasymptotic head.  Sequences with no
    geometric tail at all (staircase decay from symmetric geometry, say)
    fail the R^2 gate on every suffix and raise NonConvergence rather than
    returning a bracket that does not mean anything.
    """
    recs = [r for r in records if r.d_hat > DEFAULTS.fit_noise_floor]
    if len(recs) < DEFAULTS.fit_min_records:
        raise TooFewPoints(
            f"need >= {DEFAULTS.fit_min_records} usable deviation records, "
            f"got {len(recs)}")
    ns = np.array([r.n for r in recs], dtype=float)
    logs = np.array([math.log(r.d_hat) for r in recs])
    decades = (logs.max() - logs.min()) / math.log(10.0)
    if decades < DEFAULTS.fit_min_decades:
        raise InsufficientDecadeRange(
            f"deviations span {decades:.2f} decades, "
            f"need >= {DEFAULTS.fit_min_decades}")

    best = None
    best_r2 = -math.inf
    min_len = max(DEFAULTS.fit_min_records, 6)
    for start in range(0, len(recs) - min_len + 1):
        slope, se2, r2 = _ols_tail(ns[start:], logs[start:])
        best_r2 = max(best_r2, r2)
        if r2 >= DEFAULTS.fit_r2_min:
            best = (start, slope, se2, r2)
            break
    if best is None:
        raise NonConvergence(
            f"no deviation-tail suffix fits a geometric rate with "
            f"R^2 >= {DEFAULTS.fit_r2_min} (best {best_r2:.4f}); the decay "
            f"is not log-linear at reachable degrees")
    start, slope, se2, r2 = best
    if slope >= 0.0:
        raise NonConvergence(
            f"fitted deviation rate exp({slope:.3g}) is not below 1")

    eps = 1e-12
    value = min(max(math.exp(slope), eps), 1.0 - eps)
    lower = min(max(math.exp(slope - se2), eps), value)
    upper = max(min(math.exp(slope + se2), 1.0 - eps), value)
    return RhoEstimate(
        value=value, lower=lower, upper=upper, method="deviation-fit",
        diagnostics={"n_first": int(ns[start]), "n_last": int(ns[-1]),
                     "points": len(recs) - start, "r2": r2,
                     "decades": decades, "slope": slope})


def estimate_rho_deviation(L: CompactSet, target: PiecewiseTarget | None = None,
                           n_min: int | None = None, n_max: int | None = None,
                           grid_density: int | None = None) -> RhoEstimate:
    """Deviation-route convergence factor with the default 0/1 target."""
    if target is None:
        vals = [0.0] + [1.0] * L.n_outer
        target = PiecewiseTarget.constants(vals)
    if target.n_distinct() < 2:
        raise InputError(
            "convergence-factor targets must prescribe at least two distinct "
            "polynomials; a global polynomial has zero deviation at its own "
            "degree")
    records = deviation_sequence(L, target, n_min=n_min, n_max=n_max,
                                 grid_density=grid_density)
    est = rho_from_deviations(records)
    est.diagnostics["records"] = [(r.n, r.d_hat) for r in records]
    return est


def target_independence_check(L: CompactSet, targets,
                              n_min: int | None = None,
                              n_max: int | None = None) -> dict:
    """Estimate the factor from several targets and cross-check the spread.

    Any two estimates must agree within max(0.02, sum of the two bracket
    widths).  Returns the estimates and the pairwise verdicts; the overall
    verdict is their conjunction.
    """
    targets = list(targets)
    if len(targets) < 2:
        raise InputError("independence check needs at least two targets")
    ests = [estimate_rho_deviation(L, t, n_min=n_min, n_max=n_max)
            for t in targets]
    pairs = []
    ok_all = True
    for i in range(len(ests)):
        for j in range(i + 1, len(ests)):
            gap = abs(ests[i].value - ests[j].value)
            allowed = max(0.02, ests[i].width + ests[j].width)
            ok = gap <= allowed
            ok_all = ok_all and ok
            pairs.append({"i": i, "j": j, "gap": gap,
                          "allowed": allowed, "pass": ok})
    return {"pass": ok_all,
            "estimates": ests,
            "values": [e.value for e in ests],
            "pairs": pairs}


# ---------------------------------------------------------------------------
# growth-bound check for polynomials off the set


def bernstein_check(p: Polynomial, L: CompactSet, model: GreenModel,
                    points: np.ndarray | None = None,
                    n_points: int = 50, rng=None) -> dict:
    """Check (|p(z)| / max_L |p|)^(1/deg) <= exp(g(z)) + tol off the set.

    The classical growth bound for polynomials: the normalized modulus to the
    power 1/degree never exceeds the exponential of the Green's function.
    Violations beyond bernstein_tol raise BernsteinViolation — they mean the
    potential model and the polynomial cannot both be right.
    """
    deg = p.degree
    if deg < 1:
        raise InputError("growth-bound check needs degree >= 1")
    norm_pts = np.concatenate(
        [boundary_sample(s, max(512, 16 * (deg + 1),
                                2 * len(getattr(s, "vertices", ())) + 4))
         for s in L.components])
    sup = float(np.max(np.abs(p.evaluate(norm_pts))))
    if sup == 0.0:
        raise InputError("zero polynomial has no growth bound")

    if points is None:
        rng = np.random.default_rng(rng)
        xmin, ymin, xmax, ymax = L.bounds()
        pad = 0.75 * max(L.diameter, 1e-12)
        pts = []
        while len(pts) < n_points:
            x = rng.uniform(xmin - pad, xmax + pad)
            y = rng.uniform(ymin - pad, ymax + pad)
            z = complex(x, y)
            if not L.contains(z) and L.dist(z) > 1e-9 * max(L.diameter, 1.0):
                pts.append(z)
        points = np.array(pts, dtype=complex)
    else:
        points = np.asarray(points, dtype=complex)

    g = eval_green_many(model, points)
    vals = np.abs(p.evaluate(points))
    with np.errstate(divide="ignore"):
        lhs = np.exp((np.log(vals) - math.log(sup)) / deg)
    rhs = np.exp(g) + DEFAULTS.bernstein_tol
    margins = rhs - lhs
    worst = int(np.argmin(margins))
    report = {"pass": bool(np.all(margins >= 0.0)),
              "n_points": len(points),
              "degree": deg,
              "sup_norm": sup,
              "worst_margin": float(margins[worst]),
              "worst_point": complex(points[worst])}
    if not report["pass"]:
        raise BernsteinViolation(complex(points[worst]),
                                 float(lhs[worst]), float(rhs[worst]))
    return report
