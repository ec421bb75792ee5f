"""Central knob block.

Every default tolerance and budget lives here so the CLI can surface them
(``--help`` and the reproducibility header both read this module) and so
tests pin against one source of truth.  No environment variables: override
per call or per CLI flag.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Defaults:
    # Green solver (charge simulation)
    charges_per_component: int = 256       # fundamental solutions per component
    colloc_factor: int = 2                 # collocation points = factor * charges
    check_grid_factor: int = 4             # residual check grid = factor * colloc
    residual_limit: float = 1e-4           # hard failure above this boundary residual
    residual_gate_charges: int = 256       # enforce the limit from this budget upward
    constraint_weight: float = 1e6         # weight-sum row scaling (times matrix norm)
    disk_charge_radius: float = 0.6        # charge circle radius as fraction of disk radius
    polygon_charge_depth: float = 0.5      # inward offset as fraction of inradius proxy
    corner_sigma: float = 0.45             # geometric depth ratio of corner charge ladders
    corner_pair_angle: float = 0.10        # pair half-angle as fraction of interior angle
    corner_start_frac: float = 0.35        # first ladder depth as fraction of adjacent edge
    corner_budget_frac: float = 0.65       # share of the charge budget spent on corners
    check_tail_floor: float = 1e-6         # validation probes approach vertices to this
                                           # fraction of the adjacent edge length

    # Level-set route for the convergence factor
    raster_resolution: int = 512           # cells along the longer box edge
    raster_margin: float = 0.40            # box margin as fraction of set diameter
    bisection_tol: float = 1e-4            # terminal level-bracket width

    # Discrete minimax (Lawson) and the deviation route
    grid_density_factor: int = 8           # boundary points per component = factor*(n+1)
    lawson_max_iter: int = 200
    lawson_equalize_tol: float = 1e-3      # relative error-equalization target
    deviation_n_min: int = 4
    deviation_n_max: int = 40              # spec-wide cap is 60
    fit_min_records: int = 8
    fit_r2_min: float = 0.98
    fit_noise_floor: float = 1e-13         # drop deviations at/below double-precision mud
    fit_min_decades: float = 2.0
    basis_condition_switch: float = 1e12   # monomial -> Chebyshev -> orthogonalized

    # Growth-bound check
    bernstein_tol: float = 1e-6

    # Classification
    strict_slack: float = 1e-12            # slack for strict inequalities on exact reals
    chain_bracket_max: float = 0.05        # verify_chain precondition on bracket width

    # Constructive search
    construct_n_max: int = 200
    validation_grid_factor: int = 4        # validation grids vs construction grids
    rate_fit_min_points: int = 8           # trajectory length needed for the envelope fit

    # Weighted partial-sum trace
    trace_n_max: int = 500

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULTS = Defaults()
