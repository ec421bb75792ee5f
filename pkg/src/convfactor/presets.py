"""Built-in scenario presets: ready-made geometries with expected facts.

Each preset bundles a validated compact set, a default expansion point, and
a list of expected facts (quantity, relation, value) that a run of the
estimators should reproduce.  Facts carry a provenance tag: ``paper`` for
values quoted from the source material the scenarios are drawn from,
``derived`` for values computed from first principles by an independent
route, and ``trivial`` for immediate arithmetic.

The three scenarios:

* ``ex31(theta0)`` — two unit disks with centers ``theta0`` apart.  The
  convergence factor admits the closed-form ceiling
  sqrt((1 + theta0) / ((theta0/2)^2 - 1)), which first drops below 1/2 at
  theta0 = 18.
* ``ex32(beta0, m0)`` — a central unit disk ringed by ``m0`` unit disks at
  distance ``h0``, with ``h0`` chosen as the smallest value making the
  convergence factor provably smaller than ``beta0``.  The required
  separation grows like (2/beta0)^(m0+1), so the geometry is extremely
  spread out.
* ``ex33`` — a notched hexagon and a small rotated square on opposite
  sides of the origin; the convergence factor is known to five decimals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import BadScenarioParameter, SearchExhausted
from .geometry import CompactSet, Disk, Polygon, validate_set

PROV_PAPER = "paper"
PROV_DERIVED = "derived"
PROV_TRIVIAL = "trivial"

#: vertices of the notched hexagon (component 0 of ex33); the first vertex
#: is the reflex notch tip on the real axis
HEX_VERTICES = (-6.5 + 0j, -5.0 + 1.5j, -5.75 + 2.25j, -8.0 + 0j,
                -5.75 - 2.25j, -5.0 - 1.5j)
#: vertices of the rotated square (component 1 of ex33)
SQUARE_VERTICES = (9.5 + 0j, 8.75 + 0.75j, 8.0 + 0j, 8.75 - 0.75j)
#: reference convergence factor for ex33, five decimals
EX33_RHO = 0.529966
EX33_RHO_TOL = 0.01


@dataclass(frozen=True)
class ExpectedFact:
    """One checkable statement about a scenario's computed quantities.

    quantity names a computed scalar ("rho") or categorical result
    ("verdict:lambda=2"); relation is one of le/ge/lt/gt/eq/within.  For
    le/ge on estimated quantities the checker grants the estimate's own
    bracket width as slack; "within" uses the explicit tolerance.
    """

    quantity: str
    relation: str
    value: object
    provenance: str
    tolerance: float = 0.0
    note: str = ""


@dataclass(frozen=True)
class ScenarioPreset:
    name: str
    params: dict
    L: CompactSet
    z0: complex
    expected_facts: tuple
    notes: tuple = ()


def ex31_bound(theta0: float) -> float:
    """Closed-form ceiling sqrt((1+theta0)/((theta0/2)^2 - 1)) for ex31."""
    return math.sqrt((1.0 + theta0) / ((0.5 * theta0) ** 2 - 1.0))


def preset_ex31(theta0: float = 18.0) -> ScenarioPreset:
    """Two unit disks, centers 0 and theta0; requires theta0 > 4."""
    theta0 = float(theta0)
    if not theta0 > 4.0:
        raise BadScenarioParameter(
            f"theta0 must exceed 4, got {theta0:.6g}")
    L = validate_set([Disk(0.0, 1.0), Disk(theta0, 1.0)])
    bound = ex31_bound(theta0)
    facts = [
        ExpectedFact("rho", "le", bound, PROV_PAPER,
                     note="closed-form ceiling sqrt((1+t)/((t/2)^2-1))"),
        ExpectedFact("rho", "ge", 1.0 / (theta0 - 1.0), PROV_DERIVED,
                     note="distance ratio r0/R0 from z0=0"),
    ]
    if bound < 0.5:
        facts.append(ExpectedFact(
            "verdict:lambda=2", "eq", "NONEMPTY", PROV_PAPER,
            note="doubling weights admissible once the ceiling is below"
                 " 1/2"))
    return ScenarioPreset(
        name="ex31", params={"theta0": theta0}, L=L, z0=0.0,
        expected_facts=tuple(facts),
        notes=(f"ceiling={bound:.6f}",))


def ex32_constants(beta0: float, m0: int) -> dict:
    """Separation constants for the ringed-disk scenario.

    s = sin(pi/m0); the product constant
    l0 = (s/2) * (1 - s/2) * (3s/2)^(m0-1) enters the separation bound
    through its (m0+1)-th root.  The derivation's intermediate step
    additionally needs l0 <= 2^-(m0+1), which fails for m0 in {7, 8}, so
    the effective constant is l0' = min(l0, 2^-(m0+1)) and the cap is
    reported when it binds.
    """
    s = math.sin(math.pi / m0)
    l0 = 0.5 * s * (1.0 - 0.5 * s) * (1.5 * s) ** (m0 - 1)
    cap = 2.0 ** (-(m0 + 1))
    l0_eff = min(l0, cap)
    h_min_sep = 2.0 / s
    h_min_bound = (2.0 / (beta0 * l0_eff ** (1.0 / (m0 + 1)))) ** (m0 + 1)
    h0 = max(h_min_sep, h_min_bound) * (1.0 + 1e-9)
    return {"s": s, "l0": l0, "l0_cap": cap, "l0_eff": l0_eff,
            "cap_binds": l0 > cap, "h_min_sep": h_min_sep,
            "h_min_bound": h_min_bound, "h0": h0}


def preset_ex32(beta0: float = 0.5, m0: int = 9,
                h_search_max: float = 1e12) -> ScenarioPreset:
    """Central unit disk plus m0 unit disks on a circle of radius h0.

    h0 is the smallest separation (up to a 1e-9 relative strictness
    margin) satisfying both the ring-disjointness requirement h > 2/s and
    the convergence-factor bound that forces rho < beta0.  Requires
    m0 >= 7 and beta0 in (0, 1); raises SearchExhausted when the needed
    h0 exceeds h_search_max.
    """
    beta0 = float(beta0)
    m0 = int(m0)
    if m0 < 7:
        raise BadScenarioParameter(f"m0 must be at least 7, got {m0}")
    if not 0.0 < beta0 < 1.0:
        raise BadScenarioParameter(
            f"beta0 must lie in (0, 1), got {beta0:.6g}")
    c = ex32_constants(beta0, m0)
    if c["h0"] > h_search_max:
        raise SearchExhausted(
            f"required separation h0={c['h0']:.6g} exceeds the search "
            f"ceiling {h_search_max:.6g}")
    h0 = c["h0"]
    ring = [Disk(h0 * complex(math.cos(2.0 * math.pi * j / m0),
                              math.sin(2.0 * math.pi * j / m0)), 1.0)
            for j in range(m0)]
    L = validate_set([Disk(0.0, 1.0)] + ring)
    notes = [f"h0={h0:.9g}", f"l0={c['l0']:.9g}"]
    if c["cap_binds"]:
        notes.append(
            f"intermediate constant capped: l0'={c['l0_eff']:.9g} "
            f"< l0={c['l0']:.9g} (the uncapped derivation step fails for "
            f"this m0)")
    return ScenarioPreset(
        name="ex32", params={"beta0": beta0, "m0": m0,
                             "h_search_max": h_search_max},
        L=L, z0=0.0,
        expected_facts=(
            ExpectedFact("rho", "lt", beta0, PROV_DERIVED,
                         note="separation h0 was chosen to force this"),
        ),
        notes=tuple(notes))


def preset_ex33() -> ScenarioPreset:
    """Notched hexagon (distinguished) plus a small rotated square."""
    L = validate_set([Polygon(HEX_VERTICES), Polygon(SQUARE_VERTICES)])
    return ScenarioPreset(
        name="ex33", params={}, L=L, z0=-7.0,
        expected_facts=(
            ExpectedFact("rho", "within", EX33_RHO, PROV_PAPER,
                         tolerance=EX33_RHO_TOL,
                         note="reference value 0.529966"),
            ExpectedFact("verdict:lambda=1", "eq", "NONEMPTY", PROV_PAPER,
                         note="unit limit point is always admissible"),
        ),
        notes=())


def get_preset(name: str, **params) -> ScenarioPreset:
    """Look up a preset builder by name and apply parameters."""
    builders = {"ex31": preset_ex31, "ex32": preset_ex32,
                "ex33": preset_ex33}
    if name not in builders:
        raise BadScenarioParameter(
            f"unknown scenario {name!r}; choose from "
            f"{sorted(builders)}")
    return builders[name](**params)
