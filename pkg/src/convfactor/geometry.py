"""Planar geometry: shapes, compact-set unions, and Jordan contour families.

Shapes are closed disks and simple closed polygons in the plane, identified
with subsets of the complex plane.  A :class:`CompactSet` is a finite union
of pairwise disjoint shapes where component 0 plays the distinguished role
(it hosts the expansion point of every Taylor development downstream).

Contours are sampled Jordan curves used to certify separation: a valid
:class:`ContourFamily` has one contour per component, each winding once
around its own component, not at all around the others, and staying clear
of the set itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import shapely.geometry as sgeom

from .errors import (
    ContourCollision,
    ContourTouchesSet,
    DegenerateShape,
    EmptyInteriorComponent,
    InputError,
    OverlappingComponents,
    PointNotInterior,
    PointOnContour,
    TooFewComponents,
    TooFewPoints,
)

# Relative gap below which two components count as overlapping, and below
# which a query point counts as sitting on a contour.
REL_GAP = 1e-9


# ---------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class Disk:
    """Closed disk ``{z : |z - center| <= radius}``."""

    center: complex
    radius: float

    def __post_init__(self):
        if not (self.radius > 0) or not math.isfinite(self.radius):
            raise DegenerateShape(None, f"disk radius {self.radius!r}")
        c = complex(self.center)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise DegenerateShape(None, f"disk center {self.center!r}")

    @property
    def centroid(self) -> complex:
        return self.center

    def bounds(self):
        c, r = self.center, self.radius
        return (c.real - r, c.imag - r, c.real + r, c.imag + r)


@dataclass(frozen=True)
class Polygon:
    """Simple closed polygon given by its vertices (no repeated last vertex)."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple(complex(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise DegenerateShape(None, f"{len(verts)} vertices")
        if not all(math.isfinite(v.real) and math.isfinite(v.imag)
                   for v in verts):
            raise DegenerateShape(None, "non-finite vertex coordinate")
        scale = max(abs(v) for v in verts) or 1.0
        for k, v in enumerate(verts):
            if abs(verts[(k + 1) % len(verts)] - v) <= 1e-12 * scale:
                raise DegenerateShape(
                    None, f"repeated consecutive vertex at index {k}")
        ring = sgeom.LinearRing([(v.real, v.imag) for v in verts])
        if not ring.is_simple or not ring.is_valid:
            raise DegenerateShape(None, "self-intersecting boundary")
        if self.area <= 0:
            raise DegenerateShape(None, "zero enclosed area")

    @cached_property
    def area(self) -> float:
        v = np.asarray(self.vertices, dtype=complex)
        w = np.roll(v, -1)
        return abs(np.sum(v.real * w.imag - w.real * v.imag)) / 2.0

    @cached_property
    def centroid(self) -> complex:
        v = np.asarray(self.vertices, dtype=complex)
        w = np.roll(v, -1)
        cross = v.real * w.imag - w.real * v.imag
        a = np.sum(cross) / 2.0
        cx = np.sum((v.real + w.real) * cross) / (6.0 * a)
        cy = np.sum((v.imag + w.imag) * cross) / (6.0 * a)
        return complex(cx, cy)

    @property
    def edges(self):
        v = self.vertices
        return [(v[k], v[(k + 1) % len(v)]) for k in range(len(v))]

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.array([abs(b - a) for a, b in self.edges])

    @cached_property
    def as_shapely(self) -> sgeom.Polygon:
        return sgeom.Polygon([(v.real, v.imag) for v in self.vertices])

    def bounds(self):
        v = np.asarray(self.vertices, dtype=complex)
        return (v.real.min(), v.imag.min(), v.real.max(), v.imag.max())


# Either shape kind; isinstance checks dispatch the few per-kind code paths.
Shape = (Disk, Polygon)


def shape_diameter(s) -> float:
    if isinstance(s, Disk):
        return 2.0 * s.radius
    v = np.asarray(s.vertices, dtype=complex)
    return float(np.max(np.abs(v[:, None] - v[None, :])))


# ---------------------------------------------------------------------------
# membership and distances


def _seg_dist(z: complex, a: complex, b: complex) -> float:
    """Distance from z to the closed segment [a, b]."""
    d = b - a
    L2 = (d * d.conjugate()).real
    if L2 == 0.0:
        return abs(z - a)
    t = ((z - a) * d.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(z - (a + t * d))


def polygon_contains(poly: Polygon, z: complex) -> bool:
    """Closed membership test (boundary counts as inside)."""
    v = poly.vertices
    n = len(v)
    inside = False
    for k in range(n):
        a, b = v[k], v[(k + 1) % n]
        if _seg_dist(z, a, b) == 0.0:
            return True
        if (a.imag > z.imag) != (b.imag > z.imag):
            x = a.real + (z.imag - a.imag) * (b.real - a.real) / (b.imag - a.imag)
            if z.real < x:
                inside = not inside
    return inside


def polygon_contains_many(poly: Polygon, zs: np.ndarray) -> np.ndarray:
    """Vectorized even-odd membership for raster work (boundary not special-cased)."""
    x = zs.real.ravel()
    y = zs.imag.ravel()
    inside = np.zeros(x.shape, dtype=bool)
    v = poly.vertices
    n = len(v)
    for k in range(n):
        a, b = v[k], v[(k + 1) % n]
        cond = (a.imag > y) != (b.imag > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xing = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
        inside ^= cond & (x < xing)
    return inside.reshape(zs.shape)


def contains(s, z: complex) -> bool:
    if isinstance(s, Disk):
        return abs(z - s.center) <= s.radius
    return polygon_contains(s, z)


def contains_many(s, zs: np.ndarray) -> np.ndarray:
    if isinstance(s, Disk):
        return np.abs(zs - s.center) <= s.radius
    return polygon_contains_many(s, zs)


def dist_point_to_shape(z: complex, s) -> float:
    """Euclidean distance from z to the closed shape (0 iff z belongs to it)."""
    if isinstance(s, Disk):
        return max(0.0, abs(z - s.center) - s.radius)
    if polygon_contains(s, z):
        return 0.0
    return min(_seg_dist(z, a, b) for a, b in s.edges)


def dist_interior_point_to_complement(z: complex, s) -> float:
    """Distance from an interior point to the shape's boundary.

    Raises PointNotInterior when z is outside or on the boundary.
    """
    if isinstance(s, Disk):
        d = s.radius - abs(z - s.center)
        if d <= 0:
            raise PointNotInterior(f"{z} is not interior to {s}")
        return d
    if not polygon_contains(s, z):
        raise PointNotInterior(f"{z} is not interior to {s}")
    d = min(_seg_dist(z, a, b) for a, b in s.edges)
    if d <= 0:
        raise PointNotInterior(f"{z} lies on the boundary of {s}")
    return d


def shape_gap(s1, s2) -> float:
    """Gap between two shapes: positive when disjoint, 0/negative otherwise."""
    if isinstance(s1, Disk) and isinstance(s2, Disk):
        return abs(s1.center - s2.center) - s1.radius - s2.radius
    if isinstance(s1, Disk):
        s1, s2 = s2, s1
    if isinstance(s2, Disk):  # s1 polygon, s2 disk
        return dist_point_to_shape(s2.center, s1) - s2.radius
    # polygon-polygon: shapely distance is 0 when they intersect; also catch
    # full containment, where boundary distance would be misleadingly positive
    p1, p2 = s1.as_shapely, s2.as_shapely
    if p1.intersects(p2):
        return 0.0
    return p1.distance(p2)


# ---------------------------------------------------------------------------
# boundary sampling


def boundary_sample(s, n: int) -> np.ndarray:
    """n points on the shape's boundary, as a complex array.

    Disks get equally spaced angles (n >= 4).  Polygons get every vertex
    plus arclength-quasi-uniform fill (n >= 2 * vertex count).
    """
    if isinstance(s, Disk):
        if n < 4:
            raise TooFewPoints(f"need >= 4 disk boundary points, got {n}")
        ang = 2.0 * np.pi * np.arange(n) / n
        return s.center + s.radius * np.exp(1j * ang)
    nv = len(s.vertices)
    if n < 2 * nv:
        raise TooFewPoints(f"need >= {2 * nv} polygon boundary points, got {n}")
    counts = _allocate_counts(s.edge_lengths, n)
    pts = []
    for (a, b), m in zip(s.edges, counts):
        t = np.arange(m) / m
        pts.append(a + t * (b - a))
    return np.concatenate(pts)


def _allocate_counts(lengths: np.ndarray, n: int) -> np.ndarray:
    """Largest-remainder allocation of n samples over edges, >= 1 per edge."""
    share = lengths / lengths.sum() * n
    counts = np.maximum(1, np.floor(share).astype(int))
    while counts.sum() > n:
        k = int(np.argmax(counts))
        counts[k] -= 1
    rem = share - counts
    while counts.sum() < n:
        k = int(np.argmax(rem))
        counts[k] += 1
        rem[k] = -np.inf
    return counts


def boundary_sample_clustered(s, n: int, power: float = 3.0) -> np.ndarray:
    """Boundary samples graded toward polygon vertices (disks: uniform).

    Corner-clustered collocation resolves the weak corner singularities of
    harmonic fields outside polygons far better than uniform spacing.
    """
    if isinstance(s, Disk):
        return boundary_sample(s, max(n, 4))
    nv = len(s.vertices)
    counts = _allocate_counts(s.edge_lengths, max(n, 2 * nv))
    pts = []
    for (a, b), m in zip(s.edges, counts):
        u = np.arange(m) / m
        # symmetric grading: dense near both endpoints of every edge
        t = 0.5 + 0.5 * np.sign(2 * u - 1) * np.abs(2 * u - 1) ** power
        pts.append(a + t * (b - a))
    return np.concatenate(pts)


# ---------------------------------------------------------------------------
# compact sets


@dataclass(frozen=True)
class CompactSet:
    """Union of pairwise disjoint shapes; component 0 is the distinguished one."""

    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def n_outer(self) -> int:
        return len(self.components) - 1

    @property
    def outer(self) -> tuple:
        return self.components[1:]

    @cached_property
    def diameter(self) -> float:
        xmin, ymin, xmax, ymax = self.bounds()
        return math.hypot(xmax - xmin, ymax - ymin)

    def bounds(self):
        bs = [s.bounds() for s in self.components]
        return (min(b[0] for b in bs), min(b[1] for b in bs),
                max(b[2] for b in bs), max(b[3] for b in bs))

    @cached_property
    def centroid(self) -> complex:
        return sum(s.centroid for s in self.components) / len(self.components)

    @cached_property
    def scale(self) -> float:
        """Radius of the set as seen from its centroid."""
        c = self.centroid
        out = 0.0
        for s in self.components:
            if isinstance(s, Disk):
                out = max(out, abs(s.center - c) + s.radius)
            else:
                out = max(out, max(abs(v - c) for v in s.vertices))
        return out

    def dist(self, z: complex) -> float:
        return min(dist_point_to_shape(z, s) for s in self.components)

    def contains(self, z: complex) -> bool:
        return any(contains(s, z) for s in self.components)


def check_disjoint(shapes) -> None:
    """Raise OverlappingComponents unless all pairwise gaps are safely positive."""
    shapes = list(shapes)
    if not shapes:
        raise TooFewComponents("no components given")
    diam = max(
        (max(b[2] for b in (s.bounds() for s in shapes))
         - min(b[0] for b in (s.bounds() for s in shapes))),
        (max(b[3] for b in (s.bounds() for s in shapes))
         - min(b[1] for b in (s.bounds() for s in shapes))),
        max(shape_diameter(s) for s in shapes),
    )
    for i in range(len(shapes)):
        for j in range(i + 1, len(shapes)):
            gap = shape_gap(shapes[i], shapes[j])
            if gap < REL_GAP * diam:
                raise OverlappingComponents(i, j, gap)


def validate_set(shapes) -> CompactSet:
    """Build a CompactSet after checking every structural invariant."""
    shapes = tuple(shapes)
    if len(shapes) < 2:
        raise TooFewComponents(
            "need component 0 plus at least one outer component")
    for idx, s in enumerate(shapes):
        if not isinstance(s, Shape):
            raise DegenerateShape(idx, f"unsupported shape {type(s).__name__}")
        # Disk/Polygon constructors validate themselves; re-check area here so
        # the index lands in the error message.
        if isinstance(s, Polygon) and s.area <= 0:
            raise DegenerateShape(idx, "zero enclosed area")
    head = shapes[0]
    if isinstance(head, Polygon) and head.area <= 0:
        raise EmptyInteriorComponent("component 0 has empty interior")
    check_disjoint(shapes)
    return CompactSet(shapes)


# ---------------------------------------------------------------------------
# contours


@dataclass(frozen=True)
class CircleContour:
    center: complex
    radius: float
    n_samples: int = 512

    @cached_property
    def samples(self) -> np.ndarray:
        ang = 2.0 * np.pi * np.arange(self.n_samples) / self.n_samples
        return self.center + self.radius * np.exp(1j * ang)

    @property
    def scale(self) -> float:
        return abs(self.center) + self.radius

    def winding(self, z: complex) -> int:
        d = abs(z - self.center)
        if abs(d - self.radius) <= REL_GAP * max(self.scale, abs(z), 1.0):
            raise PointOnContour(f"{z} lies on the contour")
        return 1 if d < self.radius else 0


@dataclass(frozen=True)
class PolylineContour:
    """Closed polyline contour; points without the repeated final vertex."""

    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points",
                           tuple(complex(p) for p in self.points))
        if len(self.points) < 3:
            raise DegenerateShape(None, "contour needs >= 3 points")

    @cached_property
    def samples(self) -> np.ndarray:
        return np.asarray(self.points, dtype=complex)

    @property
    def scale(self) -> float:
        return max(abs(p) for p in self.points)

    def winding(self, z: complex) -> int:
        # exact for a polyline: per-segment turn is the principal argument of
        # the endpoint ratio, which never reaches pi off the segment itself
        pts = self.samples
        scale = max(self.scale, abs(z), 1.0)
        d = pts - z
        if np.min(np.abs(d)) <= REL_GAP * scale:
            raise PointOnContour(f"{z} lies on the contour")
        for a, b in zip(pts, np.roll(pts, -1)):
            if _seg_dist(z, a, b) <= REL_GAP * scale:
                raise PointOnContour(f"{z} lies on the contour")
        turns = np.angle(np.roll(d, -1) / d)
        return int(round(float(np.sum(turns)) / (2.0 * np.pi)))


def winding_number(contour, z: complex) -> int:
    """Winding number of a sampled Jordan contour about z (0 or +-1 here)."""
    return contour.winding(z)


@dataclass(frozen=True)
class ContourFamily:
    """One contour per component of a compact set, mutually exterior."""

    contours: tuple
    source: CompactSet = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "contours", tuple(self.contours))


def _contour_probe_points(s) -> np.ndarray:
    if isinstance(s, Disk):
        return boundary_sample(s, 16)
    return boundary_sample(s, max(16, 2 * len(s.vertices)))


def validate_family(family: ContourFamily) -> None:
    """Check the winding pattern, mutual exteriority, and clearance from the set."""
    L = family.source
    contours = family.contours
    if len(contours) != len(L.components):
        raise ContourCollision(
            f"{len(contours)} contours for {len(L.components)} components")
    for i, c in enumerate(contours):
        for j, s in enumerate(L.components):
            want = 1 if i == j else 0
            for z in _contour_probe_points(s):
                try:
                    w = c.winding(complex(z))
                except PointOnContour:
                    raise ContourTouchesSet(
                        f"contour {i} touches component {j}")
                if w != want:
                    raise ContourCollision(
                        f"contour {i} winds {w} times around component {j}, "
                        f"expected {want}")
        d = min(L.dist(complex(z)) for z in c.samples)
        if d <= REL_GAP * max(L.diameter, 1.0):
            raise ContourTouchesSet(f"contour {i} touches the set")
    # mutual exteriority: no contour encloses a point of another
    for i, ci in enumerate(contours):
        for j, cj in enumerate(contours):
            if i == j:
                continue
            for z in cj.samples[:: max(1, len(cj.samples) // 32)]:
                try:
                    if ci.winding(complex(z)) != 0:
                        raise ContourCollision(
                            f"contour {i} encloses part of contour {j}")
                except PointOnContour:
                    raise ContourCollision(
                        f"contours {i} and {j} intersect")


def build_contour_family(L: CompactSet, inflation: float,
                         n_samples: int = 512) -> ContourFamily:
    """Inflate each component into a surrounding Jordan contour.

    Each component gets breathing room of ``inflation * gap`` where gap is
    half its distance to the rest of the set; disks become concentric
    circles, polygons become rounded outward offsets.  Raises
    ContourCollision / ContourTouchesSet when the inflation is too large.
    """
    if not (inflation > 0):
        raise ContourCollision(f"inflation must be positive, got {inflation}")
    contours = []
    for i, s in enumerate(L.components):
        gap = 0.5 * min(shape_gap(s, t)
                        for j, t in enumerate(L.components) if j != i)
        d = inflation * gap
        if isinstance(s, Disk):
            contours.append(CircleContour(s.center, s.radius + d, n_samples))
        else:
            buffed = s.as_shapely.buffer(d, quad_segs=16)
            ring = list(buffed.exterior.coords)[:-1]
            pts = [complex(x, y) for x, y in ring]
            area2 = sum((a.real * b.imag - b.real * a.imag)
                        for a, b in zip(pts, pts[1:] + pts[:1]))
            if area2 < 0:  # winding about the component must be +1
                pts.reverse()
            pts = _densify_ring(pts, n_samples)
            contours.append(PolylineContour(tuple(pts)))
    fam = ContourFamily(tuple(contours), L)
    validate_family(fam)
    return fam


def _densify_ring(pts, n_target: int):
    """Insert points along ring edges until at least n_target samples exist."""
    if len(pts) >= n_target:
        return pts
    lengths = np.array([abs(pts[(k + 1) % len(pts)] - pts[k])
                        for k in range(len(pts))])
    counts = _allocate_counts(lengths, n_target)
    out = []
    for k, m in enumerate(counts):
        a, b = pts[k], pts[(k + 1) % len(pts)]
        t = np.arange(m) / m
        out.extend(a + t * (b - a))
    return out


def geometry_to_dict(L: CompactSet) -> dict:
    """Plain-dict form of a compact set, matching the CLI input schema.

    ``{"components": [{"type": "disk", "center": [x, y], "radius": r} |
    {"type": "polygon", "vertices": [[x, y], ...]}, ...]}`` with component 0
    read as the distinguished component.
    """
    comps = []
    for s in L.components:
        if isinstance(s, Disk):
            comps.append({"type": "disk",
                          "center": [s.center.real, s.center.imag],
                          "radius": s.radius})
        else:
            comps.append({"type": "polygon",
                          "vertices": [[v.real, v.imag]
                                       for v in s.vertices]})
    return {"components": comps}


def geometry_from_dict(data) -> CompactSet:
    """Parse and validate the CLI geometry schema (see geometry_to_dict)."""
    if not isinstance(data, dict) or "components" not in data:
        raise InputError('geometry JSON must be {"components": [...]}')
    shapes = []
    for k, item in enumerate(data["components"]):
        if not isinstance(item, dict) or "type" not in item:
            raise InputError(f'component {k} must be an object with a "type"')
        kind = item["type"]
        try:
            if kind == "disk":
                x, y = item["center"]
                shapes.append(Disk(complex(float(x), float(y)),
                                   float(item["radius"])))
            elif kind == "polygon":
                shapes.append(Polygon(tuple(
                    complex(float(x), float(y))
                    for x, y in item["vertices"])))
            else:
                raise InputError(f'component {k} has unknown type "{kind}"')
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"component {k} is malformed: {exc}") from exc
    return validate_set(shapes)
