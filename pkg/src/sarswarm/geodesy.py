"""Spherical-earth geometry: distances, bearings, polygons and survey grids.

All coordinates are WGS-84 degrees. Distances are meters on a sphere of
radius 6,371,000 m; no ellipsoidal correction is applied, which is accurate
to well under the grid spacing at the few-kilometre scale search areas
this package works with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_M = 6_371_000.0

#: Default maximum number of grid points produced by :func:`generate_grid`.
DEFAULT_GRID_CAP = 100_000

# A point this close (meters) to a polygon edge counts as inside.
_EDGE_EPSILON_M = 1e-6
_EDGE_EPSILON_DEG = math.degrees(_EDGE_EPSILON_M / EARTH_RADIUS_M)


class GeodesyError(ValueError):
    """Base class for geometry construction errors."""


class EmptyGridError(GeodesyError):
    """No lattice point fell inside the polygon."""


class GridTooLargeError(GeodesyError):
    """The grid would exceed the configured point cap."""


@dataclass(frozen=True)
class GeoPoint:
    """A WGS-84 position with optional altitude above ground in meters."""

    lat: float
    lon: float
    alt_m: float = 0.0

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise GeodesyError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise GeodesyError(f"longitude {self.lon} outside [-180, 180]")
        if self.alt_m < 0.0:
            raise GeodesyError(f"altitude {self.alt_m} must be >= 0")

    def to_dict(self) -> dict:
        return {"lat": self.lat, "lon": self.lon, "alt_m": self.alt_m}

    @classmethod
    def from_dict(cls, d: dict) -> "GeoPoint":
        return cls(lat=d["lat"], lon=d["lon"], alt_m=d.get("alt_m", 0.0))


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points in meters.

    Uses the haversine form with the standard angular term
    c = 2*atan2(sqrt(h), sqrt(1-h)), which is symmetric, non-negative and
    zero only for coincident points. Altitude is ignored.
    """
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    c = 2.0 * math.atan2(math.sqrt(h), math.sqrt(1.0 - h))
    return EARTH_RADIUS_M * c


def destination_point(origin: GeoPoint, bearing_deg: float, distance_m: float) -> GeoPoint:
    """Point reached by travelling ``distance_m`` from ``origin`` on a fixed bearing.

    Altitude is carried over unchanged. A zero distance returns the origin
    exactly.
    """
    if distance_m < 0.0:
        raise GeodesyError("distance must be >= 0")
    if distance_m == 0.0:
        return GeoPoint(origin.lat, origin.lon, origin.alt_m)
    phi1 = math.radians(origin.lat)
    lam1 = math.radians(origin.lon)
    theta = math.radians(bearing_deg)
    delta = distance_m / EARTH_RADIUS_M
    sin_phi2 = math.sin(phi1) * math.cos(delta) + math.cos(phi1) * math.sin(delta) * math.cos(theta)
    phi2 = math.asin(max(-1.0, min(1.0, sin_phi2)))
    lam2 = lam1 + math.atan2(
        math.sin(theta) * math.sin(delta) * math.cos(phi1),
        math.cos(delta) - math.sin(phi1) * sin_phi2,
    )
    lon2 = math.degrees(lam2)
    if lon2 > 180.0:
        lon2 -= 360.0
    elif lon2 < -180.0:
        lon2 += 360.0
    return GeoPoint(math.degrees(phi2), lon2, origin.alt_m)


def _project(p: GeoPoint, ref_lat: float, ref_lon: float) -> tuple[float, float]:
    """Local equirectangular projection (meters east, meters north)."""
    x = math.radians(p.lon - ref_lon) * math.cos(math.radians(ref_lat)) * EARTH_RADIUS_M
    y = math.radians(p.lat - ref_lat) * EARTH_RADIUS_M
    return x, y


def _segments_intersect(p1, p2, p3, p4) -> bool:
    """True if segment p1-p2 intersects p3-p4 (touching counts)."""

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def on_segment(o, a, b):
        return (
            min(o[0], b[0]) <= a[0] <= max(o[0], b[0])
            and min(o[1], b[1]) <= a[1] <= max(o[1], b[1])
        )

    d1 = cross(p3, p4, p1)
    d2 = cross(p3, p4, p2)
    d3 = cross(p1, p2, p3)
    d4 = cross(p1, p2, p4)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and on_segment(p3, p1, p4):
        return True
    if d2 == 0 and on_segment(p3, p2, p4):
        return True
    if d3 == 0 and on_segment(p1, p3, p2):
        return True
    if d4 == 0 and on_segment(p1, p4, p2):
        return True
    return False


@dataclass(frozen=True)
class SearchPolygon:
    """An irregular, non-self-intersecting search area on the map."""

    vertices: tuple[GeoPoint, ...]

    def __init__(self, vertices) -> None:
        object.__setattr__(self, "vertices", tuple(vertices))
        self._validate()

    def _validate(self) -> None:
        v = self.vertices
        if len(v) < 3:
            raise GeodesyError(f"polygon needs >= 3 vertices, got {len(v)}")
        n = len(v)
        for i in range(n):
            a, b = v[i], v[(i + 1) % n]
            if a.lat == b.lat and a.lon == b.lon:
                raise GeodesyError(f"consecutive duplicate vertex at index {i}")
        ref_lat, ref_lon = self._reference()
        pts = [_project(p, ref_lat, ref_lon) for p in v]
        for i in range(n):
            for j in range(i + 1, n):
                # skip edges sharing a vertex (adjacent, incl. the wrap pair)
                if j == i or j == (i + 1) % n or (j + 1) % n == i:
                    continue
                if _segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                    raise GeodesyError(f"polygon self-intersects (edges {i} and {j})")

    def _reference(self) -> tuple[float, float]:
        lats = [p.lat for p in self.vertices]
        lons = [p.lon for p in self.vertices]
        return sum(lats) / len(lats), sum(lons) / len(lons)

    def centroid(self) -> GeoPoint:
        """Vertex mean; a representative interior-ish point for weather lookups."""
        lat, lon = self._reference()
        return GeoPoint(lat, lon)

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(min_lat, min_lon, max_lat, max_lon) in degrees."""
        lats = [p.lat for p in self.vertices]
        lons = [p.lon for p in self.vertices]
        return min(lats), min(lons), max(lats), max(lons)

    def to_dict(self) -> dict:
        return {"vertices": [p.to_dict() for p in self.vertices]}

    @classmethod
    def from_dict(cls, d: dict) -> "SearchPolygon":
        return cls([GeoPoint.from_dict(p) for p in d["vertices"]])


class _PolygonTester:
    """Precomputed point-in-polygon test for repeated queries."""

    def __init__(self, poly: SearchPolygon):
        self.ref_lat, self.ref_lon = poly._reference()
        self.pts = [_project(p, self.ref_lat, self.ref_lon) for p in poly.vertices]

    def contains(self, p: GeoPoint) -> bool:
        x, y = _project(p, self.ref_lat, self.ref_lon)
        pts = self.pts
        n = len(pts)
        # boundary points count as inside: search coverage errs toward inclusion
        for i in range(n):
            if _point_segment_distance(x, y, pts[i], pts[(i + 1) % n]) <= _EDGE_EPSILON_M:
                return True
        inside = False
        j = n - 1
        for i in range(n):
            xi, yi = pts[i]
            xj, yj = pts[j]
            if (yi > y) != (yj > y):
                x_cross = xj + (y - yj) / (yi - yj) * (xi - xj)
                if x < x_cross:
                    inside = not inside
            j = i
        return inside


def _point_segment_distance(x: float, y: float, a, b) -> float:
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    seg_len2 = dx * dx + dy * dy
    if seg_len2 == 0.0:
        return math.hypot(x - ax, y - ay)
    t = ((x - ax) * dx + (y - ay) * dy) / seg_len2
    t = max(0.0, min(1.0, t))
    return math.hypot(x - (ax + t * dx), y - (ay + t * dy))


def point_in_polygon(p: GeoPoint, poly: SearchPolygon) -> bool:
    """Ray-casting containment in a local projection; boundary counts as inside."""
    return _PolygonTester(poly).contains(p)


@dataclass(frozen=True)
class PointCloud:
    """Grid points inside a search polygon, spaced ``spacing_m`` apart."""

    points: tuple[GeoPoint, ...]
    spacing_m: float

    def __init__(self, points, spacing_m: float) -> None:
        object.__setattr__(self, "points", tuple(points))
        object.__setattr__(self, "spacing_m", float(spacing_m))

    def __len__(self) -> int:
        return len(self.points)


def generate_grid(
    poly: SearchPolygon, spacing_m: float, max_points: int = DEFAULT_GRID_CAP
) -> PointCloud:
    """Axis-aligned lattice of points at ``spacing_m`` covering the polygon.

    Rows step due north and columns due east from the bounding box's
    south-west corner; candidates outside the polygon are dropped.
    Deterministic for fixed inputs.

    Raises:
        EmptyGridError: no lattice point falls inside the polygon.
        GridTooLargeError: more than ``max_points`` points would result.
    """
    if spacing_m <= 0.0:
        raise GeodesyError("spacing must be > 0")
    min_lat, min_lon, max_lat, max_lon = poly.bounding_box()
    sw = GeoPoint(min_lat, min_lon)

    lats: list[float] = []
    i = 0
    while True:
        lat = destination_point(sw, 0.0, i * spacing_m).lat
        if lat > max_lat + _EDGE_EPSILON_DEG:
            break
        lats.append(lat)
        i += 1
        if i > 10 * max_points:
            raise GridTooLargeError("bounding box vastly exceeds the grid cap")
    lons: list[float] = []
    j = 0
    lon_eps = _EDGE_EPSILON_DEG / max(math.cos(math.radians(min(abs(min_lat), 89.0))), 1e-6)
    while True:
        lon = destination_point(sw, 90.0, j * spacing_m).lon
        if lon > max_lon + lon_eps:
            break
        lons.append(lon)
        j += 1
        if j > 10 * max_points:
            raise GridTooLargeError("bounding box vastly exceeds the grid cap")
    if len(lats) * len(lons) > 100 * max_points:
        raise GridTooLargeError(
            f"lattice candidate count {len(lats) * len(lons)} exceeds sanity bound"
        )

    tester = _PolygonTester(poly)
    kept: list[GeoPoint] = []
    for lat in lats:
        for lon in lons:
            p = GeoPoint(lat, lon)
            if tester.contains(p):
                kept.append(p)
                if len(kept) > max_points:
                    raise GridTooLargeError(
                        f"grid exceeds cap of {max_points} points; widen spacing"
                    )
    if not kept:
        raise EmptyGridError("no lattice point falls inside the polygon")
    return PointCloud(kept, spacing_m)


def rectangle_polygon(sw: GeoPoint, width_m: float, height_m: float) -> SearchPolygon:
    """Rectangle polygon aligned to the lat/lon graticule from a SW corner.

    The east edge sits at the longitude reached by travelling ``width_m``
    due east from ``sw``, the north edge at the latitude ``height_m`` due
    north, so the sides are exact coordinate lines.
    """
    north_lat = destination_point(sw, 0.0, height_m).lat
    east_lon = destination_point(sw, 90.0, width_m).lon
    return SearchPolygon(
        [
            GeoPoint(sw.lat, sw.lon),
            GeoPoint(sw.lat, east_lon),
            GeoPoint(north_lat, east_lon),
            GeoPoint(north_lat, sw.lon),
        ]
    )
