"""Split a survey point cloud into one area per drone via seeded k-means.

Clustering runs in a local equirectangular projection of the cloud, where
Euclidean distance and coordinate means are well defined; at the few-km
scale of a search area the projection error is far below the grid spacing.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .geodesy import EARTH_RADIUS_M, GeoPoint, PointCloud

DEFAULT_MAX_ITER = 100


class InvalidKError(ValueError):
    """Cluster count outside 1..len(points)."""


@dataclass(frozen=True)
class Clustering:
    """Result of one k-means run.

    ``inertia_history`` holds the total within-cluster squared distance
    after each assignment pass, in meters squared.
    """

    k: int
    assignments: tuple[int, ...]
    centroids: tuple[GeoPoint, ...]
    iterations: int
    converged: bool
    inertia_history: tuple[float, ...]


def _as_points(points) -> list[GeoPoint]:
    if isinstance(points, PointCloud):
        return list(points.points)
    return list(points)


def _project_all(points: Sequence[GeoPoint]) -> tuple[list[tuple[float, float]], float, float]:
    ref_lat = sum(p.lat for p in points) / len(points)
    ref_lon = sum(p.lon for p in points) / len(points)
    cos_ref = math.cos(math.radians(ref_lat))
    xy = [
        (
            math.radians(p.lon - ref_lon) * cos_ref * EARTH_RADIUS_M,
            math.radians(p.lat - ref_lat) * EARTH_RADIUS_M,
        )
        for p in points
    ]
    return xy, ref_lat, ref_lon


def _unproject(x: float, y: float, ref_lat: float, ref_lon: float) -> GeoPoint:
    cos_ref = math.cos(math.radians(ref_lat))
    lat = ref_lat + math.degrees(y / EARTH_RADIUS_M)
    lon = ref_lon + math.degrees(x / (EARTH_RADIUS_M * cos_ref))
    return GeoPoint(lat, lon)


def _kmeanspp_init(xy: list[tuple[float, float]], k: int, rng: random.Random) -> list[tuple[float, float]]:
    """k-means++ seeding: spread initial centroids with distance-weighted draws."""
    centroids = [xy[rng.randrange(len(xy))]]
    d2 = [_dist2(p, centroids[0]) for p in xy]
    while len(centroids) < k:
        total = sum(d2)
        if total <= 0.0:
            centroids.append(xy[rng.randrange(len(xy))])
            continue
        r = rng.random() * total
        acc = 0.0
        idx = len(xy) - 1
        for i, w in enumerate(d2):
            acc += w
            if acc >= r:
                idx = i
                break
        centroids.append(xy[idx])
        d2 = [min(old, _dist2(p, centroids[-1])) for old, p in zip(d2, xy)]
    return centroids


def _dist2(a: tuple[float, float], b: tuple[float, float]) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


def kmeans(
    points,
    k: int,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    initial_centroids: Sequence[GeoPoint] | None = None,
) -> Clustering:
    """Lloyd's k-means over the point cloud, deterministic for a fixed seed.

    Stops when an assignment pass reproduces the previous one (or the
    centroids stop moving); ``converged`` is False only if ``max_iter``
    passes ran without reaching that fixed point. Empty clusters are
    repaired by donating the point currently farthest from its own
    centroid, so every cluster in the result is non-empty.

    ``initial_centroids`` overrides the seeded k-means++ start.
    """
    pts = _as_points(points)
    n = len(pts)
    if n < 1:
        raise InvalidKError("need at least one point")
    if k < 1 or k > n:
        raise InvalidKError(f"k={k} outside 1..{n}")

    xy, ref_lat, ref_lon = _project_all(pts)
    if initial_centroids is not None:
        if len(initial_centroids) != k:
            raise InvalidKError(f"expected {k} initial centroids, got {len(initial_centroids)}")
        cos_ref = math.cos(math.radians(ref_lat))
        cxy = [
            (
                math.radians(c.lon - ref_lon) * cos_ref * EARTH_RADIUS_M,
                math.radians(c.lat - ref_lat) * EARTH_RADIUS_M,
            )
            for c in initial_centroids
        ]
    else:
        cxy = _kmeanspp_init(xy, k, random.Random(seed))

    assignments: list[int] = []
    prev: list[int] | None = None
    inertia_history: list[float] = []
    iterations = 0
    converged = False

    for _ in range(max_iter):
        iterations += 1
        assignments = [_nearest(p, cxy) for p in xy]
        _repair_empty(assignments, xy, cxy, k)
        inertia_history.append(
            math.fsum(_dist2(xy[i], cxy[assignments[i]]) for i in range(n))
        )
        if prev is not None and assignments == prev:
            converged = True
            break
        new_cxy = _means(assignments, xy, cxy, k)
        if new_cxy == cxy:
            converged = True
            break
        cxy = new_cxy
        prev = assignments

    centroids = _means(assignments, xy, cxy, k)
    return Clustering(
        k=k,
        assignments=tuple(assignments),
        centroids=tuple(_unproject(x, y, ref_lat, ref_lon) for x, y in centroids),
        iterations=iterations,
        converged=converged,
        inertia_history=tuple(inertia_history),
    )


def _nearest(p: tuple[float, float], cxy: list[tuple[float, float]]) -> int:
    best = 0
    best_d = _dist2(p, cxy[0])
    for j in range(1, len(cxy)):
        d = _dist2(p, cxy[j])
        if d < best_d:
            best = j
            best_d = d
    return best


def _means(
    assignments: list[int],
    xy: list[tuple[float, float]],
    cxy: list[tuple[float, float]],
    k: int,
) -> list[tuple[float, float]]:
    # fsum keeps the mean independent of point ordering
    out = []
    for j in range(k):
        xs = [xy[i][0] for i in range(len(xy)) if assignments[i] == j]
        ys = [xy[i][1] for i in range(len(xy)) if assignments[i] == j]
        if xs:
            out.append((math.fsum(xs) / len(xs), math.fsum(ys) / len(ys)))
        else:
            out.append(cxy[j])
    return out


def _repair_empty(
    assignments: list[int],
    xy: list[tuple[float, float]],
    cxy: list[tuple[float, float]],
    k: int,
) -> None:
    counts = [0] * k
    for a in assignments:
        counts[a] += 1
    for j in range(k):
        while counts[j] == 0:
            donor_i = -1
            donor_d = -1.0
            for i, a in enumerate(assignments):
                if counts[a] <= 1:
                    continue
                d = _dist2(xy[i], cxy[a])
                if d > donor_d:
                    donor_d = d
                    donor_i = i
            if donor_i < 0:
                break
            counts[assignments[donor_i]] -= 1
            assignments[donor_i] = j
            counts[j] += 1


def split_areas(points, n_drones: int, seed: int = 0) -> list[list[GeoPoint]]:
    """Partition the cloud into ``n_drones`` non-empty, disjoint point sets."""
    pts = _as_points(points)
    clustering = kmeans(pts, n_drones, seed=seed)
    areas: list[list[GeoPoint]] = [[] for _ in range(n_drones)]
    for p, a in zip(pts, clustering.assignments):
        areas[a].append(p)
    return areas
