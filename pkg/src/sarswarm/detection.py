"""Probabilistic BLE detection channel and search-effectiveness formulas.

The detection model is calibrated to field-measured success rates by
distance (100% out to 100 m, 90% at 150 m, 60% at 200 m) and interpolates
linearly between the measured points. Past the last measurement the rate
falls linearly to zero at ``max_range_m`` so the simulation stays
conservative instead of extrapolating optimistic open-field reach.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from pathlib import Path

from .beacon import SimulatedBeacon
from .geodesy import GeoPoint, haversine_distance


class DomainError(ValueError):
    """Input outside the mathematical domain of a formula."""


#: Measured (distance_m, success_rate) pairs for horizontal open-field scans.
MEASURED_DETECTION_TABLE: tuple[tuple[float, float], ...] = (
    (10.0, 1.00),
    (20.0, 1.00),
    (50.0, 1.00),
    (100.0, 1.00),
    (150.0, 0.90),
    (200.0, 0.60),
)

DEFAULT_MAX_RANGE_M = 250.0


@dataclass(frozen=True)
class DetectionModel:
    """Distance-to-success-rate lookup with linear interpolation."""

    table: tuple[tuple[float, float], ...] = MEASURED_DETECTION_TABLE
    max_range_m: float = DEFAULT_MAX_RANGE_M

    def __post_init__(self) -> None:
        if not self.table:
            raise DomainError("detection table must not be empty")
        prev_d = -math.inf
        prev_r = math.inf
        for d, r in self.table:
            if d <= prev_d:
                raise DomainError("table distances must be strictly increasing")
            if not 0.0 <= r <= 1.0:
                raise DomainError(f"rate {r} outside [0, 1]")
            if r > prev_r:
                raise DomainError("table rates must be non-increasing")
            prev_d, prev_r = d, r
        if self.max_range_m < self.table[-1][0]:
            raise DomainError("max range must not be below the last measured distance")


def load_model(path: str | Path, max_range_m: float = DEFAULT_MAX_RANGE_M) -> DetectionModel:
    """Read a model table from a CSV file with ``distance_m,rate`` rows."""
    rows: list[tuple[float, float]] = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() in ("", "distance_m"):
                continue
            rows.append((float(row[0]), float(row[1])))
    return DetectionModel(table=tuple(rows), max_range_m=max_range_m)


def detection_probability(model: DetectionModel, slant_distance_m: float) -> float:
    """Success probability at a given 3-D distance, in [0, 1].

    Clamped to the first table rate below the first measured distance,
    piecewise-linear between measurements, falling linearly to zero at
    ``max_range_m`` beyond the last one.
    """
    if slant_distance_m < 0.0:
        raise DomainError("distance must be >= 0")
    table = model.table
    if slant_distance_m <= table[0][0]:
        return table[0][1]
    for (d1, r1), (d2, r2) in zip(table, table[1:]):
        if slant_distance_m <= d2:
            t = (slant_distance_m - d1) / (d2 - d1)
            return r1 + t * (r2 - r1)
    last_d, last_r = table[-1]
    if slant_distance_m >= model.max_range_m:
        return 0.0
    t = (slant_distance_m - last_d) / (model.max_range_m - last_d)
    return last_r * (1.0 - t)


def slant_distance(drone: GeoPoint, beacon: GeoPoint) -> float:
    """3-D separation: great-circle ground distance plus altitude difference."""
    horizontal = haversine_distance(drone, beacon)
    return math.hypot(horizontal, drone.alt_m - beacon.alt_m)


def simulate_scan(
    model: DetectionModel,
    drone_pose: GeoPoint,
    beacon: SimulatedBeacon,
    rng: random.Random,
) -> bool:
    """One Bernoulli scan attempt; a dead beacon battery is never detected."""
    if not beacon.battery_ok:
        return False
    p = detection_probability(model, slant_distance(drone_pose, beacon.position))
    return rng.random() < p


@dataclass(frozen=True)
class SearchEffectiveness:
    """Wartes success measure: segment priority x detection ability."""

    pa: float
    pd: float
    pe: float


def success_probability(pa: float, pd: float) -> SearchEffectiveness:
    """Pe = Pa * Pd, the probability-of-success measure for one segment."""
    if not 0.0 <= pa <= 1.0:
        raise DomainError(f"pa={pa} outside [0, 1]")
    if not 0.0 <= pd <= 1.0:
        raise DomainError(f"pd={pd} outside [0, 1]")
    return SearchEffectiveness(pa=pa, pd=pd, pe=pa * pd)


@dataclass(frozen=True)
class CoverageTime:
    """Sweep time split across a drone fleet, in minutes."""

    per_drone_minutes: float
    cumulative_minutes: float


def coverage_time(path_length_m: float, speed_mps: float, n_drones: int) -> CoverageTime:
    """Minutes to sweep a path split evenly over ``n_drones`` drones.

    The cumulative figure (per-drone x fleet size) is independent of the
    fleet size: adding drones divides wall-clock time, not total work.
    """
    if speed_mps <= 0.0:
        raise DomainError("speed must be > 0")
    if n_drones < 1:
        raise DomainError("need at least one drone")
    if path_length_m < 0.0:
        raise DomainError("path length must be >= 0")
    per_drone = path_length_m / (speed_mps * n_drones * 60.0)
    return CoverageTime(per_drone_minutes=per_drone, cumulative_minutes=per_drone * n_drones)


def team_coverage_time(n_people: int, minutes_each: float) -> float:
    """Total person-minutes for a ground team sweep: people x minutes each."""
    if n_people < 1:
        raise DomainError("need at least one person")
    if minutes_each <= 0.0:
        raise DomainError("minutes per person must be > 0")
    return n_people * minutes_each
