"""The emergency-protocol state machine and discrete-time flight simulation.

A mission moves Created -> WeatherCheck -> (CancelledWeather | Planning) ->
Flying -> Completed/Aborted. While flying, each simulated drone advances
along its planned route at the configured speed and performs one scan per
tick against every battery-live beacon in the world; verified detections of
searched users produce photo events. Everything is driven by an explicit
rng and simulated clock, so a fixed config and world reproduce the event
log byte for byte.
"""

from __future__ import annotations

import enum
import math
import random
import uuid
from dataclasses import dataclass, field
from typing import Sequence

from .beacon import SimulatedBeacon
from .detection import CoverageTime, DetectionModel, coverage_time, simulate_scan
from .geodesy import GeoPoint, SearchPolygon, haversine_distance
from .routing import Route, plan_mission_routes
from .weather import WeatherProvider, WeatherReport, WeatherUnavailableError

DEFAULT_WIND_THRESHOLD_MPS = 10.0
DEFAULT_PRECIPITATION_THRESHOLD = 0.5
DEFAULT_ENDURANCE_S = 30.0 * 60.0
PHOTOS_PER_DETECTION = 3


class MissionError(RuntimeError):
    """Base class for mission protocol violations."""


class UnknownUserError(MissionError):
    """A searched user code is not registered."""


class InvalidPhaseError(MissionError):
    """Operation not allowed in the record's current phase."""


class MissionStillRunningError(MissionError):
    """Results were requested before the mission reached a terminal phase."""


class Phase(str, enum.Enum):
    CREATED = "Created"
    WEATHER_CHECK = "WeatherCheck"
    CANCELLED_WEATHER = "CancelledWeather"
    PLANNING = "Planning"
    FLYING = "Flying"
    COMPLETED = "Completed"
    ABORTED = "Aborted"


ALLOWED_TRANSITIONS: dict[Phase, frozenset[Phase]] = {
    Phase.CREATED: frozenset({Phase.WEATHER_CHECK}),
    Phase.WEATHER_CHECK: frozenset({Phase.CANCELLED_WEATHER, Phase.PLANNING}),
    Phase.CANCELLED_WEATHER: frozenset(),
    Phase.PLANNING: frozenset({Phase.FLYING}),
    Phase.FLYING: frozenset({Phase.COMPLETED, Phase.ABORTED}),
    Phase.COMPLETED: frozenset(),
    Phase.ABORTED: frozenset(),
}

TERMINAL_PHASES = frozenset({Phase.CANCELLED_WEATHER, Phase.COMPLETED, Phase.ABORTED})


@dataclass(frozen=True)
class MissionConfig:
    """Operator-supplied mission parameters."""

    searched_user_codes: tuple[str, ...]
    polygon: SearchPolygon
    n_drones: int
    altitude_m: float
    base: GeoPoint
    spacing_m: float = 50.0
    speed_mps: float = 5.0
    weather_override: bool = False
    seed: int = 0
    endurance_s: float = DEFAULT_ENDURANCE_S
    tick_s: float = 1.0
    return_to_base: bool = False

    def __post_init__(self) -> None:
        if not self.searched_user_codes:
            raise ValueError("at least one searched user code is required")
        object.__setattr__(self, "searched_user_codes", tuple(self.searched_user_codes))
        if self.n_drones < 1:
            raise ValueError("n_drones must be >= 1")
        if self.altitude_m <= 0.0:
            raise ValueError("altitude must be > 0")
        if self.spacing_m <= 0.0:
            raise ValueError("spacing must be > 0")
        if self.speed_mps <= 0.0:
            raise ValueError("speed must be > 0")
        if self.endurance_s <= 0.0:
            raise ValueError("endurance must be > 0")
        if self.tick_s <= 0.0:
            raise ValueError("tick must be > 0")

    def to_dict(self) -> dict:
        return {
            "searched_user_codes": list(self.searched_user_codes),
            "polygon": self.polygon.to_dict(),
            "n_drones": self.n_drones,
            "altitude_m": self.altitude_m,
            "base": self.base.to_dict(),
            "spacing_m": self.spacing_m,
            "speed_mps": self.speed_mps,
            "weather_override": self.weather_override,
            "seed": self.seed,
            "endurance_s": self.endurance_s,
            "tick_s": self.tick_s,
            "return_to_base": self.return_to_base,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MissionConfig":
        return cls(
            searched_user_codes=tuple(d["searched_user_codes"]),
            polygon=SearchPolygon.from_dict(d["polygon"]),
            n_drones=d["n_drones"],
            altitude_m=d["altitude_m"],
            base=GeoPoint.from_dict(d["base"]),
            spacing_m=d.get("spacing_m", 50.0),
            speed_mps=d.get("speed_mps", 5.0),
            weather_override=d.get("weather_override", False),
            seed=d.get("seed", 0),
            endurance_s=d.get("endurance_s", DEFAULT_ENDURANCE_S),
            tick_s=d.get("tick_s", 1.0),
            return_to_base=d.get("return_to_base", False),
        )


# --- events --------------------------------------------------------------


@dataclass(frozen=True)
class SyncEvent:
    """Searched-user set preloaded onto the fleet at mission start."""

    t_s: float
    user_codes: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"type": "sync", "t_s": self.t_s, "user_codes": list(self.user_codes)}


@dataclass(frozen=True)
class PhaseEvent:
    t_s: float
    phase: str
    reason: str | None = None

    def to_dict(self) -> dict:
        return {"type": "phase", "t_s": self.t_s, "phase": self.phase, "reason": self.reason}


@dataclass(frozen=True)
class TelemetryEvent:
    t_s: float
    drone_id: int
    position: GeoPoint
    distance_flown_m: float

    def to_dict(self) -> dict:
        return {
            "type": "telemetry",
            "t_s": self.t_s,
            "drone_id": self.drone_id,
            "position": self.position.to_dict(),
            "distance_flown_m": self.distance_flown_m,
        }


@dataclass(frozen=True)
class DetectionEvent:
    t_s: float
    drone_id: int
    user_code: str
    position: GeoPoint
    verified: bool

    def to_dict(self) -> dict:
        return {
            "type": "detection",
            "t_s": self.t_s,
            "drone_id": self.drone_id,
            "user_code": self.user_code,
            "position": self.position.to_dict(),
            "verified": self.verified,
        }


@dataclass(frozen=True)
class PhotoEvent:
    t_s: float
    drone_id: int
    user_code: str
    uri: str
    position: GeoPoint

    def to_dict(self) -> dict:
        return {
            "type": "photo",
            "t_s": self.t_s,
            "drone_id": self.drone_id,
            "user_code": self.user_code,
            "uri": self.uri,
            "position": self.position.to_dict(),
        }


Event = SyncEvent | PhaseEvent | TelemetryEvent | DetectionEvent | PhotoEvent


def event_from_dict(d: dict) -> Event:
    kind = d["type"]
    if kind == "sync":
        return SyncEvent(t_s=d["t_s"], user_codes=tuple(d["user_codes"]))
    if kind == "phase":
        return PhaseEvent(t_s=d["t_s"], phase=d["phase"], reason=d.get("reason"))
    if kind == "telemetry":
        return TelemetryEvent(
            t_s=d["t_s"],
            drone_id=d["drone_id"],
            position=GeoPoint.from_dict(d["position"]),
            distance_flown_m=d["distance_flown_m"],
        )
    if kind == "detection":
        return DetectionEvent(
            t_s=d["t_s"],
            drone_id=d["drone_id"],
            user_code=d["user_code"],
            position=GeoPoint.from_dict(d["position"]),
            verified=d["verified"],
        )
    if kind == "photo":
        return PhotoEvent(
            t_s=d["t_s"],
            drone_id=d["drone_id"],
            user_code=d["user_code"],
            uri=d["uri"],
            position=GeoPoint.from_dict(d["position"]),
        )
    raise ValueError(f"unknown event type {kind!r}")


# --- drones ---------------------------------------------------------------


@dataclass
class DroneState:
    """Progress of one drone along its route polyline."""

    drone_id: int
    route: Route
    leg_index: int = 0
    leg_fraction: float = 0.0
    elapsed_s: float = 0.0
    distance_flown_m: float = 0.0
    done: bool = False
    exhausted: bool = False

    def position(self) -> GeoPoint:
        wps = self.route.waypoints
        if self.leg_index >= len(wps) - 1:
            last = wps[-1]
            return GeoPoint(last.lat, last.lon, self.route.altitude_m)
        a = wps[self.leg_index]
        b = wps[self.leg_index + 1]
        f = self.leg_fraction
        return GeoPoint(
            a.lat + (b.lat - a.lat) * f,
            a.lon + (b.lon - a.lon) * f,
            self.route.altitude_m,
        )

    def advance(self, distance_m: float) -> float:
        """Move along the polyline; returns the distance actually flown."""
        moved = 0.0
        legs = self.route.leg_lengths_m
        while distance_m > 1e-12 and self.leg_index < len(legs):
            leg_len = legs[self.leg_index]
            remaining = (1.0 - self.leg_fraction) * leg_len
            if remaining > distance_m:
                self.leg_fraction += distance_m / leg_len if leg_len > 0 else 1.0
                moved += distance_m
                distance_m = 0.0
            else:
                moved += remaining
                distance_m -= remaining
                self.leg_index += 1
                self.leg_fraction = 0.0
        self.distance_flown_m += moved
        if self.leg_index >= len(legs):
            self.done = True
        return moved

    def to_dict(self) -> dict:
        return {
            "drone_id": self.drone_id,
            "route": self.route.to_dict(),
            "leg_index": self.leg_index,
            "leg_fraction": self.leg_fraction,
            "elapsed_s": self.elapsed_s,
            "distance_flown_m": self.distance_flown_m,
            "done": self.done,
            "exhausted": self.exhausted,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DroneState":
        return cls(
            drone_id=d["drone_id"],
            route=Route.from_dict(d["route"]),
            leg_index=d["leg_index"],
            leg_fraction=d["leg_fraction"],
            elapsed_s=d["elapsed_s"],
            distance_flown_m=d["distance_flown_m"],
            done=d["done"],
            exhausted=d["exhausted"],
        )


# --- weather gate ---------------------------------------------------------


@dataclass(frozen=True)
class WeatherDecision:
    go: bool
    reason: str | None = None
    report: WeatherReport | None = None


def check_weather(
    area_centroid: GeoPoint,
    provider: WeatherProvider,
    override: bool,
    wind_threshold_mps: float = DEFAULT_WIND_THRESHOLD_MPS,
    precipitation_threshold: float = DEFAULT_PRECIPITATION_THRESHOLD,
) -> WeatherDecision:
    """Go/no-go decision for launching the fleet.

    Rain or wind at the area centroid cancels unless the operator override
    is set; a failing provider is an error unless overridden.
    """
    try:
        report = provider.forecast(area_centroid.lat, area_centroid.lon)
    except Exception as exc:
        if override:
            return WeatherDecision(go=True, reason="override: weather unavailable", report=None)
        raise WeatherUnavailableError(str(exc)) from exc
    if report.precipitation_probability >= precipitation_threshold:
        if override:
            return WeatherDecision(go=True, reason="override: rain", report=report)
        return WeatherDecision(go=False, reason="rain", report=report)
    if report.wind_mps >= wind_threshold_mps:
        if override:
            return WeatherDecision(go=True, reason="override: wind", report=report)
        return WeatherDecision(go=False, reason="wind", report=report)
    return WeatherDecision(go=True, reason=None, report=report)


# --- mission record ---------------------------------------------------------


@dataclass
class MissionRecord:
    """One mission: configuration, phase, fleet state and the event log."""

    id: str
    config: MissionConfig
    phase: Phase = Phase.CREATED
    routes: list[Route] = field(default_factory=list)
    drones: list[DroneState] = field(default_factory=list)
    log: list[Event] = field(default_factory=list)
    sim_time_s: float = 0.0
    cancel_reason: str | None = None

    def transition(self, to: Phase, reason: str | None = None) -> None:
        if to not in ALLOWED_TRANSITIONS[self.phase]:
            raise InvalidPhaseError(f"illegal transition {self.phase.value} -> {to.value}")
        self.phase = to
        self.log.append(PhaseEvent(t_s=self.sim_time_s, phase=to.value, reason=reason))

    @property
    def detections(self) -> list[DetectionEvent]:
        return [e for e in self.log if isinstance(e, DetectionEvent)]

    @property
    def photos(self) -> list[PhotoEvent]:
        return [e for e in self.log if isinstance(e, PhotoEvent)]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "config": self.config.to_dict(),
            "phase": self.phase.value,
            "routes": [r.to_dict() for r in self.routes],
            "drones": [d.to_dict() for d in self.drones],
            "log": [e.to_dict() for e in self.log],
            "sim_time_s": self.sim_time_s,
            "cancel_reason": self.cancel_reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MissionRecord":
        return cls(
            id=d["id"],
            config=MissionConfig.from_dict(d["config"]),
            phase=Phase(d["phase"]),
            routes=[Route.from_dict(r) for r in d["routes"]],
            drones=[DroneState.from_dict(s) for s in d["drones"]],
            log=[event_from_dict(e) for e in d["log"]],
            sim_time_s=d["sim_time_s"],
            cancel_reason=d.get("cancel_reason"),
        )


def start_mission(
    config: MissionConfig,
    registered_user_codes,
    weather_provider: WeatherProvider,
    mission_id: str | None = None,
    wind_threshold_mps: float = DEFAULT_WIND_THRESHOLD_MPS,
    precipitation_threshold: float = DEFAULT_PRECIPITATION_THRESHOLD,
) -> MissionRecord:
    """Run the pre-flight protocol: user check, weather gate, planning.

    Returns the record in Flying (routes planned, fleet at base) or in
    CancelledWeather. Unknown user codes abort before any state is created.
    """
    known = set(registered_user_codes)
    unknown = [c for c in config.searched_user_codes if c not in known]
    if unknown:
        raise UnknownUserError(f"user codes not registered: {unknown}")

    record = MissionRecord(id=mission_id or uuid.uuid4().hex, config=config)
    record.transition(Phase.WEATHER_CHECK)
    decision = check_weather(
        config.polygon.centroid(),
        weather_provider,
        config.weather_override,
        wind_threshold_mps=wind_threshold_mps,
        precipitation_threshold=precipitation_threshold,
    )
    if not decision.go:
        record.cancel_reason = decision.reason
        record.transition(Phase.CANCELLED_WEATHER, reason=decision.reason)
        return record

    record.transition(Phase.PLANNING, reason=decision.reason)
    routes = plan_mission_routes(
        config.polygon,
        config.spacing_m,
        config.n_drones,
        config.base,
        seed=config.seed,
        altitude_m=config.altitude_m,
    )
    if config.return_to_base:
        routes = [_close_route(r) for r in routes]
    record.routes = routes
    record.drones = [DroneState(drone_id=r.drone_id, route=r) for r in routes]
    record.log.append(SyncEvent(t_s=0.0, user_codes=tuple(config.searched_user_codes)))
    record.transition(Phase.FLYING)
    return record


def _close_route(route: Route) -> Route:
    if len(route.waypoints) < 2:
        return route
    back = tuple(reversed(route.waypoints[:-1]))
    waypoints = route.waypoints + back
    legs = tuple(
        haversine_distance(waypoints[i], waypoints[i + 1]) for i in range(len(waypoints) - 1)
    )
    return Route(
        drone_id=route.drone_id,
        waypoints=waypoints,
        leg_lengths_m=legs,
        total_length_m=math.fsum(legs),
        altitude_m=route.altitude_m,
    )


def tick(
    record: MissionRecord,
    world: Sequence[SimulatedBeacon],
    dt_s: float,
    rng: random.Random,
    model: DetectionModel | None = None,
) -> list[Event]:
    """Advance the simulation one step; returns the newly logged events.

    Drones are processed in id order: move, telemetry, then one scan against
    every battery-live beacon. Detections of users outside the searched set
    are discarded; verified ones emit three photo events each.
    """
    if record.phase is not Phase.FLYING:
        raise InvalidPhaseError(f"tick requires Flying, record is {record.phase.value}")
    if dt_s <= 0.0:
        raise ValueError("dt must be > 0")
    model = model or DetectionModel()
    searched = set(record.config.searched_user_codes)
    record.sim_time_s += dt_s
    t = record.sim_time_s
    new_events: list[Event] = []

    for drone in record.drones:
        if drone.done:
            continue
        drone.advance(record.config.speed_mps * dt_s)
        drone.elapsed_s = min(drone.elapsed_s + dt_s, record.config.endurance_s)
        if not drone.done and drone.elapsed_s >= record.config.endurance_s:
            drone.done = True
            drone.exhausted = True
        pose = drone.position()
        new_events.append(
            TelemetryEvent(
                t_s=t,
                drone_id=drone.drone_id,
                position=pose,
                distance_flown_m=drone.distance_flown_m,
            )
        )
        for b in world:
            if not b.battery_ok:
                continue
            if not simulate_scan(model, pose, b, rng):
                continue
            if b.user_code not in searched:
                continue  # server says not in search: discard (404 semantics)
            new_events.append(
                DetectionEvent(
                    t_s=t, drone_id=drone.drone_id, user_code=b.user_code,
                    position=pose, verified=True,
                )
            )
            for k in range(PHOTOS_PER_DETECTION):
                new_events.append(
                    PhotoEvent(
                        t_s=t,
                        drone_id=drone.drone_id,
                        user_code=b.user_code,
                        uri=f"photo://{record.id}/{drone.drone_id}/{t:.0f}-{k}",
                        position=pose,
                    )
                )

    record.log.extend(new_events)
    if all(d.done for d in record.drones):
        if any(d.exhausted for d in record.drones):
            record.cancel_reason = "endurance exhausted (partial coverage)"
            record.transition(Phase.ABORTED, reason=record.cancel_reason)
        else:
            record.transition(Phase.COMPLETED)
        new_events.append(record.log[-1])
    return new_events


def run_mission(
    record: MissionRecord,
    world: Sequence[SimulatedBeacon],
    rng: random.Random | None = None,
    model: DetectionModel | None = None,
    max_ticks: int = 1_000_000,
) -> MissionRecord:
    """Tick the mission to a terminal phase with the config's seed and tick size."""
    rng = rng if rng is not None else random.Random(record.config.seed)
    ticks = 0
    while record.phase is Phase.FLYING:
        tick(record, world, record.config.tick_s, rng, model=model)
        ticks += 1
        if ticks > max_ticks:
            raise MissionError("simulation exceeded the tick budget")
    return record


# --- results ----------------------------------------------------------------


@dataclass(frozen=True)
class UserSearchResult:
    user_code: str
    found: bool
    first_detection_position: GeoPoint | None
    first_detection_t_s: float | None
    photo_uris: tuple[str, ...]


@dataclass(frozen=True)
class DroneSummary:
    drone_id: int
    distance_flown_m: float
    flight_minutes: float
    planned_length_m: float
    finished_route: bool


@dataclass(frozen=True)
class MissionResult:
    mission_id: str
    phase: str
    reason: str | None
    users: tuple[UserSearchResult, ...]
    drones: tuple[DroneSummary, ...]
    planned_total_length_m: float
    planned_coverage: CoverageTime | None

    def to_dict(self) -> dict:
        return {
            "mission_id": self.mission_id,
            "phase": self.phase,
            "reason": self.reason,
            "users": [
                {
                    "user_code": u.user_code,
                    "found": u.found,
                    "first_detection_position": (
                        u.first_detection_position.to_dict()
                        if u.first_detection_position
                        else None
                    ),
                    "first_detection_t_s": u.first_detection_t_s,
                    "photo_uris": list(u.photo_uris),
                }
                for u in self.users
            ],
            "drones": [
                {
                    "drone_id": d.drone_id,
                    "distance_flown_m": d.distance_flown_m,
                    "flight_minutes": d.flight_minutes,
                    "planned_length_m": d.planned_length_m,
                    "finished_route": d.finished_route,
                }
                for d in self.drones
            ],
            "planned_total_length_m": self.planned_total_length_m,
            "planned_coverage": (
                {
                    "per_drone_minutes": self.planned_coverage.per_drone_minutes,
                    "cumulative_minutes": self.planned_coverage.cumulative_minutes,
                }
                if self.planned_coverage
                else None
            ),
        }


def mission_result(record: MissionRecord) -> MissionResult:
    """Summarize a finished (or cancelled) mission for the results panel."""
    if record.phase not in TERMINAL_PHASES:
        raise MissionStillRunningError(f"mission is {record.phase.value}")

    if record.phase is Phase.CANCELLED_WEATHER:
        return MissionResult(
            mission_id=record.id,
            phase=record.phase.value,
            reason=record.cancel_reason,
            users=(),
            drones=(),
            planned_total_length_m=0.0,
            planned_coverage=None,
        )

    users = []
    for code in record.config.searched_user_codes:
        first = next((e for e in record.detections if e.user_code == code), None)
        uris = tuple(p.uri for p in record.photos if p.user_code == code)
        users.append(
            UserSearchResult(
                user_code=code,
                found=first is not None,
                first_detection_position=first.position if first else None,
                first_detection_t_s=first.t_s if first else None,
                photo_uris=uris,
            )
        )
    drones = tuple(
        DroneSummary(
            drone_id=d.drone_id,
            distance_flown_m=d.distance_flown_m,
            flight_minutes=d.elapsed_s / 60.0,
            planned_length_m=d.route.total_length_m,
            finished_route=d.done and not d.exhausted,
        )
        for d in record.drones
    )
    total = math.fsum(r.total_length_m for r in record.routes)
    return MissionResult(
        mission_id=record.id,
        phase=record.phase.value,
        reason=record.cancel_reason,
        users=tuple(users),
        drones=drones,
        planned_total_length_m=total,
        planned_coverage=coverage_time(total, record.config.speed_mps, record.config.n_drones),
    )
