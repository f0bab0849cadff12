"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..geodesy import GeoPoint, SearchPolygon
from ..mission import MissionConfig


class GeoPointModel(BaseModel):
    lat: float = Field(ge=-90, le=90)
    lon: float = Field(ge=-180, le=180)
    alt_m: float = Field(default=0.0, ge=0)

    def to_core(self) -> GeoPoint:
        return GeoPoint(lat=self.lat, lon=self.lon, alt_m=self.alt_m)

    @classmethod
    def from_core(cls, p: GeoPoint) -> "GeoPointModel":
        return cls(lat=p.lat, lon=p.lon, alt_m=p.alt_m)


class PolygonModel(BaseModel):
    vertices: list[GeoPointModel] = Field(min_length=3)

    def to_core(self) -> SearchPolygon:
        return SearchPolygon([v.to_core() for v in self.vertices])


class RegisterUserRequest(BaseModel):
    name: str
    surname: str
    address: str
    blood_type: str


class RegisterUserResponse(BaseModel):
    user_code: str
    short_url_path: str


class ProfileResponse(BaseModel):
    user_code: str
    short_url_path: str
    in_search: bool
    name: str
    surname: str
    address: str
    blood_type: str


class MissionConfigModel(BaseModel):
    searched_user_codes: list[str] = Field(min_length=1)
    polygon: PolygonModel
    n_drones: int = Field(ge=1)
    altitude_m: float = Field(gt=0)
    base: GeoPointModel
    spacing_m: float = Field(default=50.0, gt=0)
    speed_mps: float = Field(default=5.0, gt=0)
    weather_override: bool = False
    seed: int = 0
    endurance_s: float = Field(default=1800.0, gt=0)
    tick_s: float = Field(default=1.0, gt=0)
    return_to_base: bool = False

    def to_core(self) -> MissionConfig:
        return MissionConfig(
            searched_user_codes=tuple(self.searched_user_codes),
            polygon=self.polygon.to_core(),
            n_drones=self.n_drones,
            altitude_m=self.altitude_m,
            base=self.base.to_core(),
            spacing_m=self.spacing_m,
            speed_mps=self.speed_mps,
            weather_override=self.weather_override,
            seed=self.seed,
            endurance_s=self.endurance_s,
            tick_s=self.tick_s,
            return_to_base=self.return_to_base,
        )


class WorldBeaconModel(BaseModel):
    """Ground-truth beacon for the simulated world."""

    user_code: str
    position: GeoPointModel
    url: str | None = None
    advertising_interval_ms: int = Field(default=1000, ge=20, le=10_240)
    tx_power_dbm: int = Field(default=-16, ge=-100, le=20)
    battery_ok: bool = True


class CreateMissionRequest(BaseModel):
    """Either a sealed config envelope or plain config from the operator panel."""

    envelope: str | None = None
    config: MissionConfigModel | None = None
    world: list[WorldBeaconModel] = Field(default_factory=list)


class MissionSummary(BaseModel):
    mission_id: str
    phase: str
    reason: str | None = None
    n_drones: int
    searched_user_codes: list[str]


class CreateMissionResponse(BaseModel):
    mission_id: str
    phase: str


class StartMissionResponse(BaseModel):
    mission_id: str
    phase: str
    reason: str | None = None


class EventsResponse(BaseModel):
    mission_id: str
    phase: str
    revision: int
    events: list[dict]


class RouteModel(BaseModel):
    drone_id: int
    waypoints: list[GeoPointModel]
    total_length_m: float
    altitude_m: float


class MissionDetailResponse(BaseModel):
    mission_id: str
    phase: str
    reason: str | None
    config: MissionConfigModel
    routes: list[RouteModel]
    revision: int
