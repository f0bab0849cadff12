"""HTTP service: user registry, passive lookup, mission lifecycle, KML.

Paths:
    POST /users                      register a user (operator)
    GET  /users/{code}               decrypted profile (operator)
    POST /users/{code}/close-search  clear the in-search flag (operator)
    GET  /b/{short_url_path}         passive-method profile page (public)
    POST /missions                   create from sealed envelope or config
    POST /missions/{id}/start        weather gate + planning + flight
    GET  /missions/{id}/events       cursor-polled event feed
    GET  /missions/{id}/results      result summary after completion
    GET  /missions/{id}/kml          planned routes as KML 2.2
"""

from __future__ import annotations

import random
import threading
import time
import uuid

from fastapi import Depends, FastAPI, Header, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware

from ..detection import DetectionModel, load_model
from ..mission import (
    MissionRecord,
    MissionStillRunningError,
    Phase,
    PhaseEvent,
    UnknownUserError,
    mission_result,
    start_mission,
    tick,
)
from ..routing import export_kml
from ..secure_transport import SealedEnvelope, TransportError, open_envelope
from ..store import (
    DuplicateUserError,
    MissingFieldError,
    MissionStore,
    UnknownMissionError,
)
from ..store import UnknownUserError as StoreUnknownUserError
from ..beacon import BeaconError, SimulatedBeacon
from .config import ServiceConfig
from .schemas import (
    CreateMissionRequest,
    CreateMissionResponse,
    EventsResponse,
    GeoPointModel,
    MissionConfigModel,
    MissionDetailResponse,
    MissionSummary,
    ProfileResponse,
    RegisterUserRequest,
    RegisterUserResponse,
    RouteModel,
    StartMissionResponse,
)

PASSIVE_PAGE = """<!DOCTYPE html>
<html>
<head><title>Emergency: person in search</title></head>
<body>
<h1>This person is being searched for</h1>
<ol>
  <li><strong>Call 112</strong> &mdash; contact the emergency services now.</li>
  <li><strong>Communicate position</strong> &mdash; report where you received this alert.</li>
  <li><strong>Code</strong> &mdash; give the operator this identifier: <code>{user_code}</code></li>
</ol>
</body>
</html>
"""


def create_app(
    config: ServiceConfig,
    store: MissionStore | None = None,
    weather_provider=None,
) -> FastAPI:
    keys = config.keyring()
    store = store if store is not None else MissionStore(keys, path=config.store_path)
    weather = weather_provider if weather_provider is not None else config.weather_provider()
    model = (
        load_model(config.detection_table_path)
        if config.detection_table_path
        else DetectionModel()
    )
    worlds: dict[str, list[SimulatedBeacon]] = {}

    app = FastAPI(title="sarswarm", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    def require_operator(authorization: str = Header(default="")) -> None:
        if not config.operator_token:
            return
        if authorization != f"Bearer {config.operator_token}":
            raise HTTPException(status_code=401, detail="operator token required")

    def _persist() -> None:
        if store.path:
            store.persist()

    if config.panel_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/panel", StaticFiles(directory=config.panel_dir, html=True), name="panel")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "revision": store.revision}

    # -- users ------------------------------------------------------------

    @app.post("/users", response_model=RegisterUserResponse, status_code=201,
              dependencies=[Depends(require_operator)])
    def register_user(req: RegisterUserRequest) -> RegisterUserResponse:
        try:
            profile = store.register_user(req.name, req.surname, req.address, req.blood_type)
        except MissingFieldError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except DuplicateUserError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        _persist()
        return RegisterUserResponse(
            user_code=profile.user_code, short_url_path=profile.short_url_path
        )

    @app.get("/users/{user_code}", response_model=ProfileResponse,
             dependencies=[Depends(require_operator)])
    def get_user(user_code: str) -> ProfileResponse:
        try:
            data = store.get_profile(user_code)
        except StoreUnknownUserError:
            raise HTTPException(status_code=404, detail="unknown user")
        return ProfileResponse(**data)

    @app.post("/users/{user_code}/close-search", dependencies=[Depends(require_operator)])
    def close_search(user_code: str) -> dict:
        try:
            store.set_in_search([user_code], False)
        except StoreUnknownUserError:
            raise HTTPException(status_code=404, detail="unknown user")
        _persist()
        return {"user_code": user_code, "in_search": False}

    # -- passive method ----------------------------------------------------

    @app.get("/b/{short_url_path}")
    def passive_lookup(short_url_path: str) -> Response:
        data = store.passive_profile(short_url_path)
        if data is None:
            raise HTTPException(status_code=404, detail="not found")
        return Response(
            content=PASSIVE_PAGE.format(user_code=data["user_code"]),
            media_type="text/html",
        )

    # -- missions ----------------------------------------------------------

    @app.post("/missions", response_model=CreateMissionResponse, status_code=201,
              dependencies=[Depends(require_operator)])
    def create_mission(req: CreateMissionRequest) -> CreateMissionResponse:
        if req.envelope is not None:
            try:
                payload = open_envelope(SealedEnvelope.from_base64(req.envelope), keys)
            except TransportError as exc:
                raise HTTPException(status_code=400, detail=f"envelope rejected: {exc}")
            try:
                cfg_model = MissionConfigModel.model_validate(payload)
            except Exception as exc:
                raise HTTPException(status_code=400, detail=f"invalid mission config: {exc}")
        elif req.config is not None:
            cfg_model = req.config
        else:
            raise HTTPException(status_code=400, detail="provide envelope or config")

        try:
            cfg = cfg_model.to_core()
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

        unknown = [c for c in cfg.searched_user_codes if c not in store.registered_codes()]
        if unknown:
            raise HTTPException(status_code=400, detail=f"unknown user codes: {unknown}")

        world: list[SimulatedBeacon] = []
        try:
            for wb in req.world:
                url = wb.url
                if url is None:
                    if wb.user_code in store.registered_codes():
                        url = store.user_url(wb.user_code, config.public_base_url)
                    else:
                        url = f"{config.public_base_url}/b/unreg"
                world.append(
                    SimulatedBeacon(
                        user_code=wb.user_code,
                        position=wb.position.to_core(),
                        url=url,
                        advertising_interval_ms=wb.advertising_interval_ms,
                        tx_power_dbm=wb.tx_power_dbm,
                        battery_ok=wb.battery_ok,
                    )
                )
        except BeaconError as exc:
            raise HTTPException(status_code=400, detail=f"invalid world beacon: {exc}")

        record = MissionRecord(id=uuid.uuid4().hex, config=cfg)
        store.add_mission(record)
        worlds[record.id] = world
        store.set_in_search(cfg.searched_user_codes, True)
        store.append_events(record.id, [PhaseEvent(t_s=0.0, phase=Phase.CREATED.value)])
        _persist()
        return CreateMissionResponse(mission_id=record.id, phase=record.phase.value)

    def _run_flight(record, world) -> None:
        rng = random.Random(record.config.seed)
        if config.realtime_factor <= 0.0:
            while record.phase is Phase.FLYING:
                with store.lock:
                    events = tick(record, world, record.config.tick_s, rng, model=model)
                    store.append_events(record.id, events)
            _persist()
            return

        def pacer() -> None:
            period = record.config.tick_s / config.realtime_factor
            while record.phase is Phase.FLYING:
                with store.lock:
                    events = tick(record, world, record.config.tick_s, rng, model=model)
                    store.append_events(record.id, events)
                time.sleep(period)
            _persist()

        threading.Thread(target=pacer, name=f"mission-{record.id}", daemon=True).start()

    @app.post("/missions/{mission_id}/start", response_model=StartMissionResponse,
              dependencies=[Depends(require_operator)])
    def start(mission_id: str) -> StartMissionResponse:
        try:
            record = store.get_mission(mission_id)
        except UnknownMissionError:
            raise HTTPException(status_code=404, detail="unknown mission")
        if record.phase is not Phase.CREATED:
            raise HTTPException(
                status_code=409, detail=f"mission already {record.phase.value}"
            )
        try:
            with store.lock:
                started = start_mission(
                    record.config,
                    store.registered_codes(),
                    weather,
                    mission_id=record.id,
                    wind_threshold_mps=config.wind_threshold_mps,
                    precipitation_threshold=config.precipitation_threshold,
                )
                # carry the planned state onto the stored record
                record.phase = started.phase
                record.routes = started.routes
                record.drones = started.drones
                record.cancel_reason = started.cancel_reason
                record.log.extend(started.log)
                store.append_events(record.id, started.log)
        except UnknownUserError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

        if record.phase is Phase.FLYING:
            _run_flight(record, worlds.get(record.id, []))
        else:
            _persist()
        return StartMissionResponse(
            mission_id=record.id, phase=record.phase.value, reason=record.cancel_reason
        )

    @app.get("/missions", response_model=list[MissionSummary],
             dependencies=[Depends(require_operator)])
    def list_missions() -> list[MissionSummary]:
        return [
            MissionSummary(
                mission_id=r.id,
                phase=r.phase.value,
                reason=r.cancel_reason,
                n_drones=r.config.n_drones,
                searched_user_codes=list(r.config.searched_user_codes),
            )
            for r in store.list_missions()
        ]

    @app.get("/missions/{mission_id}", response_model=MissionDetailResponse,
             dependencies=[Depends(require_operator)])
    def mission_detail(mission_id: str) -> MissionDetailResponse:
        try:
            record = store.get_mission(mission_id)
        except UnknownMissionError:
            raise HTTPException(status_code=404, detail="unknown mission")
        with store.lock:
            cfg = record.config
            return MissionDetailResponse(
                mission_id=record.id,
                phase=record.phase.value,
                reason=record.cancel_reason,
                config=MissionConfigModel(
                    searched_user_codes=list(cfg.searched_user_codes),
                    polygon={"vertices": [GeoPointModel.from_core(v) for v in cfg.polygon.vertices]},
                    n_drones=cfg.n_drones,
                    altitude_m=cfg.altitude_m,
                    base=GeoPointModel.from_core(cfg.base),
                    spacing_m=cfg.spacing_m,
                    speed_mps=cfg.speed_mps,
                    weather_override=cfg.weather_override,
                    seed=cfg.seed,
                    endurance_s=cfg.endurance_s,
                    tick_s=cfg.tick_s,
                    return_to_base=cfg.return_to_base,
                ),
                routes=[
                    RouteModel(
                        drone_id=r.drone_id,
                        waypoints=[GeoPointModel.from_core(p) for p in r.waypoints],
                        total_length_m=r.total_length_m,
                        altitude_m=r.altitude_m,
                    )
                    for r in record.routes
                ],
                revision=store.revision,
            )

    @app.get("/missions/{mission_id}/events", response_model=EventsResponse,
             dependencies=[Depends(require_operator)])
    def poll_events(mission_id: str, since: int = 0) -> EventsResponse:
        try:
            stored, revision = store.events_since(mission_id, since)
        except UnknownMissionError:
            raise HTTPException(status_code=404, detail="unknown mission")
        record = store.get_mission(mission_id)
        return EventsResponse(
            mission_id=mission_id,
            phase=record.phase.value,
            revision=revision,
            events=[se.to_dict() for se in stored],
        )

    @app.get("/missions/{mission_id}/results", dependencies=[Depends(require_operator)])
    def results(mission_id: str) -> dict:
        try:
            record = store.get_mission(mission_id)
        except UnknownMissionError:
            raise HTTPException(status_code=404, detail="unknown mission")
        try:
            with store.lock:
                return mission_result(record).to_dict()
        except MissionStillRunningError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.get("/missions/{mission_id}/kml", dependencies=[Depends(require_operator)])
    def kml(mission_id: str) -> Response:
        try:
            record = store.get_mission(mission_id)
        except UnknownMissionError:
            raise HTTPException(status_code=404, detail="unknown mission")
        if not record.routes:
            raise HTTPException(status_code=409, detail="mission has no planned routes yet")
        with store.lock:
            doc = export_kml(record.routes, document_name=f"Mission {record.id}")
        return Response(content=doc, media_type="application/vnd.google-earth.kml+xml")

    return app
