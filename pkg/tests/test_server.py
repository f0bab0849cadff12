from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from sarswarm.geodesy import GeoPoint, destination_point, rectangle_polygon
from sarswarm.secure_transport import KeyRing, seal
from sarswarm.service.app import create_app
from sarswarm.service.config import ServiceConfig
from sarswarm.store import MissionStore
from sarswarm.weather import StubWeatherProvider, WeatherReport

TOKEN = "operator-secret"
AUTH = {"Authorization": f"Bearer {TOKEN}"}

ENC_HEX = bytes(range(32)).hex()
MAC_HEX = bytes(range(32, 64)).hex()


def make_config(**overrides) -> ServiceConfig:
    defaults = dict(
        enc_key_hex=ENC_HEX,
        mac_key_hex=MAC_HEX,
        key_id=7,
        operator_token=TOKEN,
        realtime_factor=0.0,
        stub_wind_mps=2.0,
        stub_precipitation=0.0,
    )
    defaults.update(overrides)
    return ServiceConfig(**defaults)


@pytest.fixture
def client(tmp_path):
    config = make_config(store_path=str(tmp_path / "store.json"))
    app = create_app(config)
    return TestClient(app)


def register(client, name="Ana") -> dict:
    resp = client.post(
        "/users",
        json={"name": name, "surname": "García", "address": "Calle Mayor 1", "blood_type": "AB+"},
        headers=AUTH,
    )
    assert resp.status_code == 201, resp.text
    return resp.json()


def mission_config_payload(user_code: str, **overrides) -> dict:
    sw = GeoPoint(28.0, -16.0)
    ne_lon = destination_point(sw, 90.0, 200.0)
    n_lat = destination_point(sw, 0.0, 200.0)
    payload = {
        "searched_user_codes": [user_code],
        "polygon": {
            "vertices": [
                {"lat": sw.lat, "lon": sw.lon},
                {"lat": sw.lat, "lon": ne_lon.lon},
                {"lat": n_lat.lat, "lon": ne_lon.lon},
                {"lat": n_lat.lat, "lon": sw.lon},
            ]
        },
        "n_drones": 1,
        "altitude_m": 10.0,
        "base": {"lat": sw.lat, "lon": sw.lon},
        "spacing_m": 50.0,
        "speed_mps": 5.0,
        "seed": 5,
    }
    payload.update(overrides)
    return payload


class TestAuth:
    def test_missing_token_rejected(self, client):
        assert client.post("/users", json={}).status_code == 401
        assert client.get("/missions").status_code == 401

    def test_wrong_token_rejected(self, client):
        resp = client.get("/missions", headers={"Authorization": "Bearer wrong"})
        assert resp.status_code == 401

    def test_health_is_public(self, client):
        assert client.get("/health").status_code == 200


class TestUsers:
    def test_register_and_get(self, client):
        created = register(client)
        resp = client.get(f"/users/{created['user_code']}", headers=AUTH)
        assert resp.status_code == 200
        body = resp.json()
        assert body["name"] == "Ana"
        assert body["in_search"] is False

    def test_missing_field_422(self, client):
        resp = client.post(
            "/users",
            json={"name": " ", "surname": "G", "address": "x", "blood_type": "0+"},
            headers=AUTH,
        )
        assert resp.status_code == 422

    def test_duplicate_409(self, client):
        register(client)
        resp = client.post(
            "/users",
            json={"name": "Ana", "surname": "García", "address": "Calle Mayor 1", "blood_type": "AB+"},
            headers=AUTH,
        )
        assert resp.status_code == 409


class TestPassiveLookup:
    def test_truth_table(self, client):
        created = register(client)
        path = created["short_url_path"]

        # registered, not in search -> 404
        assert client.get(f"/b/{path}").status_code == 404
        # unknown path -> 404
        assert client.get("/b/doesnotexist").status_code == 404

        # flip in_search via mission creation
        payload = mission_config_payload(created["user_code"])
        resp = client.post("/missions", json={"config": payload}, headers=AUTH)
        assert resp.status_code == 201

        # registered and in search -> 200 with the passive-method steps
        page = client.get(f"/b/{path}")
        assert page.status_code == 200
        assert "112" in page.text
        assert created["user_code"] in page.text
        assert "position" in page.text.lower()

        # operator closes the search -> 404 again
        resp = client.post(f"/users/{created['user_code']}/close-search", headers=AUTH)
        assert resp.status_code == 200
        assert client.get(f"/b/{path}").status_code == 404


class TestMissionLifecycle:
    def test_create_with_plain_config(self, client):
        created = register(client)
        resp = client.post(
            "/missions", json={"config": mission_config_payload(created["user_code"])}, headers=AUTH
        )
        assert resp.status_code == 201
        assert resp.json()["phase"] == "Created"

    def test_create_with_sealed_envelope(self, client):
        created = register(client)
        keys = KeyRing.from_hex(ENC_HEX, MAC_HEX, key_id=7)
        env = seal(mission_config_payload(created["user_code"]), keys)
        resp = client.post("/missions", json={"envelope": env.to_base64()}, headers=AUTH)
        assert resp.status_code == 201

    def test_tampered_envelope_400_nothing_persisted(self, client):
        created = register(client)
        keys = KeyRing.from_hex(ENC_HEX, MAC_HEX, key_id=7)
        env = seal(mission_config_payload(created["user_code"]), keys)
        text = env.to_base64()
        raw = bytearray(__import__("base64").b64decode(text))
        raw[-1] ^= 0x01
        tampered = __import__("base64").b64encode(bytes(raw)).decode()
        resp = client.post("/missions", json={"envelope": tampered}, headers=AUTH)
        assert resp.status_code == 400
        assert client.get("/missions", headers=AUTH).json() == []

    def test_unknown_user_code_400(self, client):
        resp = client.post(
            "/missions", json={"config": mission_config_payload("nope")}, headers=AUTH
        )
        assert resp.status_code == 400

    def test_neither_envelope_nor_config_400(self, client):
        assert client.post("/missions", json={}, headers=AUTH).status_code == 400

    def _create_and_start(self, client, world=None, **overrides):
        created = register(client)
        payload = mission_config_payload(created["user_code"], **overrides)
        body = {"config": payload}
        if world is not None:
            body["world"] = world
        resp = client.post("/missions", json=body, headers=AUTH)
        assert resp.status_code == 201, resp.text
        mission_id = resp.json()["mission_id"]
        start = client.post(f"/missions/{mission_id}/start", headers=AUTH)
        assert start.status_code == 200, start.text
        return created, mission_id, start.json()

    def test_full_flight_and_results(self, client):
        world_beacon = None
        created = register(client)
        payload = mission_config_payload(created["user_code"])
        resp = client.post("/missions", json={"config": payload}, headers=AUTH)
        mission_id = resp.json()["mission_id"]

        # place the beacon on the base corner so the route flies over it
        world = [{"user_code": created["user_code"], "position": {"lat": 28.0, "lon": -16.0}}]
        resp = client.post("/missions", json={"config": payload, "world": world}, headers=AUTH)
        assert resp.status_code == 201
        mission_id = resp.json()["mission_id"]

        start = client.post(f"/missions/{mission_id}/start", headers=AUTH)
        assert start.status_code == 200
        assert start.json()["phase"] == "Completed"

        results = client.get(f"/missions/{mission_id}/results", headers=AUTH)
        assert results.status_code == 200
        body = results.json()
        assert body["users"][0]["found"] is True
        assert body["users"][0]["photo_uris"]

    def test_start_twice_409(self, client):
        _, mission_id, _ = self._create_and_start(client)
        resp = client.post(f"/missions/{mission_id}/start", headers=AUTH)
        assert resp.status_code == 409

    def test_unknown_mission_404(self, client):
        assert client.get("/missions/nope/events", headers=AUTH).status_code == 404
        assert client.get("/missions/nope/results", headers=AUTH).status_code == 404
        assert client.get("/missions/nope/kml", headers=AUTH).status_code == 404
        assert client.post("/missions/nope/start", headers=AUTH).status_code == 404

    def test_cancelled_weather(self, tmp_path):
        config = make_config(store_path=str(tmp_path / "s.json"))
        app = create_app(
            config,
            weather_provider=StubWeatherProvider(
                report=WeatherReport(wind_mps=15.0, precipitation_probability=0.0)
            ),
        )
        client = TestClient(app)
        created = register(client)
        resp = client.post(
            "/missions", json={"config": mission_config_payload(created["user_code"])}, headers=AUTH
        )
        mission_id = resp.json()["mission_id"]
        start = client.post(f"/missions/{mission_id}/start", headers=AUTH)
        assert start.json()["phase"] == "CancelledWeather"
        assert start.json()["reason"] == "wind"
        results = client.get(f"/missions/{mission_id}/results", headers=AUTH)
        assert results.status_code == 200
        assert results.json()["users"] == []

    def test_results_409_while_created(self, client):
        created = register(client)
        resp = client.post(
            "/missions", json={"config": mission_config_payload(created["user_code"])}, headers=AUTH
        )
        mission_id = resp.json()["mission_id"]
        assert client.get(f"/missions/{mission_id}/results", headers=AUTH).status_code == 409


class TestEventPolling:
    def test_poll_cursor_completeness(self, client):
        created = register(client)
        payload = mission_config_payload(created["user_code"])
        world = [{"user_code": created["user_code"], "position": {"lat": 28.0, "lon": -16.0}}]
        resp = client.post("/missions", json={"config": payload, "world": world}, headers=AUTH)
        mission_id = resp.json()["mission_id"]
        client.post(f"/missions/{mission_id}/start", headers=AUTH)

        full = client.get(f"/missions/{mission_id}/events?since=0", headers=AUTH).json()
        assert full["phase"] == "Completed"
        assert full["events"], "expected a populated event feed"

        # chunked cursor walk must reproduce the full feed exactly once
        seen = []
        cursor = 0
        while True:
            page = client.get(
                f"/missions/{mission_id}/events?since={cursor}", headers=AUTH
            ).json()
            if not page["events"]:
                break
            seen.extend(page["events"])
            cursor = max(e["revision"] for e in page["events"])
        assert seen == full["events"]
        revisions = [e["revision"] for e in seen]
        assert revisions == sorted(revisions)
        assert len(set(revisions)) == len(revisions)

    def test_poll_at_current_revision_empty(self, client):
        created = register(client)
        resp = client.post(
            "/missions", json={"config": mission_config_payload(created["user_code"])}, headers=AUTH
        )
        mission_id = resp.json()["mission_id"]
        head = client.get(f"/missions/{mission_id}/events?since=0", headers=AUTH).json()
        again = client.get(
            f"/missions/{mission_id}/events?since={head['revision']}", headers=AUTH
        ).json()
        assert again["events"] == []

    def test_event_order_timestamp_then_drone(self, client):
        created = register(client)
        payload = mission_config_payload(created["user_code"], n_drones=2, seed=11)
        resp = client.post("/missions", json={"config": payload}, headers=AUTH)
        mission_id = resp.json()["mission_id"]
        client.post(f"/missions/{mission_id}/start", headers=AUTH)
        feed = client.get(f"/missions/{mission_id}/events?since=0", headers=AUTH).json()
        telem = [e for e in feed["events"] if e["type"] == "telemetry"]
        keys_seen = [(e["t_s"], e["drone_id"]) for e in telem]
        assert keys_seen == sorted(keys_seen)


class TestKmlEndpoint:
    def test_kml_after_planning(self, client):
        created = register(client)
        resp = client.post(
            "/missions", json={"config": mission_config_payload(created["user_code"])}, headers=AUTH
        )
        mission_id = resp.json()["mission_id"]
        # before planning -> 409
        assert client.get(f"/missions/{mission_id}/kml", headers=AUTH).status_code == 409
        client.post(f"/missions/{mission_id}/start", headers=AUTH)
        resp = client.get(f"/missions/{mission_id}/kml", headers=AUTH)
        assert resp.status_code == 200
        assert resp.headers["content-type"].startswith("application/vnd.google-earth.kml+xml")
        from kml_check import validate_kml

        validate_kml(resp.text)


class TestPersistenceAcrossRestart:
    def test_state_survives_reload(self, tmp_path):
        store_path = str(tmp_path / "store.json")
        config = make_config(store_path=store_path)
        client = TestClient(create_app(config))
        created = register(client)
        payload = mission_config_payload(created["user_code"])
        resp = client.post("/missions", json={"config": payload}, headers=AUTH)
        mission_id = resp.json()["mission_id"]
        client.post(f"/missions/{mission_id}/start", headers=AUTH)
        feed = client.get(f"/missions/{mission_id}/events?since=0", headers=AUTH).json()

        keys = KeyRing.from_hex(ENC_HEX, MAC_HEX, key_id=7)
        reloaded = MissionStore.load(store_path, keys)
        client2 = TestClient(create_app(config, store=reloaded))
        feed2 = client2.get(f"/missions/{mission_id}/events?since=0", headers=AUTH).json()
        assert feed2["events"] == feed["events"]
        profile = client2.get(f"/users/{created['user_code']}", headers=AUTH).json()
        assert profile["name"] == "Ana"
