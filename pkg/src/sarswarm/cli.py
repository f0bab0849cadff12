"""Command line driver: planning, seeded simulation, benchmarks, service.

`plan`, `simulate` and `bench` run the core in-process and are fully
deterministic under --seed. `serve` launches the HTTP service, and the
`client` group drives a running server over HTTP. Exit codes: 0 success,
2 validation problem, 3 internal error.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import click
import httpx

from . import bench as bench_mod
from .detection import DetectionModel
from .geodesy import (
    GeodesyError,
    GeoPoint,
    SearchPolygon,
    haversine_distance,
)
from .beacon import BeaconError, SimulatedBeacon
from .mission import (
    MissionConfig,
    Phase,
    UnknownUserError,
    mission_result,
    run_mission,
    start_mission,
)
from .partition import InvalidKError
from .routing import RoutingError, export_kml, plan_mission_routes
from .weather import StubWeatherProvider, WeatherReport

EXIT_VALIDATION = 2
EXIT_INTERNAL = 3

_VALIDATION_ERRORS = (
    GeodesyError,
    RoutingError,
    InvalidKError,
    BeaconError,
    UnknownUserError,
    ValueError,
    KeyError,
    OSError,
)


def _fail_validation(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_VALIDATION)


def load_polygon_file(path: str) -> SearchPolygon:
    """Read a polygon from GeoJSON-style or {"vertices": [...]} JSON."""
    with open(path) as fh:
        data = json.load(fh)
    if "coordinates" in data:
        rings = data["coordinates"]
        if not rings or not rings[0]:
            raise GeodesyError("polygon has no coordinates")
        ring = rings[0]
        # GeoJSON rings repeat the first vertex at the end
        if len(ring) > 1 and ring[0] == ring[-1]:
            ring = ring[:-1]
        return SearchPolygon([GeoPoint(lat=c[1], lon=c[0]) for c in ring])
    if "vertices" in data:
        return SearchPolygon([GeoPoint.from_dict(v) for v in data["vertices"]])
    raise GeodesyError("polygon file needs 'coordinates' (GeoJSON) or 'vertices'")


def parse_base(text: str) -> GeoPoint:
    try:
        lat_s, lon_s = text.split(",")
        return GeoPoint(lat=float(lat_s), lon=float(lon_s))
    except (ValueError, GeodesyError) as exc:
        raise GeodesyError(f"base must be 'lat,lon': {exc}") from exc


@click.group()
def main() -> None:
    """Mission planning and simulation for beacon-based search and rescue."""


@main.command("plan")
@click.option("--polygon", "polygon_path", required=True, type=click.Path(exists=False))
@click.option("--spacing", default=50.0, show_default=True, help="Grid spacing in meters.")
@click.option("--drones", default=1, show_default=True, help="Number of drones.")
@click.option("--base", "base_text", required=True, help="Base point as 'lat,lon'.")
@click.option("--altitude", default=20.0, show_default=True, help="Flight altitude in meters.")
@click.option("--speed", default=5.0, show_default=True, help="Cruise speed for time estimates.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", default=".", show_default=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True, help="Print stats as JSON.")
def cmd_plan(polygon_path, spacing, drones, base_text, altitude, speed, seed, out_dir, as_json):
    """Plan per-drone coverage routes and write mission.kml plus stats."""
    try:
        poly = load_polygon_file(polygon_path)
        base = parse_base(base_text)
        routes = plan_mission_routes(
            poly, spacing, drones, base, seed=seed, altitude_m=altitude
        )
    except _VALIDATION_ERRORS as exc:
        _fail_validation(str(exc))
        return
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    kml_path = out / "mission.kml"
    kml_path.write_text(export_kml(routes), encoding="utf-8")

    grid_points = sum(len(r.waypoints) for r in routes)
    stats = {
        "n_routes": len(routes),
        "spacing_m": spacing,
        "speed_mps": speed,
        "seed": seed,
        "routes": [
            {
                "drone_id": r.drone_id,
                "waypoints": len(r.waypoints),
                "length_m": r.total_length_m,
                "estimated_minutes": r.total_length_m / (speed * 60.0),
            }
            for r in routes
        ],
        "total_length_m": sum(r.total_length_m for r in routes),
        "kml": str(kml_path),
    }
    stats_path = out / "plan_stats.json"
    stats_path.write_text(json.dumps(stats, indent=2) + "\n", encoding="utf-8")
    if as_json:
        click.echo(json.dumps(stats))
    else:
        click.echo(f"planned {len(routes)} route(s) over {grid_points} waypoints")
        for r in routes:
            click.echo(
                f"  drone {r.drone_id}: {len(r.waypoints)} waypoints, "
                f"{r.total_length_m:.0f} m"
            )
        click.echo(f"wrote {kml_path} and {stats_path}")


def load_scenario_file(path: str) -> tuple[MissionConfig, list[SimulatedBeacon], set[str], WeatherReport | None]:
    with open(path) as fh:
        data = json.load(fh)
    config = MissionConfig.from_dict(data["config"])
    beacons = [SimulatedBeacon.from_dict(b) for b in data.get("beacons", [])]
    registered = set(data.get("registered_user_codes", [])) | set(config.searched_user_codes)
    weather = None
    if "weather" in data:
        weather = WeatherReport(
            wind_mps=data["weather"].get("wind_mps", 0.0),
            precipitation_probability=data["weather"].get("precipitation_probability", 0.0),
        )
    return config, beacons, registered, weather


@main.command("simulate")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=False))
@click.option("--seed", default=None, type=int, help="Override the scenario seed.")
@click.option("--out-dir", default=".", show_default=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True, help="Print the result as JSON.")
def cmd_simulate(scenario_path, seed, out_dir, as_json):
    """Run one scripted mission and write the event log and result."""
    try:
        config, beacons, registered, weather = load_scenario_file(scenario_path)
        if seed is not None:
            config = MissionConfig.from_dict({**config.to_dict(), "seed": seed})
        provider = StubWeatherProvider(
            report=weather or WeatherReport(wind_mps=0.0, precipitation_probability=0.0)
        )
        record = start_mission(config, registered, provider, mission_id="scenario")
        if record.phase is Phase.FLYING:
            run_mission(record, beacons, rng=random.Random(config.seed))
        result = mission_result(record)
    except _VALIDATION_ERRORS as exc:
        _fail_validation(str(exc))
        return
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)

    truth = {b.user_code: b.position for b in beacons}
    summary = result.to_dict()
    for user in summary["users"]:
        pos = user["first_detection_position"]
        if pos is not None and user["user_code"] in truth:
            user["gps_error_m"] = haversine_distance(
                GeoPoint.from_dict(pos), truth[user["user_code"]]
            )

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    events_path = out / "events.json"
    events_path.write_text(
        json.dumps([e.to_dict() for e in record.log], indent=2) + "\n", encoding="utf-8"
    )
    result_path = out / "result.json"
    result_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")

    if as_json:
        click.echo(json.dumps(summary))
    else:
        click.echo(f"mission {record.id}: {record.phase.value}")
        for user in summary["users"]:
            mark = "found" if user["found"] else "not found"
            click.echo(f"  user {user['user_code']}: {mark}")
        click.echo(f"wrote {events_path} and {result_path}")


@main.command("bench")
@click.option("--trials", default=10_000, show_default=True)
@click.option("--seed", default=20_240_501, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def cmd_bench(trials, seed, as_json):
    """Reproduce the published detection-rate and sweep-time tables."""
    detection_rows = bench_mod.detection_rate_table(trials=trials, seed=seed)
    team_rows = bench_mod.team_time_table()
    drone_rows = bench_mod.drone_time_table()
    if as_json:
        click.echo(json.dumps(bench_mod.report_dict(detection_rows, team_rows, drone_rows)))
    else:
        click.echo(bench_mod.render_report(detection_rows, team_rows, drone_rows))


@main.command("serve")
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
def cmd_serve(config_path, host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app
    from .service.config import load_config

    try:
        config = load_config(config_path)
    except (OSError, ValueError) as exc:
        _fail_validation(str(exc))
        return
    app = create_app(config)
    uvicorn.run(app, host=host or config.host, port=port or config.port)


@main.group("client")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--token", default="", help="Operator bearer token.")
@click.pass_context
def client(ctx, server, token):
    """Drive a running sarswarm server over HTTP."""
    ctx.obj = {
        "base": server.rstrip("/"),
        "headers": {"Authorization": f"Bearer {token}"} if token else {},
    }


def _client_call(ctx, method: str, path: str, **kwargs):
    try:
        resp = httpx.request(
            method, ctx.obj["base"] + path, headers=ctx.obj["headers"], timeout=30.0, **kwargs
        )
    except httpx.HTTPError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)
    if resp.status_code >= 400:
        click.echo(f"error: HTTP {resp.status_code}: {resp.text}", err=True)
        sys.exit(EXIT_VALIDATION)
    return resp


@client.command("register")
@click.option("--name", required=True)
@click.option("--surname", required=True)
@click.option("--address", required=True)
@click.option("--blood-type", required=True)
@click.pass_context
def client_register(ctx, name, surname, address, blood_type):
    resp = _client_call(
        ctx,
        "POST",
        "/users",
        json={"name": name, "surname": surname, "address": address, "blood_type": blood_type},
    )
    click.echo(resp.text)


@client.command("create-mission")
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=False))
@click.pass_context
def client_create_mission(ctx, scenario_path):
    """POST a scenario file's config (and world) to /missions."""
    try:
        with open(scenario_path) as fh:
            data = json.load(fh)
        config = data["config"]
        world = data.get("beacons", [])
    except (OSError, ValueError, KeyError) as exc:
        _fail_validation(str(exc))
        return
    resp = _client_call(ctx, "POST", "/missions", json={"config": config, "world": world})
    click.echo(resp.text)


@client.command("start")
@click.argument("mission_id")
@click.pass_context
def client_start(ctx, mission_id):
    click.echo(_client_call(ctx, "POST", f"/missions/{mission_id}/start").text)


@client.command("poll")
@click.argument("mission_id")
@click.option("--since", default=0, show_default=True)
@click.pass_context
def client_poll(ctx, mission_id, since):
    click.echo(_client_call(ctx, "GET", f"/missions/{mission_id}/events?since={since}").text)


@client.command("results")
@click.argument("mission_id")
@click.pass_context
def client_results(ctx, mission_id):
    click.echo(_client_call(ctx, "GET", f"/missions/{mission_id}/results").text)


@client.command("kml")
@click.argument("mission_id")
@click.option("--out", default="mission.kml", show_default=True, type=click.Path())
@click.pass_context
def client_kml(ctx, mission_id, out):
    resp = _client_call(ctx, "GET", f"/missions/{mission_id}/kml")
    Path(out).write_text(resp.text, encoding="utf-8")
    click.echo(f"wrote {out}")


@client.command("close-search")
@click.argument("user_code")
@click.pass_context
def client_close_search(ctx, user_code):
    click.echo(_client_call(ctx, "POST", f"/users/{user_code}/close-search").text)


if __name__ == "__main__":
    main()
