"""Service configuration: keys, operator token, weather source, store path.

Values load from an optional JSON file and can be overridden through
``SARSWARM_*`` environment variables, so keys never need to live in the
repository.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from ..secure_transport import KeyRing
from ..weather import HttpWeatherProvider, StubWeatherProvider, WeatherProvider, WeatherReport

ENV_PREFIX = "SARSWARM_"


@dataclass
class ServiceConfig:
    enc_key_hex: str
    mac_key_hex: str
    key_id: int = 1
    operator_token: str = ""
    store_path: str | None = None
    public_base_url: str = "http://sar.gl"
    weather_url: str | None = None
    weather_wind_path: str = "wind_mps"
    weather_precip_path: str = "precipitation_probability"
    weather_precip_is_percent: bool = False
    stub_wind_mps: float = 3.0
    stub_precipitation: float = 0.1
    wind_threshold_mps: float = 10.0
    precipitation_threshold: float = 0.5
    realtime_factor: float = 0.0
    detection_table_path: str | None = None
    panel_dir: str | None = None
    host: str = "127.0.0.1"
    port: int = 8000

    def keyring(self) -> KeyRing:
        return KeyRing.from_hex(self.enc_key_hex, self.mac_key_hex, key_id=self.key_id)

    def weather_provider(self) -> WeatherProvider:
        if self.weather_url:
            return HttpWeatherProvider(
                url_template=self.weather_url,
                wind_path=self.weather_wind_path,
                precipitation_path=self.weather_precip_path,
                precipitation_is_percent=self.weather_precip_is_percent,
            )
        return StubWeatherProvider(
            report=WeatherReport(
                wind_mps=self.stub_wind_mps,
                precipitation_probability=self.stub_precipitation,
            )
        )


_FIELD_TYPES = {
    "key_id": int,
    "port": int,
    "stub_wind_mps": float,
    "stub_precipitation": float,
    "wind_threshold_mps": float,
    "precipitation_threshold": float,
    "realtime_factor": float,
    "weather_precip_is_percent": lambda v: str(v).lower() in ("1", "true", "yes"),
}


def load_config(path: str | None = None, env: dict | None = None) -> ServiceConfig:
    """Build config from a JSON file plus SARSWARM_* environment overrides."""
    env = env if env is not None else dict(os.environ)
    values: dict = {}
    if path:
        with open(path) as fh:
            values.update(json.load(fh))
    for name in ServiceConfig.__dataclass_fields__:
        env_key = ENV_PREFIX + name.upper()
        if env_key in env:
            caster = _FIELD_TYPES.get(name, str)
            values[name] = caster(env[env_key])
    if "enc_key_hex" not in values or "mac_key_hex" not in values:
        raise ValueError(
            "enc_key_hex and mac_key_hex are required (config file or "
            f"{ENV_PREFIX}ENC_KEY_HEX / {ENV_PREFIX}MAC_KEY_HEX)"
        )
    return ServiceConfig(**values)
