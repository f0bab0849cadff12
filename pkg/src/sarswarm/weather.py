"""Weather gate inputs: an abstract forecast provider plus adapters.

The mission module only needs wind speed and precipitation probability for
the search-area centroid. Production deployments point the HTTP adapter at
any JSON forecast endpoint; tests use the stub.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import httpx


class WeatherUnavailableError(RuntimeError):
    """Forecast provider could not be reached or returned garbage."""


@dataclass(frozen=True)
class WeatherReport:
    wind_mps: float
    precipitation_probability: float  # 0..1


class WeatherProvider(Protocol):
    def forecast(self, lat: float, lon: float) -> WeatherReport: ...


@dataclass
class StubWeatherProvider:
    """Fixed report (or failure) for tests and offline planning."""

    report: WeatherReport | None = WeatherReport(wind_mps=3.0, precipitation_probability=0.1)

    def forecast(self, lat: float, lon: float) -> WeatherReport:
        if self.report is None:
            raise WeatherUnavailableError("stub configured to fail")
        return self.report


def _dig(payload, dotted_path: str):
    value = payload
    for part in dotted_path.split("."):
        if isinstance(value, list):
            value = value[int(part)]
        else:
            value = value[part]
    return value


@dataclass
class HttpWeatherProvider:
    """Query a JSON-over-HTTPS forecast endpoint.

    ``url_template`` receives ``{lat}`` and ``{lon}``; the two dotted paths
    pick the wind speed (m/s) and precipitation probability out of the JSON
    response. Set ``precipitation_is_percent`` when the endpoint reports
    percentages.
    """

    url_template: str
    wind_path: str = "wind_mps"
    precipitation_path: str = "precipitation_probability"
    precipitation_is_percent: bool = False
    timeout_s: float = 10.0

    def forecast(self, lat: float, lon: float) -> WeatherReport:
        url = self.url_template.format(lat=lat, lon=lon)
        try:
            resp = httpx.get(url, timeout=self.timeout_s)
            resp.raise_for_status()
            payload = resp.json()
            wind = float(_dig(payload, self.wind_path))
            precip = float(_dig(payload, self.precipitation_path))
        except Exception as exc:
            raise WeatherUnavailableError(f"forecast query failed: {exc}") from exc
        if self.precipitation_is_percent:
            precip /= 100.0
        return WeatherReport(wind_mps=wind, precipitation_probability=precip)
