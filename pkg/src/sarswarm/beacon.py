"""Eddystone-URL frame codec and simulated phone beacons.

The frame layout is the Physical Web one: a 0x10 type byte, calibrated TX
power, a scheme prefix byte, then the compressed URL body of at most 17
bytes. Scheme prefixes and domain-suffix expansion codes follow the public
compression tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geodesy import GeoPoint

FRAME_TYPE_URL = 0x10

SCHEME_PREFIXES: tuple[tuple[int, str], ...] = (
    (0x00, "http://www."),
    (0x01, "https://www."),
    (0x02, "http://"),
    (0x03, "https://"),
)

SUFFIX_EXPANSIONS: tuple[str, ...] = (
    ".com/",
    ".org/",
    ".edu/",
    ".net/",
    ".info/",
    ".biz/",
    ".gov/",
    ".com",
    ".org",
    ".edu",
    ".net",
    ".info",
    ".biz",
    ".gov",
)

MAX_BODY_BYTES = 17

MIN_ADVERTISING_INTERVAL_MS = 20
MAX_ADVERTISING_INTERVAL_MS = 10_240


class BeaconError(ValueError):
    """Base class for codec and beacon errors."""


class UrlTooLong(BeaconError):
    """Compressed URL body exceeds 17 bytes."""


class UnsupportedScheme(BeaconError):
    """URL scheme is not http or https."""


class MalformedFrame(BeaconError):
    """Frame bytes do not parse as an Eddystone-URL advertisement."""


@dataclass(frozen=True)
class BeaconFrame:
    """One Eddystone-URL advertisement payload."""

    tx_power_dbm: int
    scheme_code: int
    encoded_url: bytes
    frame_type: int = FRAME_TYPE_URL

    def __post_init__(self) -> None:
        if self.frame_type != FRAME_TYPE_URL:
            raise MalformedFrame(f"unsupported frame type 0x{self.frame_type:02x}")
        if not -100 <= self.tx_power_dbm <= 20:
            raise BeaconError(f"tx power {self.tx_power_dbm} dBm outside [-100, 20]")
        if not 0x00 <= self.scheme_code <= 0x03:
            raise MalformedFrame(f"unknown scheme code 0x{self.scheme_code:02x}")
        if len(self.encoded_url) > MAX_BODY_BYTES:
            raise UrlTooLong(f"encoded URL is {len(self.encoded_url)} bytes, max {MAX_BODY_BYTES}")

    def to_bytes(self) -> bytes:
        tx = self.tx_power_dbm & 0xFF
        return bytes([self.frame_type, tx, self.scheme_code]) + self.encoded_url


def encode_url(url: str, tx_power_dbm: int = 0) -> BeaconFrame:
    """Compress ``url`` into a frame, applying scheme and suffix codes.

    Raises UnsupportedScheme for non-http(s) URLs and UrlTooLong when the
    compressed body does not fit in 17 bytes.
    """
    scheme_code = None
    rest = None
    for code, prefix in SCHEME_PREFIXES:
        if url.startswith(prefix):
            scheme_code = code
            rest = url[len(prefix):]
            break
    if scheme_code is None or rest is None:
        raise UnsupportedScheme(f"URL must start with http:// or https://: {url!r}")
    if not rest:
        raise MalformedFrame("URL has no body after the scheme")

    # longest suffix first so ".com/" wins over ".com"
    suffixes = sorted(enumerate(SUFFIX_EXPANSIONS), key=lambda kv: -len(kv[1]))
    body = bytearray()
    pos = 0
    while pos < len(rest):
        for code, text in suffixes:
            if rest.startswith(text, pos):
                body.append(code)
                pos += len(text)
                break
        else:
            ch = rest[pos]
            o = ord(ch)
            if not 0x21 <= o <= 0x7E:
                raise MalformedFrame(f"character {ch!r} not encodable in a URL frame")
            body.append(o)
            pos += 1
    if len(body) > MAX_BODY_BYTES:
        raise UrlTooLong(f"compressed URL body is {len(body)} bytes, max {MAX_BODY_BYTES}")
    return BeaconFrame(tx_power_dbm=tx_power_dbm, scheme_code=scheme_code, encoded_url=bytes(body))


def decode_frame(data: bytes) -> tuple[str, int]:
    """Inverse of :func:`encode_url`: returns (url, tx_power_dbm)."""
    if len(data) < 3:
        raise MalformedFrame(f"frame too short: {len(data)} bytes")
    if data[0] != FRAME_TYPE_URL:
        raise MalformedFrame(f"unsupported frame type 0x{data[0]:02x}")
    tx = data[1] if data[1] < 0x80 else data[1] - 0x100
    scheme_code = data[2]
    body = data[3:]
    if not body:
        raise MalformedFrame("empty URL body")
    if len(body) > MAX_BODY_BYTES:
        raise MalformedFrame(f"URL body is {len(body)} bytes, max {MAX_BODY_BYTES}")
    prefix = None
    for code, text in SCHEME_PREFIXES:
        if code == scheme_code:
            prefix = text
            break
    if prefix is None:
        raise MalformedFrame(f"unknown scheme code 0x{scheme_code:02x}")
    out = [prefix]
    for b in body:
        if b < len(SUFFIX_EXPANSIONS):
            out.append(SUFFIX_EXPANSIONS[b])
        elif 0x21 <= b <= 0x7E:
            out.append(chr(b))
        else:
            raise MalformedFrame(f"reserved byte 0x{b:02x} in URL body")
    return "".join(out), tx


@dataclass(frozen=True)
class SimulatedBeacon:
    """A missing person's phone broadcasting its profile URL."""

    user_code: str
    position: GeoPoint
    url: str
    advertising_interval_ms: int = 1000
    tx_power_dbm: int = -16
    battery_ok: bool = True

    def __post_init__(self) -> None:
        if not (
            MIN_ADVERTISING_INTERVAL_MS
            <= self.advertising_interval_ms
            <= MAX_ADVERTISING_INTERVAL_MS
        ):
            raise BeaconError(
                f"advertising interval {self.advertising_interval_ms} ms outside "
                f"[{MIN_ADVERTISING_INTERVAL_MS}, {MAX_ADVERTISING_INTERVAL_MS}]"
            )
        # must form a valid frame; raises otherwise
        encode_url(self.url, self.tx_power_dbm)

    def frame(self) -> BeaconFrame:
        return encode_url(self.url, self.tx_power_dbm)

    def to_dict(self) -> dict:
        return {
            "user_code": self.user_code,
            "position": self.position.to_dict(),
            "url": self.url,
            "advertising_interval_ms": self.advertising_interval_ms,
            "tx_power_dbm": self.tx_power_dbm,
            "battery_ok": self.battery_ok,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimulatedBeacon":
        return cls(
            user_code=d["user_code"],
            position=GeoPoint.from_dict(d["position"]),
            url=d["url"],
            advertising_interval_ms=d.get("advertising_interval_ms", 1000),
            tx_power_dbm=d.get("tx_power_dbm", -16),
            battery_ok=d.get("battery_ok", True),
        )


def advertise(b: SimulatedBeacon, duration_ms: int) -> list[tuple[int, bytes]]:
    """Timestamped frames emitted over ``duration_ms``: t = 0, interval, ...

    A dead battery emits nothing. The count equals
    ceil(duration / interval).
    """
    if duration_ms < 0:
        raise BeaconError("duration must be >= 0")
    if not b.battery_ok or duration_ms == 0:
        return []
    payload = b.frame().to_bytes()
    count = math.ceil(duration_ms / b.advertising_interval_ms)
    return [(t * b.advertising_interval_ms, payload) for t in range(count)]
