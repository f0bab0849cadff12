from __future__ import annotations

import math
import random
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sarswarm.beacon import (
    BeaconError,
    MalformedFrame,
    SimulatedBeacon,
    UnsupportedScheme,
    UrlTooLong,
    advertise,
    decode_frame,
    encode_url,
)
from sarswarm.geodesy import GeoPoint


def make_url_corpus(n: int = 100) -> list[str]:
    rng = random.Random(77)
    schemes = ["http://", "https://", "http://www.", "https://www."]
    tails = ["", "/", "/a", "/x1", "?q=1"]
    domains = [".com", ".org", ".net", ".gov", ".info", ".biz", ".edu"]
    corpus = []
    while len(corpus) < n:
        name = "".join(rng.choices(string.ascii_lowercase, k=rng.randint(1, 6)))
        url = rng.choice(schemes) + name + rng.choice(domains) + rng.choice(tails)
        try:
            encode_url(url)
        except UrlTooLong:
            continue
        corpus.append(url)
    return corpus


class TestEncode:
    def test_known_compression(self):
        frame = encode_url("http://a.com")
        assert frame.scheme_code == 0x02
        assert frame.encoded_url == bytes([ord("a"), 0x07])

    def test_scheme_with_www(self):
        frame = encode_url("https://www.sar.org/")
        assert frame.scheme_code == 0x01
        assert frame.encoded_url == b"sar" + bytes([0x01])

    def test_slash_suffix_beats_bare_suffix(self):
        frame = encode_url("http://x.com/y")
        assert frame.encoded_url == bytes([ord("x"), 0x00, ord("y")])

    def test_url_too_long(self):
        with pytest.raises(UrlTooLong):
            encode_url("https://" + "a" * 18)

    def test_seventeen_bytes_fits(self):
        frame = encode_url("https://" + "a" * 17)
        assert len(frame.encoded_url) == 17

    @pytest.mark.parametrize("url", ["ftp://a.com", "a.com", "mailto:x@y.com", ""])
    def test_unsupported_scheme(self, url):
        with pytest.raises(UnsupportedScheme):
            encode_url(url)

    def test_non_ascii_rejected(self):
        with pytest.raises(BeaconError):
            encode_url("https://ñ.com")

    def test_frame_bytes_layout(self):
        frame = encode_url("http://a.com", tx_power_dbm=-16)
        raw = frame.to_bytes()
        assert raw[0] == 0x10
        assert raw[1] == 0xF0  # -16 as a signed byte
        assert raw[2] == 0x02
        assert raw[3:] == bytes([ord("a"), 0x07])
        assert len(raw) <= 20

    def test_tx_power_bounds(self):
        with pytest.raises(BeaconError):
            encode_url("http://a.com", tx_power_dbm=21)
        with pytest.raises(BeaconError):
            encode_url("http://a.com", tx_power_dbm=-101)


class TestDecode:
    def test_roundtrip_corpus(self):
        for url in make_url_corpus(100):
            frame = encode_url(url, tx_power_dbm=-8)
            decoded_url, tx = decode_frame(frame.to_bytes())
            assert decoded_url == url
            assert tx == -8

    def test_uid_frame_rejected(self):
        with pytest.raises(MalformedFrame):
            decode_frame(bytes([0x00, 0x00, 0x02, ord("a")]))

    def test_truncated_rejected(self):
        with pytest.raises(MalformedFrame):
            decode_frame(bytes([0x10, 0x00]))

    def test_empty_body_rejected(self):
        with pytest.raises(MalformedFrame):
            decode_frame(bytes([0x10, 0x00, 0x02]))

    def test_bad_scheme_code_rejected(self):
        with pytest.raises(MalformedFrame):
            decode_frame(bytes([0x10, 0x00, 0x04, ord("a")]))

    def test_reserved_body_byte_rejected(self):
        with pytest.raises(MalformedFrame):
            decode_frame(bytes([0x10, 0x00, 0x02, 0x0E]))

    def test_oversized_body_rejected(self):
        with pytest.raises(MalformedFrame):
            decode_frame(bytes([0x10, 0x00, 0x02]) + b"a" * 18)

    @given(
        scheme=st.sampled_from(["http://", "https://", "http://www.", "https://www."]),
        name=st.text(alphabet=string.ascii_lowercase + string.digits, min_size=1, max_size=8),
        suffix=st.sampled_from([".com", ".org/", ".net", ".gov/", ""]),
    )
    @settings(max_examples=200)
    def test_roundtrip_property(self, scheme, name, suffix):
        url = scheme + name + suffix
        try:
            frame = encode_url(url)
        except UrlTooLong:
            return
        decoded, _ = decode_frame(frame.to_bytes())
        assert decoded == url


class TestSimulatedBeacon:
    def _beacon(self, **kw):
        defaults = dict(
            user_code="u1",
            position=GeoPoint(28.0, -16.0),
            url="https://sar.gl/u1",
            advertising_interval_ms=1000,
        )
        defaults.update(kw)
        return SimulatedBeacon(**defaults)

    def test_interval_bounds(self):
        with pytest.raises(BeaconError):
            self._beacon(advertising_interval_ms=19)
        with pytest.raises(BeaconError):
            self._beacon(advertising_interval_ms=10_241)

    def test_url_must_encode(self):
        with pytest.raises(UrlTooLong):
            self._beacon(url="https://" + "x" * 40)

    def test_dict_roundtrip(self):
        b = self._beacon(battery_ok=False, tx_power_dbm=-20)
        assert SimulatedBeacon.from_dict(b.to_dict()) == b


class TestAdvertise:
    def _beacon(self, **kw):
        defaults = dict(
            user_code="u1",
            position=GeoPoint(28.0, -16.0),
            url="https://sar.gl/u1",
            advertising_interval_ms=1000,
        )
        defaults.update(kw)
        return SimulatedBeacon(**defaults)

    def test_zero_duration(self):
        assert advertise(self._beacon(), 0) == []

    def test_frame_times(self):
        frames = advertise(self._beacon(), 3500)
        assert [t for t, _ in frames] == [0, 1000, 2000, 3000]
        assert len(frames) == math.ceil(3500 / 1000)

    def test_exact_multiple_duration(self):
        frames = advertise(self._beacon(), 3000)
        assert [t for t, _ in frames] == [0, 1000, 2000]

    def test_dead_battery_emits_nothing(self):
        assert advertise(self._beacon(battery_ok=False), 10_000) == []

    def test_payload_is_the_encoded_frame(self):
        b = self._beacon()
        frames = advertise(b, 1500)
        assert all(payload == b.frame().to_bytes() for _, payload in frames)

    def test_negative_duration_rejected(self):
        with pytest.raises(BeaconError):
            advertise(self._beacon(), -1)
