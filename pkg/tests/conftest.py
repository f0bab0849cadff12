from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sarswarm.geodesy import GeoPoint, rectangle_polygon
from sarswarm.secure_transport import KeyRing

TEST_ENC_KEY = bytes(range(32))
TEST_MAC_KEY = bytes(range(32, 64))


@pytest.fixture
def keys() -> KeyRing:
    return KeyRing(enc_key=TEST_ENC_KEY, mac_key=TEST_MAC_KEY, key_id=7)


@pytest.fixture
def square_100m():
    """100 m x 100 m polygon anchored at a Tenerife-ish corner."""
    return rectangle_polygon(GeoPoint(28.0, -16.0), 100.0, 100.0)


@pytest.fixture
def sw_corner():
    return GeoPoint(28.0, -16.0)
