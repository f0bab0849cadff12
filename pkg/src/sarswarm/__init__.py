"""Mission planning and drone-swarm simulation for beacon-based SAR."""

__version__ = "0.1.0"

from .geodesy import GeoPoint, PointCloud, SearchPolygon  # noqa: F401
from .mission import MissionConfig, MissionRecord, Phase  # noqa: F401
from .routing import Route  # noqa: F401
