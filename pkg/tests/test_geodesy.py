from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sarswarm.geodesy import (
    EARTH_RADIUS_M,
    EmptyGridError,
    GeodesyError,
    GeoPoint,
    GridTooLargeError,
    SearchPolygon,
    destination_point,
    generate_grid,
    haversine_distance,
    point_in_polygon,
    rectangle_polygon,
)

from oracles import law_of_cosines_distance, rectangle_lattice_count

# law-of-cosines oracle value for the Tenerife pair, computed before the build
TENERIFE_A = GeoPoint(28.4636, -16.2518)
TENERIFE_B = GeoPoint(28.4874, -16.3159)
TENERIFE_DISTANCE_M = 6801.301192829055


class TestGeoPoint:
    def test_valid(self):
        p = GeoPoint(28.5, -16.2, 30.0)
        assert p.alt_m == 30.0

    @pytest.mark.parametrize(
        "lat,lon,alt",
        [(91, 0, 0), (-91, 0, 0), (0, 181, 0), (0, -200, 0), (0, 0, -1)],
    )
    def test_invalid(self, lat, lon, alt):
        with pytest.raises(GeodesyError):
            GeoPoint(lat, lon, alt)

    def test_dict_roundtrip(self):
        p = GeoPoint(1.5, 2.5, 3.5)
        assert GeoPoint.from_dict(p.to_dict()) == p


class TestHaversine:
    def test_identity(self):
        p = GeoPoint(28.4636, -16.2518)
        assert haversine_distance(p, p) == 0.0

    def test_half_great_circle(self):
        d = haversine_distance(GeoPoint(0, 0), GeoPoint(0, 180))
        assert d == pytest.approx(math.pi * EARTH_RADIUS_M, rel=1e-12)

    def test_against_law_of_cosines_oracle(self):
        d = haversine_distance(TENERIFE_A, TENERIFE_B)
        assert d == pytest.approx(TENERIFE_DISTANCE_M, rel=1e-3)

    def test_thousand_random_pairs_vs_oracle(self):
        rng = random.Random(12345)
        for _ in range(1000):
            a = GeoPoint(rng.uniform(-80, 80), rng.uniform(-179, 179))
            b = GeoPoint(rng.uniform(-80, 80), rng.uniform(-179, 179))
            expected = law_of_cosines_distance(a.lat, a.lon, b.lat, b.lon)
            if expected < 1000.0:
                continue  # acos loses precision for near-coincident points
            assert haversine_distance(a, b) == pytest.approx(expected, rel=1e-3)

    @given(
        lat1=st.floats(-80, 80), lon1=st.floats(-179, 179),
        lat2=st.floats(-80, 80), lon2=st.floats(-179, 179),
    )
    @settings(max_examples=200)
    def test_symmetry(self, lat1, lon1, lat2, lon2):
        a, b = GeoPoint(lat1, lon1), GeoPoint(lat2, lon2)
        assert haversine_distance(a, b) == pytest.approx(haversine_distance(b, a), abs=1e-9)
        assert haversine_distance(a, b) >= 0.0

    def test_triangle_inequality(self):
        rng = random.Random(99)
        for _ in range(300):
            pts = [GeoPoint(rng.uniform(-80, 80), rng.uniform(-179, 179)) for _ in range(3)]
            ab = haversine_distance(pts[0], pts[1])
            bc = haversine_distance(pts[1], pts[2])
            ac = haversine_distance(pts[0], pts[2])
            assert ac <= (ab + bc) * (1 + 1e-6)


class TestDestinationPoint:
    def test_zero_distance_is_origin(self):
        origin = GeoPoint(28.4, -16.3, 5.0)
        assert destination_point(origin, 123.0, 0.0) == origin

    def test_one_degree_arc_east_at_equator(self):
        arc = math.radians(1.0) * EARTH_RADIUS_M
        p = destination_point(GeoPoint(0, 0), 90.0, arc)
        assert p.lat == pytest.approx(0.0, abs=1e-6)
        assert p.lon == pytest.approx(1.0, abs=1e-6)

    def test_negative_distance_rejected(self):
        with pytest.raises(GeodesyError):
            destination_point(GeoPoint(0, 0), 0.0, -1.0)

    def test_round_trip_with_haversine(self):
        rng = random.Random(7)
        for _ in range(500):
            origin = GeoPoint(rng.uniform(-80, 80), rng.uniform(-179, 179))
            bearing = rng.uniform(0, 360)
            dist = 10 ** rng.uniform(0, 5)  # 1 m .. 100 km
            there = destination_point(origin, bearing, dist)
            measured = haversine_distance(origin, there)
            assert abs(measured - dist) / dist < 1e-4


class TestSearchPolygon:
    def test_two_vertices_rejected(self):
        with pytest.raises(GeodesyError):
            SearchPolygon([GeoPoint(0, 0), GeoPoint(0, 1)])

    def test_consecutive_duplicates_rejected(self):
        with pytest.raises(GeodesyError):
            SearchPolygon([GeoPoint(0, 0), GeoPoint(0, 0), GeoPoint(1, 1)])

    def test_bowtie_rejected(self):
        with pytest.raises(GeodesyError):
            SearchPolygon(
                [GeoPoint(0, 0), GeoPoint(1, 1), GeoPoint(1, 0), GeoPoint(0, 1)]
            )

    def test_valid_quad(self):
        poly = SearchPolygon(
            [GeoPoint(0, 0), GeoPoint(0, 1), GeoPoint(1, 1), GeoPoint(1, 0)]
        )
        assert len(poly.vertices) == 4

    def test_bounding_box(self, square_100m):
        min_lat, min_lon, max_lat, max_lon = square_100m.bounding_box()
        assert (min_lat, min_lon) == (28.0, -16.0)
        assert max_lat > min_lat and max_lon > min_lon


class TestPointInPolygon:
    def test_centroid_inside(self, square_100m):
        assert point_in_polygon(square_100m.centroid(), square_100m)

    def test_far_outside(self, square_100m):
        outside = destination_point(GeoPoint(28.0, -16.0), 270.0, 1000.0)
        assert not point_in_polygon(outside, square_100m)

    def test_edge_midpoint_inside(self, square_100m):
        v0, v1 = square_100m.vertices[0], square_100m.vertices[1]
        mid = GeoPoint((v0.lat + v1.lat) / 2, (v0.lon + v1.lon) / 2)
        assert point_in_polygon(mid, square_100m)

    def test_vertex_inside(self, square_100m):
        assert point_in_polygon(square_100m.vertices[2], square_100m)


class TestGenerateGrid:
    def test_square_3x3(self, square_100m):
        grid = generate_grid(square_100m, 50.0)
        assert len(grid) == 9

    def test_all_points_inside(self, square_100m):
        grid = generate_grid(square_100m, 30.0)
        assert all(point_in_polygon(p, square_100m) for p in grid.points)

    @pytest.mark.parametrize(
        "width,height,spacing",
        [(100, 100, 50), (120, 80, 50), (250, 100, 50), (333, 333, 111), (90, 40, 25)],
    )
    def test_rectangle_counts_match_lattice_oracle(self, width, height, spacing):
        poly = rectangle_polygon(GeoPoint(28.0, -16.0), width, height)
        grid = generate_grid(poly, spacing)
        assert len(grid) == rectangle_lattice_count(width, height, spacing)

    def test_area_estimate_2_5_km2(self):
        # 1581.14 m sides give a 2.5 km^2 square: ~1000 points at 50 m
        poly = rectangle_polygon(GeoPoint(28.0, -16.0), 1581.14, 1581.14)
        grid = generate_grid(poly, 50.0)
        assert len(grid) == rectangle_lattice_count(1581.14, 1581.14, 50.0) == 1024
        assert abs(len(grid) - 1000) / 1000 <= 0.05

    def test_spacing_invariant_within_one_percent(self):
        poly = rectangle_polygon(GeoPoint(45.0, 7.0), 400.0, 400.0)
        grid = generate_grid(poly, 100.0)
        for p in grid.points:
            nearest = min(
                haversine_distance(p, q) for q in grid.points if q is not p
            )
            assert abs(nearest - 100.0) / 100.0 < 0.01

    def test_empty_grid(self):
        # bbox SW corner falls outside this triangle and spacing skips the rest
        a = destination_point(GeoPoint(0, 0), 90.0, 100.0)
        b = destination_point(GeoPoint(0, 0), 0.0, 50.0)
        c = GeoPoint(b.lat + (a.lat - b.lat) * 2, a.lon)
        tri = SearchPolygon([a, b, c])
        with pytest.raises(EmptyGridError):
            generate_grid(tri, 500.0)

    def test_grid_cap(self, square_100m):
        with pytest.raises(GridTooLargeError):
            generate_grid(square_100m, 50.0, max_points=5)

    def test_zero_spacing_rejected(self, square_100m):
        with pytest.raises(GeodesyError):
            generate_grid(square_100m, 0.0)

    def test_deterministic(self, square_100m):
        g1 = generate_grid(square_100m, 50.0)
        g2 = generate_grid(square_100m, 50.0)
        assert g1.points == g2.points
