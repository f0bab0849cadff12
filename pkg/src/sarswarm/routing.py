"""Per-area route construction: point graph, A*, tour heuristic, KML export.

Each drone area becomes an 8-neighbourhood lattice graph whose edge weights
are great-circle meters. Tours start at the shared base point, visit every
area point at least once (revisits through already-covered points are
allowed), and are built by nearest-neighbour construction plus 2-opt
improvement over the shortest-path distance matrix.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

from .geodesy import EARTH_RADIUS_M, GeoPoint, SearchPolygon, generate_grid, haversine_distance
from .partition import split_areas


class RoutingError(ValueError):
    """Base class for routing failures."""


class UnreachableError(RoutingError):
    """No path exists between the requested nodes."""


@dataclass
class PointGraph:
    """Undirected weighted graph over grid points.

    ``adjacency[i]`` lists ``(neighbor_index, weight_m)`` pairs; weights are
    haversine meters and every edge appears in both endpoint lists.
    """

    nodes: list[GeoPoint]
    adjacency: list[list[tuple[int, float]]]

    def add_node(self, p: GeoPoint) -> int:
        self.nodes.append(p)
        self.adjacency.append([])
        return len(self.nodes) - 1

    def add_edge(self, i: int, j: int, weight: float) -> None:
        if i == j:
            raise RoutingError("self-edges are not allowed")
        if weight <= 0.0:
            raise RoutingError("edge weights must be > 0")
        self.adjacency[i].append((j, weight))
        self.adjacency[j].append((i, weight))


@dataclass(frozen=True)
class Route:
    """Ordered waypoint tour for one drone, starting at the base point."""

    drone_id: int
    waypoints: tuple[GeoPoint, ...]
    leg_lengths_m: tuple[float, ...]
    total_length_m: float
    altitude_m: float

    def to_dict(self) -> dict:
        return {
            "drone_id": self.drone_id,
            "waypoints": [p.to_dict() for p in self.waypoints],
            "leg_lengths_m": list(self.leg_lengths_m),
            "total_length_m": self.total_length_m,
            "altitude_m": self.altitude_m,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Route":
        return cls(
            drone_id=d["drone_id"],
            waypoints=tuple(GeoPoint.from_dict(p) for p in d["waypoints"]),
            leg_lengths_m=tuple(d["leg_lengths_m"]),
            total_length_m=d["total_length_m"],
            altitude_m=d["altitude_m"],
        )


def build_graph(points: Sequence[GeoPoint], spacing_m: float) -> PointGraph:
    """Lattice adjacency graph: nodes within 1.5x spacing become neighbours.

    A disconnected result (concave polygons can strand lattice islands) is
    repaired by bridging the nearest point pair between components until one
    component remains.
    """
    nodes = list(points)
    if not nodes:
        raise RoutingError("need at least one point")
    g = PointGraph(nodes=nodes, adjacency=[[] for _ in nodes])
    radius = 1.5 * spacing_m

    # bucket points on a coarse local grid so neighbour search stays near-linear
    ref_lat = nodes[0].lat
    cos_ref = max(math.cos(math.radians(ref_lat)), 1e-6)
    cell = radius if radius > 0 else 1.0

    def cell_of(p: GeoPoint) -> tuple[int, int]:
        x = math.radians(p.lon) * cos_ref * EARTH_RADIUS_M
        y = math.radians(p.lat) * EARTH_RADIUS_M
        return int(x // cell), int(y // cell)

    buckets: dict[tuple[int, int], list[int]] = {}
    for i, p in enumerate(nodes):
        buckets.setdefault(cell_of(p), []).append(i)

    for i, p in enumerate(nodes):
        cx, cy = cell_of(p)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in buckets.get((cx + dx, cy + dy), ()):
                    if j <= i:
                        continue
                    d = haversine_distance(p, nodes[j])
                    if 0.0 < d <= radius:
                        g.add_edge(i, j, d)

    _bridge_components(g)
    return g


def _components(g: PointGraph) -> list[list[int]]:
    seen = [False] * len(g.nodes)
    comps: list[list[int]] = []
    for start in range(len(g.nodes)):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        stack = [start]
        while stack:
            u = stack.pop()
            for v, _ in g.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    stack.append(v)
        comps.append(comp)
    return comps


def _bridge_components(g: PointGraph) -> None:
    comps = _components(g)
    while len(comps) > 1:
        best = None  # (distance, i, j, comp_a, comp_b)
        for a in range(len(comps)):
            for b in range(a + 1, len(comps)):
                for i in comps[a]:
                    for j in comps[b]:
                        d = haversine_distance(g.nodes[i], g.nodes[j])
                        if best is None or d < best[0]:
                            best = (d, i, j, a, b)
        assert best is not None
        d, i, j, a, b = best
        g.add_edge(i, j, d)
        comps[a].extend(comps[b])
        del comps[b]


def astar(g: PointGraph, start: int, goal: int) -> tuple[list[int], float]:
    """Cost-minimal path between two graph nodes.

    The heuristic is the great-circle distance to the goal, which is
    admissible and consistent on a graph whose weights are great-circle
    distances.
    """
    n = len(g.nodes)
    if not (0 <= start < n and 0 <= goal < n):
        raise RoutingError(f"node out of range: {start}, {goal}")
    if start == goal:
        return [start], 0.0
    goal_p = g.nodes[goal]
    best_g = {start: 0.0}
    parent = {start: -1}
    counter = 0
    open_heap = [(haversine_distance(g.nodes[start], goal_p), counter, start)]
    closed = set()
    while open_heap:
        _, _, u = heapq.heappop(open_heap)
        if u == goal:
            path = []
            node = u
            while node != -1:
                path.append(node)
                node = parent[node]
            path.reverse()
            return path, best_g[goal]
        if u in closed:
            continue
        closed.add(u)
        for v, w in g.adjacency[u]:
            cand = best_g[u] + w
            if cand < best_g.get(v, math.inf):
                best_g[v] = cand
                parent[v] = u
                counter += 1
                heapq.heappush(
                    open_heap, (cand + haversine_distance(g.nodes[v], goal_p), counter, v)
                )
    raise UnreachableError(f"no path from node {start} to {goal}")


def _dijkstra(g: PointGraph, source: int) -> tuple[list[float], list[int]]:
    """Distances and parent tree from one source over the whole graph."""
    n = len(g.nodes)
    dist = [math.inf] * n
    parent = [-1] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in g.adjacency[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, parent


def _tree_path(parent: list[int], source: int, target: int) -> list[int]:
    path = []
    node = target
    while node != -1:
        path.append(node)
        if node == source:
            break
        node = parent[node]
    if path[-1] != source:
        raise UnreachableError(f"no path from node {source} to {target}")
    path.reverse()
    return path


def nearest_neighbor_order(dist: dict[int, dict[int, float]], start: int, targets: list[int]) -> list[int]:
    """Greedy visiting order over a distance matrix, starting from ``start``."""
    remaining = list(targets)
    order = []
    current = start
    while remaining:
        best_i = min(range(len(remaining)), key=lambda i: (dist[current][remaining[i]], remaining[i]))
        current = remaining.pop(best_i)
        order.append(current)
    return order


def two_opt(dist: dict[int, dict[int, float]], start: int, order: list[int]) -> list[int]:
    """2-opt improvement of an open tour (fixed start, free end) to a local optimum."""
    tour = list(order)
    m = len(tour)
    if m < 2:
        return tour

    def d(a: int, b: int) -> float:
        return dist[a][b]

    improved = True
    while improved:
        improved = False
        for i in range(m - 1):
            before = start if i == 0 else tour[i - 1]
            for j in range(i + 1, m):
                # reversing tour[i..j] replaces (before,i) and (j,j+1) edges
                old = d(before, tour[i])
                new = d(before, tour[j])
                if j + 1 < m:
                    old += d(tour[j], tour[j + 1])
                    new += d(tour[i], tour[j + 1])
                if new < old - 1e-9:
                    tour[i : j + 1] = reversed(tour[i : j + 1])
                    improved = True
    return tour


def tour_length(dist: dict[int, dict[int, float]], start: int, order: list[int]) -> float:
    total = 0.0
    current = start
    for node in order:
        total += dist[current][node]
        current = node
    return total


def plan_tour(
    area: Sequence[GeoPoint],
    base: GeoPoint,
    g: PointGraph,
    drone_id: int = 0,
    altitude_m: float = 0.0,
) -> Route:
    """Open tour from ``base`` covering every area point at least once.

    ``g`` must be the graph over ``area``. The base point joins the graph
    through its nearest grid point; legs between consecutive tour stops
    follow shortest paths in the graph, so the resulting waypoint list is a
    valid walk and may revisit covered points.
    """
    if not area:
        raise RoutingError("area must be non-empty")
    if len(g.nodes) != len(area):
        raise RoutingError("graph does not match the area point set")

    work = PointGraph(nodes=list(g.nodes), adjacency=[list(adj) for adj in g.adjacency])
    base_idx = None
    for i, p in enumerate(work.nodes):
        if p.lat == base.lat and p.lon == base.lon:
            base_idx = i
            break
    if base_idx is None:
        base_idx = work.add_node(GeoPoint(base.lat, base.lon))
        nearest = min(
            range(len(area)), key=lambda i: (haversine_distance(base, work.nodes[i]), i)
        )
        link = haversine_distance(base, work.nodes[nearest])
        if link > 0.0:
            work.add_edge(base_idx, nearest, link)
        else:
            # base coincides with a grid point that differs only in altitude
            work.add_edge(base_idx, nearest, 1e-9)

    area_idx = [i for i in range(len(area))]
    if base_idx < len(area):
        area_idx = [i for i in area_idx if i != base_idx]

    dist: dict[int, dict[int, float]] = {}
    parents: dict[int, list[int]] = {}
    for s in [base_idx] + area_idx:
        dvec, pvec = _dijkstra(work, s)
        dist[s] = {t: dvec[t] for t in [base_idx] + area_idx}
        parents[s] = pvec
        unreachable = [t for t, val in dist[s].items() if math.isinf(val)]
        if unreachable:
            raise UnreachableError(f"nodes {unreachable} unreachable from {s}")

    order = nearest_neighbor_order(dist, base_idx, area_idx)
    order = two_opt(dist, base_idx, order)

    waypoints: list[GeoPoint] = [work.nodes[base_idx]]
    current = base_idx
    for node in order:
        leg = _tree_path(parents[current], current, node)
        for idx in leg[1:]:
            waypoints.append(work.nodes[idx])
        current = node

    legs = tuple(
        haversine_distance(waypoints[i], waypoints[i + 1]) for i in range(len(waypoints) - 1)
    )
    return Route(
        drone_id=drone_id,
        waypoints=tuple(waypoints),
        leg_lengths_m=legs,
        total_length_m=math.fsum(legs),
        altitude_m=altitude_m,
    )


def plan_mission_routes(
    poly: SearchPolygon,
    spacing_m: float,
    n_drones: int,
    base: GeoPoint,
    seed: int = 0,
    altitude_m: float = 0.0,
) -> list[Route]:
    """Full planning pipeline: grid, k-means areas, one tour per drone."""
    grid = generate_grid(poly, spacing_m)
    areas = split_areas(grid, n_drones, seed=seed)
    routes = []
    for i, area in enumerate(areas):
        g = build_graph(area, spacing_m)
        routes.append(plan_tour(area, base, g, drone_id=i, altitude_m=altitude_m))
    return routes


KML_NAMESPACE = "http://www.opengis.net/kml/2.2"


def _coord(p: GeoPoint, alt: float) -> str:
    return f"{p.lon:.7f},{p.lat:.7f},{alt:.7f}"


def export_kml(routes: Sequence[Route], document_name: str = "Search mission routes") -> str:
    """Serialize routes as a KML 2.2 document.

    One LineString placemark per route at the route's relative flight
    altitude, plus a point placemark for the shared base. Output is
    byte-stable for identical input.
    """
    if not routes:
        raise RoutingError("no routes to export")
    base = routes[0].waypoints[0]
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<kml xmlns="{KML_NAMESPACE}">',
        "  <Document>",
        f"    <name>{document_name}</name>",
        "    <Placemark>",
        "      <name>Base</name>",
        "      <Point>",
        f"        <coordinates>{_coord(base, 0.0)}</coordinates>",
        "      </Point>",
        "    </Placemark>",
    ]
    for route in routes:
        coords = " ".join(_coord(p, route.altitude_m) for p in route.waypoints)
        lines.extend(
            [
                "    <Placemark>",
                f"      <name>Drone {route.drone_id}</name>",
                "      <LineString>",
                "        <altitudeMode>relativeToGround</altitudeMode>",
                f"        <coordinates>{coords}</coordinates>",
                "      </LineString>",
                "    </Placemark>",
            ]
        )
    lines.extend(["  </Document>", "</kml>", ""])
    return "\n".join(lines)
