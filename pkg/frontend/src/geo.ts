/** Geographic primitives shared by the map, editor and API payloads. */

export interface GeoPoint {
  lat: number;
  lon: number;
  alt_m?: number;
}

export interface PolygonDraft {
  vertices: GeoPoint[];
}

/** Web-mercator world pixel coordinates at a given zoom (slippy-map scheme). */
export function project(lat: number, lon: number, zoom: number): { x: number; y: number } {
  const scale = 256 * Math.pow(2, zoom);
  const x = ((lon + 180) / 360) * scale;
  const rad = (lat * Math.PI) / 180;
  const y =
    ((1 - Math.log(Math.tan(rad) + 1 / Math.cos(rad)) / Math.PI) / 2) * scale;
  return { x, y };
}

export function unproject(x: number, y: number, zoom: number): GeoPoint {
  const scale = 256 * Math.pow(2, zoom);
  const lon = (x / scale) * 360 - 180;
  const n = Math.PI - (2 * Math.PI * y) / scale;
  const lat = (180 / Math.PI) * Math.atan(0.5 * (Math.exp(n) - Math.exp(-n)));
  return { lat, lon };
}

function orientation(ax: number, ay: number, bx: number, by: number, cx: number, cy: number): number {
  return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

function segmentsCross(
  a: GeoPoint, b: GeoPoint, c: GeoPoint, d: GeoPoint,
): boolean {
  const d1 = orientation(c.lon, c.lat, d.lon, d.lat, a.lon, a.lat);
  const d2 = orientation(c.lon, c.lat, d.lon, d.lat, b.lon, b.lat);
  const d3 = orientation(a.lon, a.lat, b.lon, b.lat, c.lon, c.lat);
  const d4 = orientation(a.lon, a.lat, b.lon, b.lat, d.lon, d.lat);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  const on = (px: number, py: number, qx: number, qy: number, rx: number, ry: number) =>
    Math.min(px, rx) <= qx && qx <= Math.max(px, rx) &&
    Math.min(py, ry) <= qy && qy <= Math.max(py, ry);
  if (d1 === 0 && on(c.lon, c.lat, a.lon, a.lat, d.lon, d.lat)) return true;
  if (d2 === 0 && on(c.lon, c.lat, b.lon, b.lat, d.lon, d.lat)) return true;
  if (d3 === 0 && on(a.lon, a.lat, c.lon, c.lat, b.lon, b.lat)) return true;
  if (d4 === 0 && on(a.lon, a.lat, d.lon, d.lat, b.lon, b.lat)) return true;
  return false;
}

/** Mirrors the server-side construction rules so bad input never leaves the client. */
export function polygonProblems(vertices: GeoPoint[]): string[] {
  const problems: string[] = [];
  if (vertices.length < 3) {
    problems.push("a search area needs at least 3 vertices");
    return problems;
  }
  const n = vertices.length;
  for (let i = 0; i < n; i++) {
    const a = vertices[i];
    const b = vertices[(i + 1) % n];
    if (a.lat === b.lat && a.lon === b.lon) {
      problems.push(`vertices ${i} and ${(i + 1) % n} coincide`);
    }
  }
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      if (j === i + 1 || (j + 1) % n === i) continue;
      if (
        segmentsCross(
          vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n],
        )
      ) {
        problems.push(`edges ${i} and ${j} cross`);
      }
    }
  }
  return problems;
}

/** Serialize exactly as the mission-create endpoint expects the polygon. */
export function polygonPayload(vertices: GeoPoint[]): { vertices: GeoPoint[] } {
  return {
    vertices: vertices.map((v) => ({ lat: v.lat, lon: v.lon, alt_m: v.alt_m ?? 0 })),
  };
}

export function sameVertices(a: GeoPoint[], b: GeoPoint[]): boolean {
  if (a.length !== b.length) return false;
  return a.every((v, i) => v.lat === b[i].lat && v.lon === b[i].lon);
}

export function centroid(vertices: GeoPoint[]): GeoPoint {
  const lat = vertices.reduce((s, v) => s + v.lat, 0) / vertices.length;
  const lon = vertices.reduce((s, v) => s + v.lon, 0) / vertices.length;
  return { lat, lon };
}
