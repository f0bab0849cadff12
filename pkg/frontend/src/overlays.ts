/** SVG overlay builders for routes, drone markers and detection pins. */

import type { MissionDetail } from "./api.js";
import type { MapView } from "./map.js";
import type { MissionViewState } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function buildOverlays(map: MapView, detail: MissionDetail | null, state: MissionViewState): SVGElement[] {
  const out: SVGElement[] = [];
  if (detail) {
    for (const route of detail.routes) {
      const line = document.createElementNS(SVG_NS, "polyline");
      line.setAttribute(
        "points",
        route.waypoints
          .map((p) => {
            const s = map.latLonToScreen(p);
            return `${s.x},${s.y}`;
          })
          .join(" "),
      );
      line.setAttribute("class", `route route-${route.drone_id % 6}`);
      out.push(line);
    }
  }
  for (const pin of state.detections) {
    const s = map.latLonToScreen(pin.position);
    const g = document.createElementNS(SVG_NS, "g");
    g.setAttribute("class", "pin");
    g.setAttribute("transform", `translate(${s.x},${s.y})`);
    const marker = document.createElementNS(SVG_NS, "path");
    marker.setAttribute("d", "M0,0 L-6,-14 A8 8 0 1 1 6,-14 Z");
    g.appendChild(marker);
    out.push(g);
  }
  for (const drone of state.drones.values()) {
    const s = map.latLonToScreen(drone.position);
    const g = document.createElementNS(SVG_NS, "g");
    g.setAttribute("class", `drone drone-${drone.droneId % 6}`);
    g.setAttribute("transform", `translate(${s.x},${s.y})`);
    const body = document.createElementNS(SVG_NS, "rect");
    body.setAttribute("x", "-5");
    body.setAttribute("y", "-5");
    body.setAttribute("width", "10");
    body.setAttribute("height", "10");
    body.setAttribute("transform", "rotate(45)");
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("y", "-9");
    label.textContent = `D${drone.droneId}`;
    g.appendChild(body);
    g.appendChild(label);
    out.push(g);
  }
  return out;
}
