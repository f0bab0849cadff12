/** Minimal slippy map: tile <img> layer plus an SVG vector overlay.
 *
 * Everything is positioned in web-mercator world pixels at the current
 * zoom, so tiles and vectors stay aligned. The tile URL template is
 * configurable; with none set the map renders on a plain grid, which keeps
 * tests and air-gapped deployments working.
 */

import { GeoPoint, polygonProblems, project, unproject } from "./geo.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export type MapMode = "pan" | "draw" | "base";

export interface MapCallbacks {
  onPolygonChange?: (vertices: GeoPoint[], problems: string[]) => void;
  onBaseChange?: (base: GeoPoint) => void;
}

export class MapView {
  private center: GeoPoint = { lat: 28.2916, lon: -16.6291 };
  private zoom = 12;
  private tileTemplate: string | null;
  private tileLayer: HTMLDivElement;
  private svg: SVGSVGElement;
  private mode: MapMode = "draw";
  private vertices: GeoPoint[] = [];
  private base: GeoPoint | null = null;
  private dragVertex = -1;
  private panning: { x: number; y: number } | null = null;
  private overlays: SVGElement[] = [];

  constructor(
    private root: HTMLElement,
    callbacks: MapCallbacks = {},
    tileTemplate: string | null = null,
  ) {
    this.callbacks = callbacks;
    this.tileTemplate = tileTemplate;
    this.root.classList.add("mapview");
    this.tileLayer = document.createElement("div");
    this.tileLayer.className = "tiles";
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.root.appendChild(this.tileLayer);
    this.root.appendChild(this.svg);
    this.bindEvents();
    this.render();
  }

  private callbacks: MapCallbacks;

  setMode(mode: MapMode): void {
    this.mode = mode;
  }

  setTileTemplate(template: string | null): void {
    this.tileTemplate = template;
    this.render();
  }

  setView(center: GeoPoint, zoom: number): void {
    this.center = center;
    this.zoom = zoom;
    this.render();
  }

  getPolygon(): GeoPoint[] {
    return [...this.vertices];
  }

  setPolygon(vertices: GeoPoint[]): void {
    this.vertices = vertices.map((v) => ({ ...v }));
    this.render();
    this.notifyPolygon();
  }

  getBase(): GeoPoint | null {
    return this.base;
  }

  setBase(base: GeoPoint | null): void {
    this.base = base ? { ...base } : null;
    this.render();
  }

  clear(): void {
    this.vertices = [];
    this.base = null;
    this.render();
    this.notifyPolygon();
  }

  /** Extra geometry (drone markers, pins, routes) drawn above the editor. */
  setOverlays(frag: SVGElement[]): void {
    this.overlays = frag;
    this.render();
  }

  latLonToScreen(p: GeoPoint): { x: number; y: number } {
    const world = project(p.lat, p.lon, this.zoom);
    const c = project(this.center.lat, this.center.lon, this.zoom);
    return {
      x: world.x - c.x + this.root.clientWidth / 2,
      y: world.y - c.y + this.root.clientHeight / 2,
    };
  }

  screenToLatLon(x: number, y: number): GeoPoint {
    const c = project(this.center.lat, this.center.lon, this.zoom);
    return unproject(
      c.x + x - this.root.clientWidth / 2,
      c.y + y - this.root.clientHeight / 2,
      this.zoom,
    );
  }

  private bindEvents(): void {
    this.root.addEventListener("pointerdown", (ev) => {
      const rect = this.root.getBoundingClientRect();
      const x = ev.clientX - rect.left;
      const y = ev.clientY - rect.top;
      const target = ev.target as Element;
      const handle = target.closest("[data-vertex]");
      if (handle && this.mode === "draw") {
        this.dragVertex = Number(handle.getAttribute("data-vertex"));
        this.root.setPointerCapture(ev.pointerId);
        return;
      }
      if (this.mode === "pan") {
        this.panning = { x, y };
        this.root.setPointerCapture(ev.pointerId);
      }
    });
    this.root.addEventListener("pointermove", (ev) => {
      const rect = this.root.getBoundingClientRect();
      const x = ev.clientX - rect.left;
      const y = ev.clientY - rect.top;
      if (this.dragVertex >= 0) {
        this.vertices[this.dragVertex] = this.screenToLatLon(x, y);
        this.render();
        this.notifyPolygon();
        return;
      }
      if (this.panning) {
        const c = project(this.center.lat, this.center.lon, this.zoom);
        this.center = unproject(
          c.x - (x - this.panning.x),
          c.y - (y - this.panning.y),
          this.zoom,
        );
        this.panning = { x, y };
        this.render();
      }
    });
    this.root.addEventListener("pointerup", (ev) => {
      const rect = this.root.getBoundingClientRect();
      const x = ev.clientX - rect.left;
      const y = ev.clientY - rect.top;
      if (this.dragVertex >= 0) {
        this.dragVertex = -1;
        return;
      }
      if (this.panning) {
        this.panning = null;
        return;
      }
      const p = this.screenToLatLon(x, y);
      if (this.mode === "draw") {
        this.vertices.push(p);
        this.render();
        this.notifyPolygon();
      } else if (this.mode === "base") {
        this.base = p;
        this.render();
        this.callbacks.onBaseChange?.(p);
      }
    });
    this.root.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      const next = this.zoom + (ev.deltaY < 0 ? 1 : -1);
      this.zoom = Math.max(3, Math.min(19, next));
      this.render();
    });
  }

  private notifyPolygon(): void {
    this.callbacks.onPolygonChange?.(this.getPolygon(), polygonProblems(this.vertices));
  }

  private renderTiles(): void {
    this.tileLayer.textContent = "";
    if (!this.tileTemplate) {
      this.tileLayer.classList.add("offline");
      return;
    }
    this.tileLayer.classList.remove("offline");
    const w = this.root.clientWidth;
    const h = this.root.clientHeight;
    const c = project(this.center.lat, this.center.lon, this.zoom);
    const originX = c.x - w / 2;
    const originY = c.y - h / 2;
    const first = { tx: Math.floor(originX / 256), ty: Math.floor(originY / 256) };
    const last = { tx: Math.floor((originX + w) / 256), ty: Math.floor((originY + h) / 256) };
    const max = Math.pow(2, this.zoom);
    for (let tx = first.tx; tx <= last.tx; tx++) {
      for (let ty = first.ty; ty <= last.ty; ty++) {
        if (ty < 0 || ty >= max) continue;
        const img = document.createElement("img");
        const wrapped = ((tx % max) + max) % max;
        img.src = this.tileTemplate
          .replace("{z}", String(this.zoom))
          .replace("{x}", String(wrapped))
          .replace("{y}", String(ty));
        img.style.left = `${tx * 256 - originX}px`;
        img.style.top = `${ty * 256 - originY}px`;
        this.tileLayer.appendChild(img);
      }
    }
  }

  private render(): void {
    this.renderTiles();
    this.svg.setAttribute("width", String(this.root.clientWidth));
    this.svg.setAttribute("height", String(this.root.clientHeight));
    this.svg.textContent = "";

    const problems = polygonProblems(this.vertices);
    if (this.vertices.length >= 2) {
      const poly = document.createElementNS(SVG_NS, this.vertices.length > 2 ? "polygon" : "polyline");
      poly.setAttribute(
        "points",
        this.vertices
          .map((v) => {
            const s = this.latLonToScreen(v);
            return `${s.x},${s.y}`;
          })
          .join(" "),
      );
      poly.setAttribute("class", problems.length && this.vertices.length > 2 ? "area invalid" : "area");
      this.svg.appendChild(poly);
    }
    this.vertices.forEach((v, i) => {
      const s = this.latLonToScreen(v);
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(s.x));
      dot.setAttribute("cy", String(s.y));
      dot.setAttribute("r", "6");
      dot.setAttribute("class", "vertex");
      dot.setAttribute("data-vertex", String(i));
      this.svg.appendChild(dot);
    });
    if (this.base) {
      const s = this.latLonToScreen(this.base);
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(s.x));
      dot.setAttribute("cy", String(s.y));
      dot.setAttribute("r", "7");
      dot.setAttribute("class", "base");
      this.svg.appendChild(dot);
    }
    for (const el of this.overlays) {
      this.svg.appendChild(el);
    }
  }
}
