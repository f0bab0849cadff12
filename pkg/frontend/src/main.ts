/** Operator panel entry point: wires map, console, live view and results. */

import { ApiClient } from "./api.js";
import { MissionConsole } from "./console.js";
import { LiveView } from "./live.js";
import { MapView } from "./map.js";
import { ResultsView } from "./results.js";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function currentApi(): ApiClient {
  const server = (localStorage.getItem("sarswarm.server") ?? "").replace(/\/$/, "");
  const token = localStorage.getItem("sarswarm.token") ?? "";
  return new ApiClient(server || window.location.origin, token);
}

function main(): void {
  const serverInput = el<HTMLInputElement>("server-url");
  const tokenInput = el<HTMLInputElement>("operator-token");
  const tilesInput = el<HTMLInputElement>("tile-template");
  serverInput.value = localStorage.getItem("sarswarm.server") ?? "";
  tokenInput.value = localStorage.getItem("sarswarm.token") ?? "";
  tilesInput.value = localStorage.getItem("sarswarm.tiles") ?? "";

  const map = new MapView(
    el("map"),
    {
      onPolygonChange: (vertices, problems) =>
        missionConsole.setPolygonState(vertices.length, problems),
    },
    tilesInput.value || null,
  );

  const live = new LiveView(map, currentApi, el("live-panel"));
  const results = new ResultsView(el("results-panel"), currentApi, (missionId) => {
    void live.open(missionId);
  });

  const missionConsole = new MissionConsole(
    {
      form: el<HTMLFormElement>("mission-form"),
      userCodes: el<HTMLInputElement>("user-codes"),
      drones: el<HTMLInputElement>("n-drones"),
      altitude: el<HTMLInputElement>("altitude"),
      spacing: el<HTMLInputElement>("spacing"),
      speed: el<HTMLInputElement>("speed"),
      seed: el<HTMLInputElement>("seed"),
      override: el<HTMLInputElement>("weather-override"),
      world: el<HTMLTextAreaElement>("world-json"),
      startButton: el<HTMLButtonElement>("start-button"),
      status: el("console-status"),
    },
    map,
    currentApi,
    (missionId) => {
      void live.open(missionId);
      void results.refresh();
      localStorage.setItem("sarswarm.lastMission", missionId);
    },
  );
  missionConsole.setPolygonState(0, []);

  el("settings-form").addEventListener("change", () => {
    localStorage.setItem("sarswarm.server", serverInput.value.trim());
    localStorage.setItem("sarswarm.token", tokenInput.value.trim());
    localStorage.setItem("sarswarm.tiles", tilesInput.value.trim());
    map.setTileTemplate(tilesInput.value.trim() || null);
  });

  document.querySelectorAll("[data-mode]").forEach((btn) => {
    btn.addEventListener("click", () => {
      document.querySelectorAll("[data-mode]").forEach((b) => b.classList.remove("active"));
      btn.classList.add("active");
      map.setMode((btn as HTMLElement).dataset.mode as "pan" | "draw" | "base");
    });
  });
  el("clear-polygon").addEventListener("click", () => map.clear());

  // reload mid-mission: rebuild the identical view from poll(since=0)
  const last = localStorage.getItem("sarswarm.lastMission");
  if (last) {
    live.open(last).catch(() => localStorage.removeItem("sarswarm.lastMission"));
  }
  void results.refresh().catch(() => undefined);
}

main();
