/** Operator panel entry point: wires map, console, live view and results. */
import { ApiClient } from "./api.js";
import { MissionConsole } from "./console.js";
import { LiveView } from "./live.js";
import { MapView } from "./map.js";
import { ResultsView } from "./results.js";
function el(id) {
    const found = document.getElementById(id);
    if (!found)
        throw new Error(`missing element #${id}`);
    return found;
}
function currentApi() {
    const server = (localStorage.getItem("sarswarm.server") ?? "").replace(/\/$/, "");
    const token = localStorage.getItem("sarswarm.token") ?? "";
    return new ApiClient(server || window.location.origin, token);
}
function main() {
    const serverInput = el("server-url");
    const tokenInput = el("operator-token");
    const tilesInput = el("tile-template");
    serverInput.value = localStorage.getItem("sarswarm.server") ?? "";
    tokenInput.value = localStorage.getItem("sarswarm.token") ?? "";
    tilesInput.value = localStorage.getItem("sarswarm.tiles") ?? "";
    const map = new MapView(el("map"), {
        onPolygonChange: (vertices, problems) => missionConsole.setPolygonState(vertices.length, problems),
    }, tilesInput.value || null);
    const live = new LiveView(map, currentApi, el("live-panel"));
    const results = new ResultsView(el("results-panel"), currentApi, (missionId) => {
        void live.open(missionId);
    });
    const missionConsole = new MissionConsole({
        form: el("mission-form"),
        userCodes: el("user-codes"),
        drones: el("n-drones"),
        altitude: el("altitude"),
        spacing: el("spacing"),
        speed: el("speed"),
        seed: el("seed"),
        override: el("weather-override"),
        world: el("world-json"),
        startButton: el("start-button"),
        status: el("console-status"),
    }, map, currentApi, (missionId) => {
        void live.open(missionId);
        void results.refresh();
        localStorage.setItem("sarswarm.lastMission", missionId);
    });
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
            map.setMode(btn.dataset.mode);
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
