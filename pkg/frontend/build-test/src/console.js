/** Mission console: configure, validate and launch a mission. */
import { polygonPayload } from "./geo.js";
export class MissionConsole {
    constructor(els, map, api, onLaunched) {
        this.els = els;
        this.map = map;
        this.api = api;
        this.onLaunched = onLaunched;
        this.polygonOk = false;
        els.form.addEventListener("submit", (ev) => {
            ev.preventDefault();
            void this.launch();
        });
    }
    setPolygonState(vertexCount, problems) {
        this.polygonOk = vertexCount >= 3 && problems.length === 0;
        if (vertexCount === 0) {
            this.status("draw the search area on the map", "hint");
        }
        else if (problems.length) {
            this.status(problems.join("; "), "error");
        }
        else if (!this.map.getBase()) {
            this.status("set the base point (base mode, then click the map)", "hint");
        }
        else {
            this.status("ready to start", "ok");
        }
        this.els.startButton.disabled = !this.polygonOk;
    }
    buildConfig() {
        const codes = this.els.userCodes.value
            .split(",")
            .map((s) => s.trim())
            .filter(Boolean);
        const base = this.map.getBase();
        if (!base)
            throw new Error("base point is not set");
        return {
            searched_user_codes: codes,
            polygon: polygonPayload(this.map.getPolygon()),
            n_drones: Number(this.els.drones.value),
            altitude_m: Number(this.els.altitude.value),
            base: { lat: base.lat, lon: base.lon, alt_m: 0 },
            spacing_m: Number(this.els.spacing.value),
            speed_mps: Number(this.els.speed.value),
            weather_override: this.els.override.checked,
            seed: Number(this.els.seed.value),
        };
    }
    parseWorld() {
        const raw = this.els.world.value.trim();
        if (!raw)
            return [];
        const parsed = JSON.parse(raw);
        if (!Array.isArray(parsed))
            throw new Error("world must be a JSON array of beacons");
        return parsed;
    }
    async launch() {
        let config;
        let world;
        try {
            config = this.buildConfig();
            world = this.parseWorld();
            if (!config.searched_user_codes.length) {
                throw new Error("enter at least one searched user code");
            }
        }
        catch (err) {
            this.status(String(err instanceof Error ? err.message : err), "error");
            return;
        }
        try {
            this.status("creating mission...", "hint");
            const created = await this.api().createMission(config, world);
            this.status("weather check + planning...", "hint");
            const started = await this.api().startMission(created.mission_id);
            if (started.phase === "CancelledWeather") {
                this.status(`cancelled by weather: ${started.reason ?? "no-go"}`, "error");
            }
            else {
                this.status(`mission ${created.mission_id.slice(0, 8)} ${started.phase}`, "ok");
            }
            this.onLaunched(created.mission_id, started.phase, started.reason);
        }
        catch (err) {
            this.status(String(err instanceof Error ? err.message : err), "error");
        }
    }
    status(text, kind) {
        this.els.status.textContent = text;
        this.els.status.className = `status ${kind}`;
    }
}
