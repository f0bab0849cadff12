/** Live view: one poll loop per open mission, rendering from folded events. */
import { buildOverlays } from "./overlays.js";
import { applyEvents, initialState } from "./state.js";
export class LiveView {
    constructor(map, api, panel, pollMs = 1000) {
        this.map = map;
        this.api = api;
        this.panel = panel;
        this.pollMs = pollMs;
        this.timer = null;
        this.state = initialState();
        this.detail = null;
    }
    /** (Re)open a mission; state always rebuilds from poll(since=0). */
    async open(missionId) {
        this.close();
        this.state = initialState();
        this.state.missionId = missionId;
        this.detail = await this.api().missionDetail(missionId);
        await this.pollOnce();
        this.timer = window.setInterval(() => void this.pollOnce(), this.pollMs);
    }
    close() {
        if (this.timer !== null) {
            window.clearInterval(this.timer);
            this.timer = null;
        }
    }
    getState() {
        return this.state;
    }
    async pollOnce() {
        if (!this.state.missionId)
            return;
        const page = await this.api().pollEvents(this.state.missionId, this.state.cursor);
        applyEvents(this.state, page.events);
        this.state.phase = page.phase;
        this.render();
        if (["Completed", "Aborted", "CancelledWeather"].includes(page.phase)) {
            this.close();
        }
    }
    render() {
        this.map.setOverlays(buildOverlays(this.map, this.detail, this.state));
        const s = this.state;
        const found = new Set(s.detections.map((d) => d.userCode));
        this.panel.innerHTML = `
      <div class="live-head">
        <span class="phase phase-${s.phase}">${s.phase}</span>
        <span>t = ${s.simTimeS.toFixed(0)} s</span>
        <span>${s.eventCount} events</span>
      </div>
      <div>searching: ${s.searchedUserCodes
            .map((c) => `<code class="${found.has(c) ? "found" : ""}">${c.slice(0, 8)}</code>`)
            .join(" ")}</div>
      <div>${[...s.drones.values()]
            .map((d) => `<div class="drone-row">drone ${d.droneId}: ${(d.distanceFlownM / 1000).toFixed(2)} km flown</div>`)
            .join("")}</div>
      <div>${s.detections.length} detection(s), ${s.photos.length} photo(s)</div>
    `;
    }
}
