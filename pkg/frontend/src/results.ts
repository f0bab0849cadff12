/** Results browser: past missions, per-user outcome, photo gallery, KML. */

import { ApiClient } from "./api.js";

function photoThumb(uri: string): string {
  // placeholder photo records render as generated thumbnails
  const hue = [...uri].reduce((h, ch) => (h * 31 + ch.charCodeAt(0)) % 360, 7);
  const svg =
    `<svg xmlns='http://www.w3.org/2000/svg' width='96' height='72'>` +
    `<rect width='96' height='72' fill='hsl(${hue},45%,35%)'/>` +
    `<circle cx='48' cy='36' r='14' fill='hsl(${hue},60%,70%)'/></svg>`;
  return `data:image/svg+xml;utf8,${encodeURIComponent(svg)}`;
}

export class ResultsView {
  constructor(
    private root: HTMLElement,
    private api: () => ApiClient,
    private onOpenLive: (missionId: string) => void,
  ) {}

  async refresh(): Promise<void> {
    const missions = await this.api().listMissions();
    if (!missions.length) {
      this.root.innerHTML = `<p class="hint">no missions yet</p>`;
      return;
    }
    const rows = missions
      .map(
        (m) => `
        <tr data-mission="${m.mission_id}">
          <td><code>${m.mission_id.slice(0, 8)}</code></td>
          <td class="phase-${m.phase}">${m.phase}</td>
          <td>${m.n_drones}</td>
          <td>${m.searched_user_codes.map((c) => c.slice(0, 8)).join(", ")}</td>
          <td><button data-open="${m.mission_id}">open</button></td>
        </tr>`,
      )
      .join("");
    this.root.innerHTML = `
      <table class="missions">
        <thead><tr><th>id</th><th>phase</th><th>drones</th><th>searched</th><th></th></tr></thead>
        <tbody>${rows}</tbody>
      </table>
      <div id="mission-results"></div>`;
    this.root.querySelectorAll("button[data-open]").forEach((btn) => {
      btn.addEventListener("click", () => {
        const id = (btn as HTMLButtonElement).dataset.open as string;
        void this.showMission(id);
      });
    });
  }

  private async showMission(missionId: string): Promise<void> {
    const target = this.root.querySelector("#mission-results") as HTMLElement;
    let body: string;
    try {
      const res = await this.api().results(missionId);
      const users = res.users
        .map((u) => {
          const gallery = u.photo_uris
            .map(
              (uri) =>
                `<figure class="photo"><img src="${photoThumb(uri)}" alt=""><figcaption>${uri}</figcaption></figure>`,
            )
            .join("");
          const where = u.first_detection_position
            ? `${u.first_detection_position.lat.toFixed(5)}, ${u.first_detection_position.lon.toFixed(5)}
               at t=${u.first_detection_t_s} s`
            : "";
          return `
            <div class="user-result ${u.found ? "found" : "missing"}">
              <h4>${u.user_code.slice(0, 12)}: ${u.found ? "FOUND" : "not found"}</h4>
              <p>${where}</p>
              <div class="gallery">${gallery}</div>
            </div>`;
        })
        .join("");
      const drones = res.drones
        .map(
          (d) =>
            `<li>drone ${d.drone_id}: ${(d.distance_flown_m / 1000).toFixed(2)} km in ` +
            `${d.flight_minutes.toFixed(1)} min (planned ${(d.planned_length_m / 1000).toFixed(2)} km)</li>`,
        )
        .join("");
      const coverage = res.planned_coverage
        ? `<p>planned sweep: ${res.planned_coverage.per_drone_minutes.toFixed(1)} min/drone, ` +
          `${res.planned_coverage.cumulative_minutes.toFixed(1)} min cumulative</p>`
        : "";
      body = `
        <h3>${res.phase}${res.reason ? ` (${res.reason})` : ""}</h3>
        ${users}
        <ul>${drones}</ul>
        ${coverage}
        <p><a href="${this.api().kmlUrl(missionId)}" download="mission.kml">download KML</a>
           <button data-live>replay live view</button></p>`;
    } catch (err) {
      body = `<p class="status error">${err instanceof Error ? err.message : err}</p>`;
    }
    target.innerHTML = body;
    target.querySelector("button[data-live]")?.addEventListener("click", () => {
      this.onOpenLive(missionId);
    });
  }
}
