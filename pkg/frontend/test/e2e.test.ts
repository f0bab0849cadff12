/** End-to-end against the real mission service: spawn the Python server,
 * drive it exactly as the panel does, and check the secondary acceptance
 * path (polygon round-trip, detection pin, gallery, reload reconstruction).
 */

import assert from "node:assert/strict";
import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { after, before, test } from "node:test";

import { ApiClient } from "../src/api.js";
import { polygonPayload, polygonProblems, sameVertices } from "../src/geo.js";
import { applyEvents, fingerprint, initialState } from "../src/state.js";

const TOKEN = "e2e-token";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const addr = srv.address();
      if (addr && typeof addr === "object") {
        const port = addr.port;
        srv.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

let proc: ChildProcess | null = null;
let baseUrl = "";

before(async () => {
  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  const dir = mkdtempSync(join(tmpdir(), "sarswarm-e2e-"));
  const configPath = join(dir, "config.json");
  const encKey = Array.from({ length: 32 }, (_, i) => i.toString(16).padStart(2, "0")).join("");
  const macKey = Array.from({ length: 32 }, (_, i) => (i + 32).toString(16).padStart(2, "0")).join("");
  writeFileSync(
    configPath,
    JSON.stringify({
      enc_key_hex: encKey,
      mac_key_hex: macKey,
      operator_token: TOKEN,
      store_path: join(dir, "store.json"),
      realtime_factor: 0,
      stub_wind_mps: 1.0,
      stub_precipitation: 0.0,
    }),
  );
  proc = spawn(
    "python3",
    ["-m", "sarswarm.cli", "serve", "--config", configPath, "--host", "127.0.0.1", "--port", String(port)],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  let stderr = "";
  proc.stderr?.on("data", (d) => (stderr += String(d)));

  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const resp = await fetch(`${baseUrl}/health`);
      if (resp.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      throw new Error(`server did not start: ${stderr.slice(-2000)}`);
    }
    await new Promise((r) => setTimeout(r, 150));
  }
}, { timeout: 60_000 });

after(() => {
  proc?.kill("SIGTERM");
});

test("scripted mission through the real API", { timeout: 60_000 }, async () => {
  const api = new ApiClient(baseUrl, TOKEN);

  const user = await api.registerUser({
    name: "Eva",
    surname: "Prueba",
    address: "Camino Real 9",
    blood_type: "0-",
  });

  // polygon exactly as the editor emits it (~300 m x 300 m box)
  const drawn = [
    { lat: 28.0, lon: -16.0 },
    { lat: 28.0, lon: -15.99695 },
    { lat: 28.0027, lon: -15.99695 },
    { lat: 28.0027, lon: -16.0 },
  ];
  assert.deepEqual(polygonProblems(drawn), []);
  const polygon = polygonPayload(drawn);

  const created = await api.createMission(
    {
      searched_user_codes: [user.user_code],
      polygon,
      n_drones: 2,
      altitude_m: 10,
      base: { lat: 28.0, lon: -16.0, alt_m: 0 },
      spacing_m: 50,
      speed_mps: 5,
      seed: 12,
    },
    [{ user_code: user.user_code, position: { lat: 28.0013, lon: -15.9985, alt_m: 0 } }],
  );

  // round trip: the server's parsed polygon matches vertex-for-vertex
  const detail = await api.missionDetail(created.mission_id);
  assert.ok(sameVertices(detail.config.polygon.vertices, polygon.vertices));

  const started = await api.startMission(created.mission_id);
  assert.equal(started.phase, "Completed");

  // reload during/after the mission: rebuild everything from poll(since=0)
  const full = await api.pollEvents(created.mission_id, 0);
  const state = applyEvents(initialState(), full.events);
  assert.equal(state.phase, "Completed");
  assert.ok(state.detections.length >= 1, "expected a detection pin");
  assert.ok(state.photos.length >= 3, "expected gallery photo events");
  assert.equal(state.drones.size, 2);

  // a second client folding two cursor pages reconstructs identical state
  const mid = full.events[Math.floor(full.events.length / 2)].revision;
  const page1 = await api.pollEvents(created.mission_id, 0);
  const head = page1.events.filter((e) => e.revision <= mid);
  const page2 = await api.pollEvents(created.mission_id, mid);
  const rebuilt = applyEvents(applyEvents(initialState(), head), page2.events);
  assert.equal(fingerprint(rebuilt), fingerprint(state));

  // gallery data matches the results endpoint
  const results = await api.results(created.mission_id);
  assert.equal(results.users[0].found, true);
  assert.ok(results.users[0].photo_uris.length >= 3);
  const galleryUris = new Set(state.photos.map((p) => p.uri));
  for (const uri of results.users[0].photo_uris) {
    assert.ok(galleryUris.has(uri));
  }

  const kml = await api.kml(created.mission_id);
  assert.ok(kml.startsWith("<?xml"));
  assert.ok(kml.includes("<LineString>"));

  const closed = await api.closeSearch(user.user_code);
  assert.equal(closed.in_search, false);
});
