import assert from "node:assert/strict";
import { test } from "node:test";
import { ApiClient, ApiError } from "../src/api.js";
function stubFetch(status, payload, log) {
    return (async (input, init) => {
        log.push({
            url: String(input),
            method: init?.method ?? "GET",
            headers: (init?.headers ?? {}),
            body: init?.body,
        });
        return {
            ok: status < 400,
            status,
            json: async () => payload,
            text: async () => JSON.stringify(payload),
        };
    });
}
test("bearer token and JSON body are sent", async () => {
    const log = [];
    const api = new ApiClient("http://server", "tok", stubFetch(201, { mission_id: "m", phase: "Created" }, log));
    const created = await api.createMission({
        searched_user_codes: ["u"],
        polygon: { vertices: [] },
        n_drones: 1,
        altitude_m: 10,
        base: { lat: 0, lon: 0 },
    }, []);
    assert.equal(created.mission_id, "m");
    assert.equal(log[0].url, "http://server/missions");
    assert.equal(log[0].method, "POST");
    assert.equal(log[0].headers["Authorization"], "Bearer tok");
    const body = JSON.parse(log[0].body ?? "{}");
    assert.deepEqual(body.world, []);
    assert.equal(body.config.n_drones, 1);
});
test("poll builds the cursor query", async () => {
    const log = [];
    const api = new ApiClient("http://server", "", stubFetch(200, { events: [], revision: 4, phase: "Flying", mission_id: "m" }, log));
    const page = await api.pollEvents("m", 17);
    assert.equal(page.revision, 4);
    assert.equal(log[0].url, "http://server/missions/m/events?since=17");
    assert.equal(log[0].headers["Authorization"], undefined);
});
test("non-2xx raises ApiError with status", async () => {
    const api = new ApiClient("http://server", "tok", stubFetch(409, { detail: "nope" }, []));
    await assert.rejects(() => api.startMission("m"), (err) => err instanceof ApiError && err.status === 409);
});
