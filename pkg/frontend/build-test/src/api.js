/** Typed client for the mission service HTTP API. */
export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
export class ApiClient {
    constructor(baseUrl, token, fetchFn = fetch) {
        this.baseUrl = baseUrl;
        this.token = token;
        this.fetchFn = fetchFn;
    }
    async call(method, path, body) {
        const headers = { "Content-Type": "application/json" };
        if (this.token)
            headers["Authorization"] = `Bearer ${this.token}`;
        const resp = await this.fetchFn(this.baseUrl + path, {
            method,
            headers,
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        if (!resp.ok) {
            const text = await resp.text();
            throw new ApiError(resp.status, `${method} ${path} -> ${resp.status}: ${text}`);
        }
        return (await resp.json());
    }
    health() {
        return this.call("GET", "/health");
    }
    registerUser(profile) {
        return this.call("POST", "/users", profile);
    }
    createMission(config, world = []) {
        return this.call("POST", "/missions", { config, world });
    }
    startMission(missionId) {
        return this.call("POST", `/missions/${missionId}/start`);
    }
    missionDetail(missionId) {
        return this.call("GET", `/missions/${missionId}`);
    }
    listMissions() {
        return this.call("GET", "/missions");
    }
    pollEvents(missionId, since) {
        return this.call("GET", `/missions/${missionId}/events?since=${since}`);
    }
    results(missionId) {
        return this.call("GET", `/missions/${missionId}/results`);
    }
    kmlUrl(missionId) {
        return `${this.baseUrl}/missions/${missionId}/kml`;
    }
    async kml(missionId) {
        const headers = {};
        if (this.token)
            headers["Authorization"] = `Bearer ${this.token}`;
        const resp = await this.fetchFn(this.kmlUrl(missionId), { headers });
        if (!resp.ok)
            throw new ApiError(resp.status, `kml -> ${resp.status}`);
        return resp.text();
    }
    closeSearch(userCode) {
        return this.call("POST", `/users/${userCode}/close-search`);
    }
}
