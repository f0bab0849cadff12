/** Typed client for the mission service HTTP API. */

import type { GeoPoint } from "./geo.js";

export interface MissionConfigPayload {
  searched_user_codes: string[];
  polygon: { vertices: GeoPoint[] };
  n_drones: number;
  altitude_m: number;
  base: GeoPoint;
  spacing_m?: number;
  speed_mps?: number;
  weather_override?: boolean;
  seed?: number;
  endurance_s?: number;
  tick_s?: number;
}

export interface WorldBeaconPayload {
  user_code: string;
  position: GeoPoint;
  url?: string;
  battery_ok?: boolean;
}

export interface FeedEvent {
  revision: number;
  type: string;
  t_s: number;
  drone_id?: number;
  user_code?: string;
  position?: GeoPoint;
  distance_flown_m?: number;
  phase?: string;
  reason?: string | null;
  uri?: string;
  user_codes?: string[];
}

export interface EventsPage {
  mission_id: string;
  phase: string;
  revision: number;
  events: FeedEvent[];
}

export interface MissionDetail {
  mission_id: string;
  phase: string;
  reason: string | null;
  config: MissionConfigPayload;
  routes: {
    drone_id: number;
    waypoints: GeoPoint[];
    total_length_m: number;
    altitude_m: number;
  }[];
  revision: number;
}

export interface MissionSummary {
  mission_id: string;
  phase: string;
  reason: string | null;
  n_drones: number;
  searched_user_codes: string[];
}

export interface UserResult {
  user_code: string;
  found: boolean;
  first_detection_position: GeoPoint | null;
  first_detection_t_s: number | null;
  photo_uris: string[];
}

export interface MissionResults {
  mission_id: string;
  phase: string;
  reason: string | null;
  users: UserResult[];
  drones: {
    drone_id: number;
    distance_flown_m: number;
    flight_minutes: number;
    planned_length_m: number;
    finished_route: boolean;
  }[];
  planned_total_length_m: number;
  planned_coverage: { per_drone_minutes: number; cumulative_minutes: number } | null;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private token: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const resp = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      const text = await resp.text();
      throw new ApiError(resp.status, `${method} ${path} -> ${resp.status}: ${text}`);
    }
    return (await resp.json()) as T;
  }

  health(): Promise<{ status: string; revision: number }> {
    return this.call("GET", "/health");
  }

  registerUser(profile: {
    name: string;
    surname: string;
    address: string;
    blood_type: string;
  }): Promise<{ user_code: string; short_url_path: string }> {
    return this.call("POST", "/users", profile);
  }

  createMission(
    config: MissionConfigPayload,
    world: WorldBeaconPayload[] = [],
  ): Promise<{ mission_id: string; phase: string }> {
    return this.call("POST", "/missions", { config, world });
  }

  startMission(missionId: string): Promise<{ mission_id: string; phase: string; reason: string | null }> {
    return this.call("POST", `/missions/${missionId}/start`);
  }

  missionDetail(missionId: string): Promise<MissionDetail> {
    return this.call("GET", `/missions/${missionId}`);
  }

  listMissions(): Promise<MissionSummary[]> {
    return this.call("GET", "/missions");
  }

  pollEvents(missionId: string, since: number): Promise<EventsPage> {
    return this.call("GET", `/missions/${missionId}/events?since=${since}`);
  }

  results(missionId: string): Promise<MissionResults> {
    return this.call("GET", `/missions/${missionId}/results`);
  }

  kmlUrl(missionId: string): string {
    return `${this.baseUrl}/missions/${missionId}/kml`;
  }

  async kml(missionId: string): Promise<string> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const resp = await this.fetchFn(this.kmlUrl(missionId), { headers });
    if (!resp.ok) throw new ApiError(resp.status, `kml -> ${resp.status}`);
    return resp.text();
  }

  closeSearch(userCode: string): Promise<{ user_code: string; in_search: boolean }> {
    return this.call("POST", `/users/${userCode}/close-search`);
  }
}
