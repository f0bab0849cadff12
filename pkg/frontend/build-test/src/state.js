/** Fold the server's event feed into the view model.
 *
 * The panel holds no truth of its own: every marker, pin and gallery card
 * derives from events, so replaying poll(since=0) after a reload rebuilds
 * the identical view.
 */
export function initialState() {
    return {
        missionId: null,
        phase: "Created",
        phaseReason: null,
        searchedUserCodes: [],
        cursor: 0,
        simTimeS: 0,
        drones: new Map(),
        trail: [],
        detections: [],
        photos: [],
        eventCount: 0,
    };
}
export function applyEvents(state, events) {
    for (const event of events) {
        if (event.revision <= state.cursor)
            continue; // poll pages may overlap
        state.cursor = event.revision;
        state.eventCount += 1;
        state.simTimeS = Math.max(state.simTimeS, event.t_s);
        switch (event.type) {
            case "phase":
                state.phase = event.phase ?? state.phase;
                state.phaseReason = event.reason ?? null;
                break;
            case "sync":
                state.searchedUserCodes = event.user_codes ?? [];
                break;
            case "telemetry":
                if (event.drone_id !== undefined && event.position) {
                    state.drones.set(event.drone_id, {
                        droneId: event.drone_id,
                        position: event.position,
                        distanceFlownM: event.distance_flown_m ?? 0,
                        lastSeenTs: event.t_s,
                    });
                    state.trail.push({ droneId: event.drone_id, position: event.position, tS: event.t_s });
                }
                break;
            case "detection":
                if (event.drone_id !== undefined && event.position && event.user_code) {
                    state.detections.push({
                        droneId: event.drone_id,
                        userCode: event.user_code,
                        position: event.position,
                        tS: event.t_s,
                    });
                }
                break;
            case "photo":
                if (event.drone_id !== undefined && event.position && event.user_code && event.uri) {
                    state.photos.push({
                        droneId: event.drone_id,
                        userCode: event.user_code,
                        uri: event.uri,
                        position: event.position,
                        tS: event.t_s,
                    });
                }
                break;
            default:
                break; // forward-compatible: unknown event kinds are ignored
        }
    }
    return state;
}
/** Canonical serialization used to compare two reconstructions. */
export function fingerprint(state) {
    return JSON.stringify({
        missionId: state.missionId,
        phase: state.phase,
        reason: state.phaseReason,
        cursor: state.cursor,
        simTimeS: state.simTimeS,
        drones: [...state.drones.values()],
        trailLength: state.trail.length,
        detections: state.detections,
        photos: state.photos,
        eventCount: state.eventCount,
    });
}
/** First detection pin per user, for the results overlay. */
export function firstDetections(state) {
    const firsts = new Map();
    for (const pin of state.detections) {
        if (!firsts.has(pin.userCode))
            firsts.set(pin.userCode, pin);
    }
    return firsts;
}
