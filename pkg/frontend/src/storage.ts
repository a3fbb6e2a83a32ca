import type { SessionSnapshot } from "./session";

// Minimal Storage surface so tests can inject an in-memory stand-in.
export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

const KEY = (expertId: string) => `gridobs:session:${expertId}`;
const ROSTER = "gridobs:sessions";

export function saveSession(store: KeyValueStore, snapshot: SessionSnapshot): void {
  try {
    store.setItem(KEY(snapshot.expert_id), JSON.stringify(snapshot));
    const roster = listSessions(store);
    if (!roster.includes(snapshot.expert_id)) {
      store.setItem(ROSTER, JSON.stringify([...roster, snapshot.expert_id]));
    }
  } catch {
    // quota or privacy mode: autosave is best-effort
  }
}

export function loadSession(store: KeyValueStore, expertId: string): SessionSnapshot | null {
  try {
    const raw = store.getItem(KEY(expertId));
    if (!raw) return null;
    const parsed = JSON.parse(raw);
    if (typeof parsed?.expert_id !== "string" || typeof parsed?.judgments !== "object") {
      return null;
    }
    return parsed as SessionSnapshot;
  } catch {
    return null;
  }
}

export function clearSession(store: KeyValueStore, expertId: string): void {
  try {
    store.removeItem(KEY(expertId));
    const roster = listSessions(store).filter((id) => id !== expertId);
    store.setItem(ROSTER, JSON.stringify(roster));
  } catch {
    // ignore
  }
}

export function listSessions(store: KeyValueStore): string[] {
  try {
    const raw = store.getItem(ROSTER);
    const parsed = raw ? JSON.parse(raw) : [];
    return Array.isArray(parsed) ? parsed.filter((x) => typeof x === "string") : [];
  } catch {
    return [];
  }
}
