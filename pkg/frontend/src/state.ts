// Client-side view state: the displayed bucket, the session token that
// ties the user's hops together, and a short visit breadcrumb.

import { DisplayPayload } from "./types.js";

export const BREADCRUMB_LIMIT = 10;

export interface ViewState {
  current: DisplayPayload | null;
  sessionToken: string;
  breadcrumb: string[];
  showWeights: boolean;
  pending: boolean;
  error: string | null;
}

export function newViewState(sessionToken: string): ViewState {
  return {
    current: null,
    sessionToken,
    breadcrumb: [],
    showWeights: false,
    pending: false,
    error: null,
  };
}

export function recordVisit(state: ViewState, payload: DisplayPayload): void {
  state.current = payload;
  state.breadcrumb.push(payload.bucket);
  if (state.breadcrumb.length > BREADCRUMB_LIMIT) {
    state.breadcrumb.splice(0, state.breadcrumb.length - BREADCRUMB_LIMIT);
  }
  state.error = null;
}

export function randomToken(): string {
  const bytes = new Uint8Array(8);
  crypto.getRandomValues(bytes);
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

// The token survives reloads within one browsing session.
export function sessionToken(storage?: Storage): string {
  const store = storage ?? globalThis.sessionStorage;
  const existing = store?.getItem("bucketnet-session");
  if (existing) return existing;
  const token = randomToken();
  store?.setItem("bucketnet-session", token);
  return token;
}
