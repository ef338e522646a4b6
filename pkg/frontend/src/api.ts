// Talking to the bucket service. Every traversal is one GET on the
// pre-encoded link URL; the service answers with a redirect that fetch
// follows straight into the target's JSON display.

import { DisplayLink, DisplayPayload, parsePayload } from "./types.js";
import { ViewState, recordVisit } from "./state.js";

export type Fetcher = (url: string) => Promise<Response>;

function withJsonFormat(url: string): string {
  return url.includes("?") ? `${url}&format=json` : `${url}?format=json`;
}

export async function loadBucket(
  base: string,
  bucket: string,
  state: ViewState,
  fetcher: Fetcher = fetch,
): Promise<DisplayPayload> {
  const url = `${base}/${bucket}?format=json&session=${state.sessionToken}`;
  const response = await fetcher(url);
  if (!response.ok) {
    throw new Error(`display failed: HTTP ${response.status}`);
  }
  const payload = parsePayload(await response.json());
  recordVisit(state, payload);
  return payload;
}

// One traversal per click: while a request is pending, further clicks are
// ignored (returns null). On failure the state is left unchanged apart
// from the error note, so the same link can simply be clicked again.
export async function followLink(
  base: string,
  link: DisplayLink,
  state: ViewState,
  fetcher: Fetcher = fetch,
): Promise<DisplayPayload | null> {
  if (state.pending) return null;
  state.pending = true;
  try {
    const response = await fetcher(base + withJsonFormat(link.url));
    if (!response.ok) {
      throw new Error(`traversal failed: HTTP ${response.status}`);
    }
    const payload = parsePayload(await response.json());
    recordVisit(state, payload);
    return payload;
  } catch (err) {
    state.error = err instanceof Error ? err.message : String(err);
    return null;
  } finally {
    state.pending = false;
  }
}
