// Wiring: one ViewState, one click handler, one in-flight request at most.

import { followLink, loadBucket } from "./api.js";
import { newViewState, sessionToken } from "./state.js";
import { renderBreadcrumb, renderBucket, renderError } from "./render.js";
import { DisplayPayload } from "./types.js";

export interface AppOptions {
  base: string;       // service origin, e.g. http://127.0.0.1:8400
  portal: string;     // bucket to open first
  view: HTMLElement;
  crumbs: HTMLElement;
  errors: HTMLElement;
  weightToggle?: HTMLInputElement;
}

export function startApp(options: AppOptions) {
  const state = newViewState(sessionToken());

  function show(payload: DisplayPayload): void {
    options.errors.replaceChildren();
    renderBucket(options.view, payload, state, {
      onLink: (index) => {
        void click(index);
      },
    });
    renderBreadcrumb(options.crumbs, state);
  }

  async function click(index: number): Promise<void> {
    const current = state.current;
    if (!current) return;
    const link = current.links[index];
    const payload = await followLink(options.base, link, state);
    if (payload) {
      show(payload);
    } else if (state.error) {
      renderError(options.errors, state.error, () => void click(index));
    }
  }

  async function open(bucket: string): Promise<void> {
    try {
      const payload = await loadBucket(options.base, bucket, state);
      show(payload);
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      renderError(options.errors, message, () => void open(bucket));
    }
  }

  options.weightToggle?.addEventListener("change", () => {
    state.showWeights = options.weightToggle!.checked;
    if (state.current) show(state.current);
  });

  void open(options.portal);
  return { state, open, click };
}
