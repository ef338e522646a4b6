// Rendering a bucket view. The link list is built by iterating the
// payload's array as-is: the client never reorders or filters what the
// service ranked.

import { DisplayPayload } from "./types.js";
import { ViewState } from "./state.js";

export interface RenderHandlers {
  onLink: (index: number, anchor: HTMLAnchorElement) => void;
}

export function renderBucket(
  root: HTMLElement,
  payload: DisplayPayload,
  state: ViewState,
  handlers: RenderHandlers,
): void {
  root.replaceChildren();

  const title = document.createElement("h1");
  title.textContent = payload.title;
  root.appendChild(title);

  if (payload.metadata.length > 0) {
    const meta = document.createElement("dl");
    meta.className = "metadata";
    for (const [key, value] of payload.metadata) {
      const dt = document.createElement("dt");
      dt.textContent = key;
      const dd = document.createElement("dd");
      dd.textContent = value;
      meta.append(dt, dd);
    }
    root.appendChild(meta);
  }

  if (payload.links.length === 0) {
    const notice = document.createElement("p");
    notice.className = "empty-notice";
    notice.textContent = "no related buckets";
    root.appendChild(notice);
    return;
  }

  const list = document.createElement("ol");
  list.className = "links";
  payload.links.forEach((link, index) => {
    const item = document.createElement("li");
    const anchor = document.createElement("a");
    anchor.textContent = link.name;
    anchor.href = link.url;
    anchor.dataset.target = link.target;
    if (state.pending) anchor.classList.add("disabled");
    if (state.showWeights) {
      const badge = document.createElement("span");
      badge.className = "weight-badge";
      badge.textContent = ` (${link.weight})`;
      anchor.appendChild(badge);
    }
    anchor.addEventListener("click", (event) => {
      event.preventDefault();
      handlers.onLink(index, anchor);
    });
    item.appendChild(anchor);
    list.appendChild(item);
  });
  root.appendChild(list);
}

export function renderBreadcrumb(root: HTMLElement, state: ViewState): void {
  root.replaceChildren();
  root.textContent = state.breadcrumb.join(" > ");
}

export function renderError(root: HTMLElement, message: string, retry: () => void): void {
  root.replaceChildren();
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.textContent = message;
  const button = document.createElement("button");
  button.textContent = "retry";
  button.addEventListener("click", retry);
  banner.appendChild(button);
  root.appendChild(banner);
}
