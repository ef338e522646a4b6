// Entry point: read service/portal from the query string and start.

import { startApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("service") ?? "http://127.0.0.1:8400";
const portal = params.get("portal") ?? "b000";

startApp({
  base,
  portal,
  view: document.getElementById("view")!,
  crumbs: document.getElementById("crumbs")!,
  errors: document.getElementById("errors")!,
  weightToggle: document.getElementById("show-weights") as HTMLInputElement,
});
