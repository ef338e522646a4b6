// @vitest-environment jsdom
//
// The live loop: a real bucket service in a child process, real HTTP.
// Clicking b000 -> target and revisiting b000 must show the target
// promoted, with the rendered order byte-identical to the payload order.
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { followLink, loadBucket } from "../src/api.js";
import { newViewState } from "../src/state.js";
import { renderBucket } from "../src/render.js";

const PY = `
import sys
from bucketnet import BucketService, init_network, make_server
from bucketnet.store import BucketStore

data_dir = sys.argv[1]
store = BucketStore(data_dir)
init_network(8, 3, 0.5, seed=12, store=store)
server = make_server(BucketService(store), "127.0.0.1", 0)
print(server.server_address[1], flush=True)
server.serve_forever()
`;

let child: ChildProcess;
let base = "";

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "bucketnet-e2e-"));
  child = spawn("python3", ["-c", PY, dataDir], { stdio: ["ignore", "pipe", "inherit"] });
  const port = await new Promise<string>((resolve, reject) => {
    child.stdout!.once("data", (chunk) => resolve(String(chunk).trim()));
    child.once("exit", (code) => reject(new Error(`service died: ${code}`)));
  });
  base = `http://127.0.0.1:${port}`;
}, 20_000);

afterAll(() => {
  child?.kill();
});

describe("browsing loop against a live service", () => {
  it("promotes a clicked link on revisit, rendering payload order exactly", async () => {
    const state = newViewState("e2e-session");
    const before = await loadBucket(base, "b000", state);
    expect(before.links.length).toBe(3);

    // All initial links weigh 0.5; pick the one ranked last.
    const chosen = before.links[before.links.length - 1];
    const afterClick = await followLink(base, chosen, state);
    expect(afterClick?.bucket).toBe(chosen.target);
    expect(state.breadcrumb).toEqual(["b000", chosen.target]);

    // Walk back to the portal through its link (the reverse link exists
    // now thanks to symmetry reinforcement).
    const backLink = afterClick!.links.find((l) => l.target === "b000");
    expect(backLink).toBeDefined();
    const revisit = await followLink(base, backLink!, state);
    expect(revisit?.bucket).toBe("b000");

    // The clicked bucket moved from last place to the top.
    expect(revisit!.links[0].target).toBe(chosen.target);
    expect(revisit!.links[0].weight).toBeGreaterThan(1.0);

    // Rendered order is byte-identical to payload order.
    const root = document.createElement("div");
    renderBucket(root, revisit!, state, { onLink: () => {} });
    const rendered = [...root.querySelectorAll("a")].map((a) => a.dataset.target);
    expect(rendered).toEqual(revisit!.links.map((l) => l.target));
  }, 20_000);

  it("keeps displayed order identical to the analytics ranking", async () => {
    const state = newViewState("e2e-session-2");
    const payload = await loadBucket(base, "b000", state);
    const weights = payload.links.map((l) => l.weight);
    const sorted = [...weights].sort((a, b) => b - a);
    expect(weights).toEqual(sorted);
  });
});
