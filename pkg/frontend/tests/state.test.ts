// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { followLink } from "../src/api.js";
import { BREADCRUMB_LIMIT, newViewState, recordVisit } from "../src/state.js";
import { DisplayLink, DisplayPayload } from "../src/types.js";

function payload(bucket: string): DisplayPayload {
  return { bucket, title: bucket, metadata: [], links: [], session: "s" };
}

const link: DisplayLink = {
  name: "Bucket b2",
  url: "/b1?method=display&referer=b1&redirect=%2Fb2%3Fmethod%3Ddisplay&session=s",
  weight: 0.5,
  target: "b2",
};

function jsonResponse(body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status: 200,
    headers: { "Content-Type": "application/json" },
  });
}

describe("breadcrumb", () => {
  it("keeps visit order and at most the last ten entries", () => {
    const state = newViewState("s");
    for (let i = 0; i < 14; i++) recordVisit(state, payload(`b${i}`));
    expect(state.breadcrumb.length).toBe(BREADCRUMB_LIMIT);
    expect(state.breadcrumb[0]).toBe("b4");
    expect(state.breadcrumb.at(-1)).toBe("b13");
  });
});

describe("followLink", () => {
  it("issues exactly one request per click and updates state", async () => {
    const state = newViewState("s");
    const urls: string[] = [];
    const result = await followLink("http://svc", link, state, async (url) => {
      urls.push(url);
      return jsonResponse(payload("b2"));
    });
    expect(result?.bucket).toBe("b2");
    expect(state.current?.bucket).toBe("b2");
    expect(state.breadcrumb).toEqual(["b2"]);
    expect(urls).toEqual([
      "http://svc/b1?method=display&referer=b1&redirect=%2Fb2%3Fmethod%3Ddisplay&session=s&format=json",
    ]);
  });

  it("ignores a second click while one traversal is pending", async () => {
    const state = newViewState("s");
    let release: (r: Response) => void = () => {};
    const gate = new Promise<Response>((resolve) => (release = resolve));
    let calls = 0;
    const fetcher = () => {
      calls++;
      return gate;
    };
    const first = followLink("http://svc", link, state, fetcher);
    const second = await followLink("http://svc", link, state, fetcher);
    expect(second).toBeNull();
    expect(calls).toBe(1);
    release(jsonResponse(payload("b2")));
    expect((await first)?.bucket).toBe("b2");
  });

  it("leaves state unchanged on network failure, recording the error", async () => {
    const state = newViewState("s");
    recordVisit(state, payload("b1"));
    const before = { ...state, breadcrumb: [...state.breadcrumb] };
    const result = await followLink("http://svc", link, state, async () => {
      throw new Error("connection refused");
    });
    expect(result).toBeNull();
    expect(state.current?.bucket).toBe(before.current?.bucket);
    expect(state.breadcrumb).toEqual(before.breadcrumb);
    expect(state.pending).toBe(false);
    expect(state.error).toContain("connection refused");
  });

  it("treats an HTTP error as a failure too", async () => {
    const state = newViewState("s");
    const result = await followLink("http://svc", link, state, async () =>
      new Response("gone", { status: 404 }),
    );
    expect(result).toBeNull();
    expect(state.error).toContain("404");
  });
});
