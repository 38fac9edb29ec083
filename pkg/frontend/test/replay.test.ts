/**
 * Replays a recorded service session (test/fixtures/session.json, captured
 * against the bundled 2-2-2 demo model) through the real client and state
 * layer, with fetch stubbed to answer from the recording.  Checks the three
 * behaviours the UI is on the hook for:
 *
 *   - constraint text shown in the panels is byte-for-byte the service's;
 *   - the four quadrant clicks produce the expected badge + signature chip;
 *   - a distance-1 why-not highlights exactly one hyperplane.
 */

import { describe, expect, it } from "vitest";
import { ApiClient, ApiError } from "../src/api.js";
import type { FetchLike, WhyNotResponse, WhyResponse } from "../src/api.js";
import {
  applyModel,
  applyPrediction,
  applyRegions,
  applyWhy,
  applyWhyNot,
  badge,
  cachedRegions,
  highlightSegments,
  initialState,
  modelKey,
  whyLines,
  whyNotLines,
  whyNotWitness,
  type ViewState,
} from "../src/state.js";
import sessionData from "./fixtures/session.json";

interface SessionEntry {
  method: string;
  path: string;
  body: unknown;
  status: number;
  response: Record<string, unknown>;
}

const session = sessionData as SessionEntry[];

function deepEqual(a: unknown, b: unknown): boolean {
  if (a === b) return true;
  if (Array.isArray(a) && Array.isArray(b)) {
    return a.length === b.length && a.every((v, i) => deepEqual(v, b[i]));
  }
  if (a !== null && b !== null && typeof a === "object" && typeof b === "object") {
    const ka = Object.keys(a as object).sort();
    const kb = Object.keys(b as object).sort();
    return (
      deepEqual(ka, kb) &&
      ka.every((k) =>
        deepEqual((a as Record<string, unknown>)[k], (b as Record<string, unknown>)[k]),
      )
    );
  }
  return false;
}

/** Serve requests from the recording; throw on anything not recorded. */
function replayFetch(): FetchLike {
  return async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body as string) : null;
    const hit = session.find(
      (e) => e.method === method && e.path === url && deepEqual(e.body, body),
    );
    if (hit === undefined) {
      throw new Error(`no recorded exchange for ${method} ${url} ${init?.body ?? ""}`);
    }
    return new Response(JSON.stringify(hit.response), {
      status: hit.status,
      headers: { "Content-Type": "application/json" },
    });
  };
}

function recorded(path: string): SessionEntry {
  const hit = session.find((e) => e.path === path);
  if (hit === undefined) throw new Error(`fixture has no entry for ${path}`);
  return hit;
}

describe("recorded session replay", () => {
  async function loadedState(client: ApiClient): Promise<ViewState> {
    const info = await client.getModel();
    return applyModel(initialState(), info);
  }

  it("one click per quadrant yields the expected badge and chip", async () => {
    const client = new ApiClient("", replayFetch());
    let state = await loadedState(client);

    const clicks: Array<{ input: number[]; label: string; chip: string }> = [
      { input: [1.0, 0.5], label: "class_0", chip: "11" },
      { input: [-1.0, 1.0], label: "class_1", chip: "01" },
      { input: [-1.0, -1.0], label: "class_0", chip: "00" },
      { input: [1.0, -1.0], label: "class_0", chip: "10" },
    ];
    for (const click of clicks) {
      const resp = await client.predict(click.input);
      state = applyPrediction(state, click.input, resp);
      expect(badge(state)).toEqual({ label: click.label, chip: click.chip });
    }
  });

  it("why panel lines are byte-for-byte the service's constraint text", async () => {
    const client = new ApiClient("", replayFetch());
    let state = await loadedState(client);
    state = applyPrediction(state, [1.0, -1.0], await client.predict([1.0, -1.0]));

    const resp = await client.explainWhy([1.0, -1.0], true);
    state = applyWhy(state, resp);
    expect(state.why).not.toBeNull();

    const want = recorded("/explain/why").response as unknown as WhyResponse;
    const lines = whyLines(state);
    expect(lines.length).toBe(want.minimal_constraints.length);
    lines.forEach((line, i) => {
      // strict string identity, not just lookalike rendering
      expect(line === want.minimal_constraints[i].text).toBe(true);
    });
    expect(state.why!.text === want.text).toBe(true);

    // vertex lists ride along untouched when requested
    expect(state.why!.vrep).toBeDefined();
    expect(state.why!.vrep!.region.length).toBe(4);
    expect(state.why!.vrep!.output.length).toBe(4);
  });

  it("a distance-1 why-not highlights exactly one hyperplane", async () => {
    const client = new ApiClient("", replayFetch());
    let state = await loadedState(client);
    state = applyPrediction(state, [1.0, -1.0], await client.predict([1.0, -1.0]));

    const resp = await client.explainWhyNot([1.0, -1.0], 1);
    state = applyWhyNot(state, resp);

    const segs = highlightSegments(state);
    expect(segs.length).toBe(1);
    expect(segs[0]).toEqual([
      [2.0, 0.0],
      [-2.0, 0.0],
    ]);

    const want = recorded("/explain/whynot").response as unknown as WhyNotResponse;
    const lines = whyNotLines(state);
    expect(lines[0] === want.text).toBe(true);
    if (want.kind !== "different_region") throw new Error("fixture drifted");
    expect(lines[1] === want.differing_constraints[0].origin.text).toBe(true);
    expect(lines[2] === want.differing_constraints[0].target.text).toBe(true);

    // the witness the marker moves to sits strictly above the crossed line
    const witness = whyNotWitness(state)!;
    expect(witness[1]).toBeGreaterThan(0);
  });

  it("region sweep lands in the cache under the model's key", async () => {
    const client = new ApiClient("", replayFetch());
    const info = await client.getModel();
    let state = applyModel(initialState(), info);

    const resp = await client.regions([0.1, 0.1], 16);
    state = applyRegions(state, modelKey(info), resp);

    const sweep = cachedRegions(state);
    expect(sweep).not.toBeNull();
    expect(sweep!.regions.length).toBe(4);
    const classes = sweep!.regions.map((r) => r.class_name).sort();
    expect(classes).toEqual(["class_0", "class_0", "class_0", "class_1"]);
    for (const region of sweep!.regions) {
      expect(region.polygon.length).toBeGreaterThanOrEqual(3);
    }
  });
});

describe("client behaviour around errors and racing", () => {
  it("starting a second explanation aborts the first", async () => {
    const signals: AbortSignal[] = [];
    const hanging: FetchLike = (_url, init) => {
      signals.push(init!.signal!);
      return new Promise<Response>(() => {});
    };
    const client = new ApiClient("", hanging);

    void client.explainWhy([1, -1], false).catch(() => {});
    void client.explainWhyNot([1, -1], 1).catch(() => {});

    expect(signals.length).toBe(2);
    expect(signals[0].aborted).toBe(true);
    expect(signals[1].aborted).toBe(false);
  });

  it("error statuses surface as ApiError with the service's code", async () => {
    const errorFetch: FetchLike = async () =>
      new Response(
        JSON.stringify({ code: "factual_class", message: "already the prediction" }),
        { status: 422, headers: { "Content-Type": "application/json" } },
      );
    const client = new ApiClient("", errorFetch);
    const err = await client.explainWhyNot([1, -1], 0).then(
      () => null,
      (e) => e,
    );
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(422);
    expect((err as ApiError).code).toBe("factual_class");
  });
});
