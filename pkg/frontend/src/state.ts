/**
 * View state and the pure transitions that drive the explorer.
 *
 * Everything in here is plain data in, plain data out: no DOM, no fetch, no
 * geometry beyond reading fields off service payloads.  main.ts owns the
 * side effects; tests exercise these transitions directly.
 */

import type {
  ConstraintDoc,
  ModelInfo,
  PredictResponse,
  RegionsResponse,
  WhyNotResponse,
  WhyResponse,
} from "./api.js";

export interface Transform {
  /** World units per screen pixel stay uniform; scale is px per world unit. */
  scale: number;
  offsetX: number;
  offsetY: number;
}

export interface ViewState {
  model: ModelInfo | null;
  /** Input the user most recently submitted (what the marker shows). */
  currentInput: number[] | null;
  prediction: PredictResponse | null;
  why: WhyResponse | null;
  whyNot: WhyNotResponse | null;
  /** Counterfactual class the user picked in the why-not panel. */
  selectedClass: number | null;
  /** Region sweeps already fetched, keyed by model identity. */
  regionCache: Map<string, RegionsResponse>;
  /** Whether the region overlay is drawn. */
  showRegions: boolean;
  /** Pan/zoom of the canvas; null until the first fit. */
  transform: Transform | null;
  /** Inline error strip contents; null when clear. */
  error: string | null;
}

export function initialState(): ViewState {
  return {
    model: null,
    currentInput: null,
    prediction: null,
    why: null,
    whyNot: null,
    selectedClass: null,
    regionCache: new Map(),
    showRegions: false,
    transform: null,
    error: null,
  };
}

/** Stable identity for the loaded model, used as the region-cache key. */
export function modelKey(info: ModelInfo): string {
  return (
    `${info.layer_widths.join("x")}|${info.output_activation}|` +
    JSON.stringify(info.bounds)
  );
}

export function applyModel(state: ViewState, info: ModelInfo): ViewState {
  return {
    ...initialState(),
    model: info,
    regionCache: state.regionCache,
    transform: state.transform,
  };
}

/**
 * Record a prediction.  Explanations fetched for an earlier point are stale
 * the moment a new input is submitted, so both panels are cleared here and
 * repopulated only when their responses for *this* input arrive.
 */
export function applyPrediction(
  state: ViewState,
  input: number[],
  resp: PredictResponse,
): ViewState {
  return {
    ...state,
    currentInput: input.slice(),
    prediction: resp,
    why: null,
    whyNot: null,
    error: null,
  };
}

function sameInput(a: number[] | null, b: number[]): boolean {
  if (a === null || a.length !== b.length) return false;
  return a.every((v, i) => v === b[i]);
}

/** Attach a why explanation, unless the user has already moved the point. */
export function applyWhy(state: ViewState, resp: WhyResponse): ViewState {
  if (!sameInput(state.currentInput, resp.input)) return state;
  return { ...state, why: resp, error: null };
}

/** Attach a why-not explanation, with the same staleness guard. */
export function applyWhyNot(state: ViewState, resp: WhyNotResponse): ViewState {
  if (!sameInput(state.currentInput, resp.input)) return state;
  return { ...state, whyNot: resp, error: null };
}

export function selectClass(state: ViewState, classIndex: number): ViewState {
  return { ...state, selectedClass: classIndex, whyNot: null };
}

export function applyRegions(
  state: ViewState,
  key: string,
  resp: RegionsResponse,
): ViewState {
  const cache = new Map(state.regionCache);
  cache.set(key, resp);
  return { ...state, regionCache: cache, showRegions: true };
}

export function cachedRegions(state: ViewState): RegionsResponse | null {
  if (state.model === null) return null;
  return state.regionCache.get(modelKey(state.model)) ?? null;
}

export function setError(state: ViewState, message: string): ViewState {
  return { ...state, error: message };
}

export function clearError(state: ViewState): ViewState {
  return { ...state, error: null };
}

/** Badge contents: predicted class name plus the activation signature. */
export function badge(state: ViewState): { label: string; chip: string } | null {
  const p = state.prediction;
  if (p === null) return null;
  return { label: p.class_name, chip: p.signature.join("") };
}

/**
 * The constraint lines the why panel displays, verbatim from the payload.
 * The service renders the text; the UI only places it.
 */
export function whyLines(state: ViewState): string[] {
  if (state.why === null) return [];
  return state.why.minimal_constraints.map((c) => c.text);
}

/** Verbatim text lines for the why-not panel. */
export function whyNotLines(state: ViewState): string[] {
  const wn = state.whyNot;
  if (wn === null) return [];
  const lines: string[] = [wn.text];
  if (wn.kind === "same_region") {
    lines.push(wn.delta_constraint.text);
  } else {
    for (const pair of wn.differing_constraints) {
      lines.push(pair.origin.text);
      lines.push(pair.target.text);
    }
  }
  return lines;
}

/** Point where the counterfactual class actually wins, if one was found. */
export function whyNotWitness(state: ViewState): number[] | null {
  const wn = state.whyNot;
  if (wn === null) return null;
  return wn.kind === "same_region" ? wn.counterfactual_witness : wn.witness;
}

/**
 * Boundary segments to highlight for the current why-not result: one per
 * crossed hyperplane, taken from the origin side of each differing pair
 * (or from the single delta constraint in the same-region case).
 */
export function highlightSegments(state: ViewState): number[][][] {
  const wn = state.whyNot;
  if (wn === null) return [];
  const out: number[][][] = [];
  const push = (c: ConstraintDoc) => {
    if (c.segment != null) out.push(c.segment);
  };
  if (wn.kind === "same_region") {
    push(wn.delta_constraint);
  } else {
    for (const pair of wn.differing_constraints) push(pair.origin);
  }
  return out;
}
