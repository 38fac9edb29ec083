/**
 * Typed fetch wrappers for the explanation service.
 *
 * Every shape here mirrors the JSON the service actually returns; the UI
 * treats those payloads as the single source of truth and never recomputes
 * geometry from them.  The fetch implementation is injectable so tests can
 * replay a recorded session without a network.
 */

export interface Provenance {
  kind: "neuron" | "output_pair" | "box";
  layer?: number;
  index?: number;
  orientation?: string;
  winner?: number;
  loser?: number;
  dim?: number;
  side?: string;
}

/** One half-plane of an explanation, with optional 2-D draw aids. */
export interface ConstraintDoc {
  a: number[];
  b: number;
  strict: boolean;
  provenance: Provenance;
  text: string;
  /** Segment of the boundary line clipped to the input box (2-D only). */
  segment?: number[][] | null;
  /** Polygon covering the satisfied side inside the box (2-D only). */
  shade?: number[][] | null;
}

export interface ModelInfo {
  input_dim: number;
  bounds: number[][];
  class_names: string[];
  layer_widths: number[];
  output_activation: string;
}

export interface PredictResponse {
  input: number[];
  logits: number[];
  class_index: number;
  class_name: string;
  signature: number[];
  boundary: boolean;
  inside_bounds: boolean;
  request_id?: string;
}

export interface VrepDoc {
  region: number[][];
  output: number[][];
}

export interface WhyResponse {
  kind: "why";
  input: number[];
  class_index: number;
  class_name: string;
  signature: number[];
  boundary: boolean;
  minimal_constraints: ConstraintDoc[];
  removed_count: number;
  text: string;
  vrep?: VrepDoc;
  request_id?: string;
}

export interface DifferingPair {
  origin: ConstraintDoc;
  target: ConstraintDoc;
}

interface WhyNotCommon {
  input: number[];
  factual_class: number;
  factual_name: string;
  counterfactual_class: number;
  counterfactual_name: string;
  text: string;
  request_id?: string;
}

/** The counterfactual already wins somewhere inside the very same region. */
export interface SameRegionResponse extends WhyNotCommon {
  kind: "same_region";
  signature: number[];
  delta_constraint: ConstraintDoc;
  counterfactual_witness: number[];
}

/** The counterfactual first wins a few activation flips away. */
export interface DifferentRegionResponse extends WhyNotCommon {
  kind: "different_region";
  distance: number;
  origin_signature: number[];
  target_signature: number[];
  witness: number[];
  differing_constraints: DifferingPair[];
  examined: number;
}

export type WhyNotResponse = SameRegionResponse | DifferentRegionResponse;

export interface RegionDoc {
  signature: number[];
  class_index: number;
  class_name: string;
  polygon: number[][];
  witness: number[];
}

export interface RegionsResponse {
  regions: RegionDoc[];
  examined: number;
  bounds: number[][];
  request_id?: string;
}

/** Error body the service sends alongside 4xx/5xx statuses. */
export interface ApiErrorBody {
  code: string;
  message: string;
  payload?: Record<string, unknown>;
}

/** Thrown by the client when the service answers with an error status. */
export class ApiError extends Error {
  status: number;
  code: string;
  payload?: Record<string, unknown>;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiError";
    this.status = status;
    this.code = body.code;
    this.payload = body.payload;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/**
 * Small client for the explanation service.
 *
 * Explanation calls (why / whynot) share one cancellation slot: starting a
 * new one aborts whichever is still in flight, so at most one explanation
 * request is ever outstanding.
 */
export class ApiClient {
  private baseUrl: string;
  private fetchImpl: FetchLike;
  private explainAbort: AbortController | null = null;

  constructor(baseUrl = "", fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const init: RequestInit = { method, signal };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    const doc = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, doc as ApiErrorBody);
    }
    return doc as T;
  }

  /** Abort the in-flight explanation request, if any, and open a new slot. */
  private nextExplainSignal(): AbortSignal {
    if (this.explainAbort !== null) {
      this.explainAbort.abort();
    }
    this.explainAbort = new AbortController();
    return this.explainAbort.signal;
  }

  getModel(): Promise<ModelInfo> {
    return this.request<ModelInfo>("GET", "/model");
  }

  predict(input: number[]): Promise<PredictResponse> {
    return this.request<PredictResponse>("POST", "/predict", { input });
  }

  explainWhy(input: number[], vrep: boolean): Promise<WhyResponse> {
    return this.request<WhyResponse>(
      "POST",
      "/explain/why",
      { input, vrep },
      this.nextExplainSignal(),
    );
  }

  explainWhyNot(
    input: number[],
    counterfactualClass: number,
  ): Promise<WhyNotResponse> {
    return this.request<WhyNotResponse>(
      "POST",
      "/explain/whynot",
      { input, counterfactual_class: counterfactualClass },
      this.nextExplainSignal(),
    );
  }

  regions(center: number[], maxRegions: number): Promise<RegionsResponse> {
    return this.request<RegionsResponse>("POST", "/regions", {
      center,
      max_regions: maxRegions,
    });
  }
}
