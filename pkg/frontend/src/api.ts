// Thin client over the elicitation service endpoints.
//
// Network and server failures surface as ApiError; payloads that do not
// look like a renderable pair surface as PayloadError so the UI can show
// an error card without advancing the session.

import type {
  PairPayload,
  PreferenceExport,
  SessionInfo,
  Side,
  SignalPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number | null = null) {
    super(message);
    this.name = "ApiError";
  }
}

export class PayloadError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "PayloadError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export function validateSignal(sig: unknown, side: string): SignalPayload {
  const s = sig as SignalPayload;
  if (!s || typeof s.id !== "string") {
    throw new PayloadError(`${side} trajectory is missing an id`);
  }
  if (!Array.isArray(s.x) || !Array.isArray(s.v) || s.x.length === 0) {
    throw new PayloadError(`${side} trajectory has no position/speed series`);
  }
  if (s.x.length !== s.v.length) {
    throw new PayloadError(`${side} trajectory series lengths differ`);
  }
  if (!(typeof s.dt === "number" && s.dt > 0)) {
    throw new PayloadError(`${side} trajectory has a bad time step`);
  }
  if (s.x.some((v) => typeof v !== "number" || !isFinite(v))) {
    throw new PayloadError(`${side} trajectory has non-numeric samples`);
  }
  return s;
}

export function validatePair(raw: unknown): PairPayload {
  const pair = raw as PairPayload;
  if (!pair || typeof pair.index !== "number") {
    throw new PayloadError("pair payload is missing its index");
  }
  const left = validateSignal(pair.left, "left");
  const right = validateSignal(pair.right, "right");
  if (left.x.length !== right.x.length) {
    throw new PayloadError("left and right trajectories have different lengths");
  }
  return pair;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(`network failure: ${(err as Error).message}`);
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // fall through: error below carries the status
    }
    if (!response.ok) {
      const detail = (body as { error?: string })?.error ?? response.statusText;
      throw new ApiError(detail, response.status);
    }
    return body as T;
  }

  session(): Promise<SessionInfo> {
    return this.request<SessionInfo>("/api/session");
  }

  async pair(index: number): Promise<PairPayload> {
    return validatePair(await this.request("/api/pairs/" + index));
  }

  choose(index: number, side: Side): Promise<SessionInfo> {
    return this.request<SessionInfo>(`/api/pairs/${index}/choice`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ choice: side }),
    });
  }

  exportPreferences(): Promise<PreferenceExport> {
    return this.request<PreferenceExport>("/api/export");
  }
}
