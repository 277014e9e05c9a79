/**
 * Typed client for the engine's HTTP API.
 *
 * Every response is validated against the published JSON contracts and
 * returned together with the engine snapshot version taken from the
 * `X-Snapshot-Version` header, so callers can discard replies that
 * belong to an older snapshot.
 */

import {
  asHealthPayload,
  asModelPayload,
  asReportsPayload,
  asTracePayload,
  asVariantsPayload,
  asWhatIfPayload,
  HealthPayload,
  ModelPayload,
  ReportsPayload,
  TracePayload,
  VariantsPayload,
  WhatIfPayload,
} from "./contracts.js";

/** An API failure: HTTP error envelope, transport failure, or bad payload. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly slug: string,
    readonly detail: string,
  ) {
    super(`${slug}: ${detail}`);
    this.name = "ApiError";
  }
}

export interface Versioned<T> {
  data: T;
  version: number;
}

/** The full surface the explorer needs; mocks implement this in tests. */
export interface EngineApi {
  health(): Promise<Versioned<HealthPayload>>;
  model(): Promise<Versioned<ModelPayload>>;
  whatif(selection: string[], param?: number): Promise<Versioned<WhatIfPayload>>;
  variants(limit: number): Promise<Versioned<VariantsPayload>>;
  reports(): Promise<Versioned<ReportsPayload>>;
  trace(facts: string[]): Promise<Versioned<TracePayload>>;
  staticReportUrl(id: string): string;
  pivotReportUrl(id: string): string;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

function defaultFetch(input: string, init?: RequestInit): Promise<Response> {
  return globalThis.fetch(input, init);
}

export class ApiClient implements EngineApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = defaultFetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Versioned<unknown>> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (cause) {
      throw new ApiError(0, "unreachable", String(cause));
    }
    const version = Number(response.headers.get("X-Snapshot-Version") ?? "0");
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    if (!response.ok) {
      const envelope = (typeof body === "object" && body !== null ? body : {}) as Record<string, unknown>;
      const slug = typeof envelope.error === "string" ? envelope.error : "http-error";
      const detail = typeof envelope.detail === "string" ? envelope.detail : `status ${response.status}`;
      throw new ApiError(response.status, slug, detail);
    }
    return { data: body, version };
  }

  private post(path: string, payload: unknown): Promise<Versioned<unknown>> {
    return this.request(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  async health(): Promise<Versioned<HealthPayload>> {
    const { data, version } = await this.request("/api/health");
    return { data: asHealthPayload(data), version };
  }

  async model(): Promise<Versioned<ModelPayload>> {
    const { data, version } = await this.request("/api/model");
    return { data: asModelPayload(data), version };
  }

  async whatif(selection: string[], param?: number): Promise<Versioned<WhatIfPayload>> {
    const payload: Record<string, unknown> = { selection };
    if (param !== undefined) payload.param = param;
    const { data, version } = await this.post("/api/whatif", payload);
    return { data: asWhatIfPayload(data), version };
  }

  async variants(limit: number): Promise<Versioned<VariantsPayload>> {
    const { data, version } = await this.request(
      `/api/variants?limit=${encodeURIComponent(String(limit))}`,
    );
    return { data: asVariantsPayload(data), version };
  }

  async reports(): Promise<Versioned<ReportsPayload>> {
    const { data, version } = await this.request("/api/reports");
    return { data: asReportsPayload(data), version };
  }

  async trace(facts: string[]): Promise<Versioned<TracePayload>> {
    const { data, version } = await this.post("/api/rules/trace", { facts });
    return { data: asTracePayload(data), version };
  }

  staticReportUrl(id: string): string {
    return `${this.baseUrl}/api/reports/static/${encodeURIComponent(id)}`;
  }

  pivotReportUrl(id: string): string {
    return `${this.baseUrl}/api/reports/pivot/${encodeURIComponent(id)}`;
  }
}
