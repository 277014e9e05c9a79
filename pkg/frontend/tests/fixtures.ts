/**
 * Shared fixtures: contract-valid payloads and a scriptable in-memory API.
 *
 * Every payload handed out by MockApi passes through the same runtime
 * validators the real client uses, so the mocks are guaranteed to match
 * the published JSON contracts.
 */

import { EngineApi, Versioned } from "../src/api.js";
import {
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
} from "../src/contracts.js";

export function versioned<T>(data: T, version = 1): Versioned<T> {
  return { data, version };
}

export interface Deferred<T> {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (reason: unknown) => void;
}

export function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  let reject!: (reason: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

export const tick = (): Promise<void> => new Promise((resolve) => setTimeout(resolve, 0));

export async function settle(rounds = 4): Promise<void> {
  for (let i = 0; i < rounds; i += 1) await tick();
}

/** Root AND over two leaves — the smallest interesting hierarchy. */
export const TINY_MODEL = {
  hierarchy: {
    root_id: "venture",
    nodes: [
      {
        id: "venture",
        label: "Launch the venture",
        kind: "goal",
        connector: "and",
        children: ["dev-a", "dev-b"],
      },
      {
        id: "dev-a",
        label: "Option A",
        kind: "alternative",
        connector: "none",
        group_id: "opts",
      },
      {
        id: "dev-b",
        label: "Option B",
        kind: "alternative",
        connector: "none",
        group_id: "opts",
      },
    ],
  },
  schemas: [
    {
      group_id: "opts",
      attributes: [
        { name: "cost", value_kind: "numeric", aggregation: "sum", unit: "k$" },
        { name: "expected_return", value_kind: "numeric", aggregation: "sum" },
      ],
    },
  ],
  tables: [
    {
      node_id: "dev-a",
      values: { cost: 5, expected_return: { series: [[1, 2], [5, 30]] } },
    },
    { node_id: "dev-b", values: { cost: 7, expected_return: 4 } },
  ],
  constraints: { expenditure_ceiling: 10 },
};

/** The evaluation an AND root yields after choosing only one child. */
export const ONE_LEAF_WHATIF = {
  admissible: false,
  vetoed: false,
  violated: ["expenditure_ceiling: cost = 12, required <= 10"],
  facts: ["broad-reach", "selected:dev-a"],
  aggregates: { cost: 12, expected_return: 2 },
  score: { total: 4.5, per_attribute: { cost: 12 } },
  statuses: { venture: "required", "dev-a": "selected-orphan", "dev-b": "candidate" },
};

export const VARIANTS_TWO = {
  count: 2,
  truncated: false,
  variants: [
    {
      selected: ["dev-a", "venture"],
      derived: ["broad-reach"],
      score: { total: 9.5, per_attribute: { cost: 5 } },
    },
    {
      selected: ["dev-b", "venture"],
      derived: [],
      score: { total: 7, per_attribute: { cost: 7 } },
    },
  ],
};

export const REPORTS_LISTING = {
  statics: [
    { id: "cost-by-area", title: "Cost by area" },
    { id: "goal-rollup", title: "Goal rollup" },
  ],
  pivots: [{ id: "cost-grid", cube: "plan" }],
};

export const TRACE_BROAD_REACH = {
  facts: ["broad-reach", "selected:dev-a"],
  seed: ["selected:dev-a"],
  vetoed: false,
  steps: [{ fact: "broad-reach", rule: "full-funnel", supports: ["selected:dev-a"] }],
};

type WhatIfHandler = (selection: string[]) => Promise<Versioned<WhatIfPayload>>;

export class MockApi implements EngineApi {
  modelCalls = 0;
  whatifCalls: string[][] = [];
  variantsCalls: number[] = [];
  traceCalls: string[][] = [];

  modelError: Error | null = null;
  modelResult: unknown = TINY_MODEL;
  variantsResult: unknown = VARIANTS_TWO;
  reportsResult: unknown = REPORTS_LISTING;
  traceResult: unknown = TRACE_BROAD_REACH;
  whatifResult: unknown = ONE_LEAF_WHATIF;
  whatifVersion = 1;
  /** One-shot handlers consumed before falling back to whatifResult. */
  whatifQueue: WhatIfHandler[] = [];

  async health(): Promise<Versioned<HealthPayload>> {
    return versioned({ status: "ok", version: this.whatifVersion });
  }

  async model(): Promise<Versioned<ModelPayload>> {
    this.modelCalls += 1;
    if (this.modelError !== null) throw this.modelError;
    return versioned(asModelPayload(this.modelResult));
  }

  async whatif(selection: string[]): Promise<Versioned<WhatIfPayload>> {
    this.whatifCalls.push([...selection]);
    const handler = this.whatifQueue.shift();
    if (handler !== undefined) return handler(selection);
    return versioned(asWhatIfPayload(this.whatifResult), this.whatifVersion);
  }

  async variants(limit: number): Promise<Versioned<VariantsPayload>> {
    this.variantsCalls.push(limit);
    return versioned(asVariantsPayload(this.variantsResult));
  }

  async reports(): Promise<Versioned<ReportsPayload>> {
    return versioned(asReportsPayload(this.reportsResult));
  }

  async trace(facts: string[]): Promise<Versioned<TracePayload>> {
    this.traceCalls.push([...facts]);
    return versioned(asTracePayload(this.traceResult));
  }

  staticReportUrl(id: string): string {
    return `/api/reports/static/${id}`;
  }

  pivotReportUrl(id: string): string {
    return `/api/reports/pivot/${id}`;
  }
}
