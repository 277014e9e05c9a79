import { describe, expect, it } from "vitest";

import {
  asModelPayload,
  asReportsPayload,
  asTracePayload,
  asVariantsPayload,
  asWhatIfPayload,
  ContractViolation,
} from "../src/contracts.js";
import {
  ONE_LEAF_WHATIF,
  REPORTS_LISTING,
  TINY_MODEL,
  TRACE_BROAD_REACH,
  VARIANTS_TWO,
} from "./fixtures.js";

describe("payload contracts", () => {
  it("accept the fixture payloads used by the mocked API", () => {
    expect(asModelPayload(TINY_MODEL).hierarchy.nodes).toHaveLength(3);
    expect(asWhatIfPayload(ONE_LEAF_WHATIF).score.total).toBe(4.5);
    expect(asVariantsPayload(VARIANTS_TWO).variants).toHaveLength(2);
    expect(asReportsPayload(REPORTS_LISTING).statics[0].id).toBe("cost-by-area");
    expect(asTracePayload(TRACE_BROAD_REACH).steps[0].rule).toBe("full-funnel");
  });

  it("keeps numeric and series characteristic values apart", () => {
    const model = asModelPayload(TINY_MODEL);
    const values = model.tables[0].values;
    expect(values.cost).toBe(5);
    expect(values.expected_return).toEqual({ series: [[1, 2], [5, 30]] });
  });

  it.each([
    ["whatif missing statuses", () => {
      const { statuses: _dropped, ...rest } = ONE_LEAF_WHATIF;
      asWhatIfPayload(rest);
    }],
    ["whatif with non-numeric total", () => {
      asWhatIfPayload({ ...ONE_LEAF_WHATIF, score: { total: "9", per_attribute: {} } });
    }],
    ["model without root id", () => {
      asModelPayload({ ...TINY_MODEL, hierarchy: { nodes: [] } });
    }],
    ["variants with string count", () => {
      asVariantsPayload({ ...VARIANTS_TWO, count: "2" });
    }],
    ["trace step without a rule", () => {
      asTracePayload({
        ...TRACE_BROAD_REACH,
        steps: [{ fact: "x", supports: [] }],
      });
    }],
    ["non-object payload", () => {
      asReportsPayload("reports");
    }],
  ])("reject %s", (_label, attempt) => {
    expect(attempt).toThrowError(ContractViolation);
  });
});
