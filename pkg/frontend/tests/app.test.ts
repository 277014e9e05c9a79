import { beforeEach, describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { WhatIfPayload } from "../src/contracts.js";
import { App, createApp } from "../src/app.js";
import {
  MockApi,
  ONE_LEAF_WHATIF,
  deferred,
  settle,
  versioned,
} from "./fixtures.js";

let root: HTMLElement;
let api: MockApi;
let app: App;

function query<T extends HTMLElement>(selector: string): T {
  const found = root.querySelector<T>(selector);
  if (found === null) throw new Error(`not rendered: ${selector}`);
  return found;
}

function evaluation(total: number, extra: Partial<WhatIfPayload> = {}): WhatIfPayload {
  return {
    admissible: true,
    vetoed: false,
    violated: [],
    facts: [],
    aggregates: {},
    score: { total, per_attribute: {} },
    statuses: {},
    ...extra,
  };
}

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app") as HTMLElement;
  api = new MockApi();
  app = createApp(root, api, { debounceMs: 0 });
});

describe("tree rendering", () => {
  it("renders one row per node with label, kind, and connector badge", async () => {
    await app.start();
    const nodes = root.querySelectorAll("li[data-node-id]");
    expect(nodes).toHaveLength(3);
    const rootRow = query('[data-row-for="venture"]');
    expect(rootRow.querySelector(".badge")?.textContent).toBe("AND");
    expect(rootRow.querySelector(".node-label")?.textContent).toBe("Launch the venture");
    expect(rootRow.querySelector(".kind")?.textContent).toBe("goal");
    const leafRow = query('[data-row-for="dev-a"]');
    expect(leafRow.querySelector(".badge")).toBeNull();
  });

  it("shows leaf characteristic values on demand", async () => {
    await app.start();
    const leaf = query('li[data-node-id="dev-a"]');
    const panel = leaf.querySelector("dl.values") as HTMLElement;
    expect(panel.hidden).toBe(true);
    (leaf.querySelector("button.values-toggle") as HTMLButtonElement).click();
    expect(panel.hidden).toBe(false);
    expect(panel.textContent).toContain("cost");
    expect(panel.textContent).toContain("5");
    expect(panel.textContent).toContain("1 → 2");
  });

  it("shows the score panel's empty-selection message before any toggle", async () => {
    await app.start();
    expect(query('[data-field="no-configuration"]').textContent).toContain(
      "no configuration",
    );
  });
});

describe("what-if loop", () => {
  it("issues a what-if on toggle and renders exactly the mocked reply", async () => {
    await app.start();
    const checkbox = query<HTMLInputElement>('input[data-toggle="dev-a"]');
    checkbox.click();
    await settle();

    expect(api.whatifCalls).toEqual([["dev-a"]]);
    expect(query('[data-field="admissible"]').textContent).toBe("not admissible");
    expect(query('[data-field="score-total"]').textContent).toBe("4.5");
    const violation = query(".violations li");
    expect(violation.textContent).toBe(ONE_LEAF_WHATIF.violated[0]);
    expect(violation.className).toBe("limit-highlight");
    expect(query('[data-aggregate="cost"]').textContent).toContain("12");
  });

  it("marks sibling statuses straight from the reply", async () => {
    await app.start();
    query<HTMLInputElement>('input[data-toggle="dev-a"]').click();
    await settle();
    expect(query('[data-status-of="venture"]').textContent).toBe("required");
    expect(query('[data-status-of="dev-a"]').textContent).toBe("selected-orphan");
    expect(query('[data-status-of="dev-b"]').textContent).toBe("candidate");
  });

  it("never lets a delayed older reply overwrite newer state", async () => {
    await app.start();
    const slow = deferred<ReturnType<typeof versioned<WhatIfPayload>>>();
    const fast = deferred<ReturnType<typeof versioned<WhatIfPayload>>>();
    api.whatifQueue = [() => slow.promise, () => fast.promise];

    app.store.replaceSelection(["dev-a", "dev-b"]);
    const first = app.issueWhatIf(["dev-a"]);
    const second = app.issueWhatIf(["dev-a", "dev-b"]);

    fast.resolve(versioned(evaluation(2)));
    await second;
    expect(query('[data-field="score-total"]').textContent).toBe("2");

    slow.resolve(versioned(evaluation(1)));
    await first;
    await settle();
    expect(query('[data-field="score-total"]').textContent).toBe("2");
    expect(app.store.response?.score.total).toBe(2);
  });

  it("keeps the selection and shows a notice when the engine rejects ids", async () => {
    await app.start();
    api.whatifQueue = [
      async () => {
        throw new ApiError(422, "unknown-node", "unknown node ids: ghost");
      },
    ];
    app.pickVariant(["ghost"]);
    await settle();
    expect(app.store.selection()).toEqual(["ghost"]);
    const notice = query('[data-role="notice"]');
    expect(notice.hidden).toBe(false);
    expect(notice.textContent).toContain("ghost");
  });

  it("returns the score panel to the empty message after toggling off", async () => {
    await app.start();
    query<HTMLInputElement>('input[data-toggle="dev-a"]').click();
    await settle();
    query<HTMLInputElement>('input[data-toggle="dev-a"]').click();
    await settle();
    expect(query('[data-field="no-configuration"]').textContent).toContain(
      "no configuration",
    );
  });

  it("explains a derived fact by tracing the current selection's seeds", async () => {
    await app.start();
    query<HTMLInputElement>('input[data-toggle="dev-a"]').click();
    await settle();
    query<HTMLButtonElement>('button[data-fact="broad-reach"]').click();
    await settle();

    expect(api.traceCalls).toEqual([["selected:dev-a"]]);
    const derivation = query('[data-derives="broad-reach"]');
    expect(derivation.textContent).toContain("rule full-funnel");
    expect(query('[data-derives="selected:dev-a"]').textContent).toContain("(given)");
  });
});

describe("variants and reports", () => {
  it("renders ranked variant rows with their totals", async () => {
    await app.start();
    expect(api.variantsCalls).toEqual([10]);
    const totals = [...root.querySelectorAll('[data-field="variant-total"]')].map(
      (cell) => cell.textContent,
    );
    expect(totals).toEqual(["9.5", "7"]);
  });

  it("clicking a variant row reproduces that configuration in the tree", async () => {
    await app.start();
    query<HTMLTableRowElement>('tr[data-variant-index="0"]').click();
    await settle();

    expect(app.store.selection()).toEqual(["dev-a", "venture"]);
    expect(query<HTMLInputElement>('input[data-toggle="dev-a"]').checked).toBe(true);
    expect(query<HTMLInputElement>('input[data-toggle="venture"]').checked).toBe(true);
    expect(query<HTMLInputElement>('input[data-toggle="dev-b"]').checked).toBe(false);
    expect(api.whatifCalls).toContainEqual(["dev-a", "venture"]);
  });

  it("shows a truncation notice when the listing is cut off", async () => {
    api.variantsResult = {
      count: 1,
      truncated: true,
      variants: [
        { selected: ["venture"], derived: [], score: { total: 1, per_attribute: {} } },
      ],
    };
    await app.start();
    expect(query('[data-field="truncated"]').textContent).toContain("showing first 1");
  });

  it("lists static XML and pivot CSV downloads from the catalog", async () => {
    await app.start();
    const xml = query<HTMLAnchorElement>('a[data-static-report="cost-by-area"]');
    expect(xml.getAttribute("href")).toBe("/api/reports/static/cost-by-area");
    expect(xml.getAttribute("download")).toBe("cost-by-area.xml");
    expect(xml.textContent).toContain("Cost by area");
    const csv = query<HTMLAnchorElement>('a[data-pivot-report="cost-grid"]');
    expect(csv.getAttribute("href")).toBe("/api/reports/pivot/cost-grid");
    expect(csv.getAttribute("download")).toBe("cost-grid.csv");
  });
});

describe("failure handling", () => {
  it("shows a blocking banner when the engine is unreachable, then retries", async () => {
    api.modelError = new ApiError(0, "unreachable", "connection refused");
    await app.start();
    const banner = query('[data-role="error-banner"]');
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("connection refused");
    expect(query('[data-role="layout"]').hidden).toBe(true);

    api.modelError = null;
    query<HTMLButtonElement>('[data-role="retry"]').click();
    await settle();
    expect(query<HTMLElement>('[data-role="error-banner"]').hidden).toBe(true);
    expect(root.querySelectorAll("li[data-node-id]")).toHaveLength(3);
  });
});
