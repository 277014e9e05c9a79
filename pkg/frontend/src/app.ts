/**
 * Application wiring: builds the page skeleton, connects the tree and the
 * feedback panels to the store, and drives all engine calls.
 *
 * The app holds no domain logic. Toggles go through a debounced
 * single-in-flight dispatcher; every reply is applied through the store's
 * sequence/version discipline so a delayed older reply can never overwrite
 * a newer evaluation.
 */

import { ApiError, EngineApi } from "./api.js";
import { SelectionStore, WhatIfScheduler } from "./state.js";
import {
  renderAdmissibility,
  renderFacts,
  renderScore,
  renderTraceView,
  renderViolations,
} from "./panels.js";
import { renderTree, updateTreeState } from "./tree.js";
import { renderReports, renderVariants } from "./variants.js";

export interface AppOptions {
  debounceMs?: number;
  variantLimit?: number;
}

export interface App {
  readonly store: SelectionStore;
  start(): Promise<void>;
  toggleNode(id: string): void;
  pickVariant(selected: string[]): void;
  issueWhatIf(selection: string[]): Promise<void>;
  loadVariants(): Promise<void>;
  explain(fact: string): Promise<void>;
}

const SKELETON = `
  <div class="error-banner" data-role="error-banner" hidden>
    <p data-role="error-text"></p>
    <button type="button" data-role="retry">retry</button>
  </div>
  <header class="topbar">
    <h1>innotree explorer</h1>
    <span class="quiet">engine snapshot <span data-role="version">&ndash;</span></span>
  </header>
  <p class="notice" data-role="notice" hidden></p>
  <main class="layout" data-role="layout" hidden>
    <section class="card span-tall">
      <h2>decision tree</h2>
      <div data-role="tree"></div>
      <button type="button" data-role="clear">clear selection</button>
    </section>
    <section class="card">
      <h2>evaluation</h2>
      <div data-role="admissibility"></div>
      <div data-role="score"></div>
    </section>
    <section class="card">
      <h2>violated constraints</h2>
      <div data-role="violations"></div>
    </section>
    <section class="card">
      <h2>derived facts</h2>
      <div data-role="facts"></div>
      <div data-role="trace"></div>
    </section>
    <section class="card span-wide">
      <h2>ranked variants</h2>
      <div class="variant-controls">
        <label>limit
          <input type="number" min="1" step="1" value="10" data-role="variant-limit">
        </label>
        <button type="button" data-role="refresh-variants">refresh</button>
      </div>
      <div data-role="variants"></div>
    </section>
    <section class="card">
      <h2>reports</h2>
      <div data-role="reports"></div>
    </section>
  </main>
`;

export function createApp(root: HTMLElement, api: EngineApi, options: AppOptions = {}): App {
  root.innerHTML = SKELETON;
  const part = <T extends HTMLElement>(role: string): T => {
    const found = root.querySelector<T>(`[data-role="${role}"]`);
    if (found === null) throw new Error(`missing skeleton part: ${role}`);
    return found;
  };
  const banner = part<HTMLElement>("error-banner");
  const bannerText = part<HTMLElement>("error-text");
  const retryButton = part<HTMLButtonElement>("retry");
  const versionLabel = part<HTMLElement>("version");
  const noticeEl = part<HTMLElement>("notice");
  const layout = part<HTMLElement>("layout");
  const treeEl = part<HTMLElement>("tree");
  const clearButton = part<HTMLButtonElement>("clear");
  const admissibilityEl = part<HTMLElement>("admissibility");
  const scoreEl = part<HTMLElement>("score");
  const violationsEl = part<HTMLElement>("violations");
  const factsEl = part<HTMLElement>("facts");
  const traceEl = part<HTMLElement>("trace");
  const limitInput = part<HTMLInputElement>("variant-limit");
  const refreshButton = part<HTMLButtonElement>("refresh-variants");
  const variantsEl = part<HTMLElement>("variants");
  const reportsEl = part<HTMLElement>("reports");

  if (options.variantLimit !== undefined) limitInput.value = String(options.variantLimit);

  const store = new SelectionStore();

  const showNotice = (text: string): void => {
    noticeEl.textContent = text;
    noticeEl.hidden = false;
  };
  const clearNotice = (): void => {
    noticeEl.textContent = "";
    noticeEl.hidden = true;
  };
  const describe = (err: unknown): string =>
    err instanceof Error ? err.message : String(err);

  const setVersion = (version: number): void => {
    versionLabel.textContent = version > 0 ? String(version) : "–";
  };

  const explain = async (fact: string): Promise<void> => {
    const facts = store.selection().map((id) => `selected:${id}`);
    try {
      const { data } = await api.trace(facts);
      renderTraceView(traceEl, data, fact);
    } catch (err) {
      showNotice(`derivation unavailable: ${describe(err)}`);
    }
  };

  store.subscribe(() => {
    updateTreeState(treeEl, store);
    renderAdmissibility(admissibilityEl, store);
    renderScore(scoreEl, store);
    renderViolations(violationsEl, store);
    renderFacts(factsEl, store, (fact) => void explain(fact));
    if (store.version > 0) setVersion(store.version);
  });

  const issueWhatIf = async (selection: string[]): Promise<void> => {
    const seq = store.nextSeq();
    try {
      const { data, version } = await api.whatif(selection);
      if (store.apply(seq, version, data)) clearNotice();
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        showNotice(`selection kept; the engine rejected it: ${err.detail}`);
      } else {
        showNotice(`evaluation failed: ${describe(err)}`);
      }
    }
  };

  const scheduler = new WhatIfScheduler(issueWhatIf, options.debounceMs ?? 120);

  const toggleNode = (id: string): void => {
    store.toggle(id);
    scheduler.request(store.selection());
  };

  const pickVariant = (selected: string[]): void => {
    store.replaceSelection(selected);
    void issueWhatIf(store.selection());
  };

  const loadVariants = async (): Promise<void> => {
    const limit = Math.max(1, Number(limitInput.value) || 10);
    try {
      const { data, version } = await api.variants(limit);
      renderVariants(variantsEl, data, pickVariant);
      setVersion(version);
    } catch (err) {
      showNotice(`variants unavailable: ${describe(err)}`);
    }
  };

  const loadReports = async (): Promise<void> => {
    try {
      const { data } = await api.reports();
      renderReports(reportsEl, data, api);
    } catch (err) {
      showNotice(`reports unavailable: ${describe(err)}`);
    }
  };

  const start = async (): Promise<void> => {
    banner.hidden = true;
    let model;
    try {
      ({ data: model } = await api.model());
    } catch (err) {
      bannerText.textContent = `cannot reach the engine: ${describe(err)}`;
      banner.hidden = false;
      layout.hidden = true;
      return;
    }
    renderTree(treeEl, model, store, { onToggle: toggleNode });
    renderAdmissibility(admissibilityEl, store);
    renderScore(scoreEl, store);
    layout.hidden = false;
    await Promise.all([loadVariants(), loadReports()]);
  };

  retryButton.addEventListener("click", () => void start());
  refreshButton.addEventListener("click", () => void loadVariants());
  clearButton.addEventListener("click", () => {
    store.clear();
    scheduler.request(store.selection());
  });

  return { store, start, toggleNode, pickVariant, issueWhatIf, loadVariants, explain };
}
