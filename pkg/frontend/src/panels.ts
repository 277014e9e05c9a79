/**
 * Feedback panels: admissibility, violated constraints, derived facts with
 * explain-on-click derivation trees, and the score table. Every value shown
 * is copied verbatim from the latest engine reply.
 */

import { TracePayload, TraceStep } from "./contracts.js";
import { SelectionStore } from "./state.js";

const SELECTED_PREFIX = "selected:";
const HIGHLIGHTED_ORIGINS = new Set(["payback_limit", "expenditure_ceiling"]);

export function renderAdmissibility(el: HTMLElement, store: SelectionStore): void {
  el.textContent = "";
  const response = store.response;
  if (response === null) {
    el.textContent = "no evaluation yet";
    return;
  }
  const flag = document.createElement("span");
  flag.dataset.field = "admissible";
  flag.className = response.admissible ? "flag ok" : "flag bad";
  flag.textContent = response.admissible ? "admissible" : "not admissible";
  el.append(flag);
  if (response.vetoed) {
    const veto = document.createElement("span");
    veto.dataset.field = "vetoed";
    veto.className = "flag bad";
    veto.textContent = "vetoed by rules";
    el.append(veto);
  }
}

export function renderViolations(el: HTMLElement, store: SelectionStore): void {
  el.textContent = "";
  const response = store.response;
  if (response === null) return;
  if (response.violated.length === 0) {
    const note = document.createElement("p");
    note.className = "quiet";
    note.textContent = "no violated constraints";
    el.append(note);
    return;
  }
  const list = document.createElement("ul");
  list.className = "violations";
  for (const line of response.violated) {
    const item = document.createElement("li");
    item.textContent = line;
    const origin = line.split(":", 1)[0];
    if (HIGHLIGHTED_ORIGINS.has(origin)) item.className = "limit-highlight";
    list.append(item);
  }
  el.append(list);
}

export function renderFacts(
  el: HTMLElement,
  store: SelectionStore,
  onExplain: (fact: string) => void,
): void {
  el.textContent = "";
  const response = store.response;
  if (response === null) return;
  const derived = response.facts.filter((fact) => !fact.startsWith(SELECTED_PREFIX));
  if (derived.length === 0) {
    const note = document.createElement("p");
    note.className = "quiet";
    note.textContent = "no facts derived";
    el.append(note);
    return;
  }
  const list = document.createElement("ul");
  list.className = "facts";
  for (const fact of derived) {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.type = "button";
    button.className = "fact";
    button.dataset.fact = fact;
    button.textContent = fact;
    button.title = "show derivation";
    button.addEventListener("click", () => onExplain(fact));
    item.append(button);
    list.append(item);
  }
  el.append(list);
}

export function renderScore(el: HTMLElement, store: SelectionStore): void {
  el.textContent = "";
  if (store.size === 0) {
    const note = document.createElement("p");
    note.className = "quiet";
    note.dataset.field = "no-configuration";
    note.textContent = "no configuration selected";
    el.append(note);
    return;
  }
  const response = store.response;
  if (response === null) {
    el.textContent = "awaiting evaluation";
    return;
  }
  const total = document.createElement("p");
  total.className = "score-total";
  const totalLabel = document.createElement("span");
  totalLabel.textContent = "score ";
  const totalValue = document.createElement("strong");
  totalValue.dataset.field = "score-total";
  totalValue.textContent = String(response.score.total);
  total.append(totalLabel, totalValue);
  el.append(total);

  const entries = Object.entries(response.aggregates);
  if (entries.length > 0) {
    const table = document.createElement("table");
    table.className = "aggregates";
    const body = document.createElement("tbody");
    for (const [attribute, value] of entries) {
      const row = document.createElement("tr");
      row.dataset.aggregate = attribute;
      const name = document.createElement("td");
      name.textContent = attribute;
      const amount = document.createElement("td");
      amount.textContent = String(value);
      row.append(name, amount);
      body.append(row);
    }
    table.append(body);
    el.append(table);
  }
}

function renderDerivation(
  fact: string,
  byFact: Map<string, TraceStep>,
  ancestors: Set<string>,
): HTMLElement {
  const item = document.createElement("div");
  item.className = "derivation";
  const head = document.createElement("div");
  head.className = "derivation-fact";
  head.dataset.derives = fact;
  const step = byFact.get(fact);
  if (step === undefined || ancestors.has(fact)) {
    head.textContent = `${fact} (given)`;
    item.append(head);
    return item;
  }
  head.textContent = `${fact} ← rule ${step.rule}`;
  item.append(head);
  const list = document.createElement("ul");
  ancestors.add(fact);
  for (const support of step.supports) {
    const entry = document.createElement("li");
    entry.append(renderDerivation(support, byFact, ancestors));
    list.append(entry);
  }
  ancestors.delete(fact);
  item.append(list);
  return item;
}

export function renderTraceView(el: HTMLElement, trace: TracePayload, focusFact: string): void {
  el.textContent = "";
  const heading = document.createElement("h3");
  heading.textContent = `derivation of ${focusFact}`;
  el.append(heading);
  const byFact = new Map(trace.steps.map((step) => [step.fact, step]));
  el.append(renderDerivation(focusFact, byFact, new Set()));
}
