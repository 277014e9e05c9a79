/**
 * Ranked variant table and the report download lists.
 *
 * Variant rows come straight from the engine's ranking; clicking a row
 * hands its exact selection back to the app, which loads it into the tree.
 */

import { ReportsPayload, VariantsPayload } from "./contracts.js";

export interface ReportUrls {
  staticReportUrl(id: string): string;
  pivotReportUrl(id: string): string;
}

export function renderVariants(
  el: HTMLElement,
  payload: VariantsPayload,
  onPick: (selected: string[]) => void,
): void {
  el.textContent = "";
  if (payload.truncated) {
    const notice = document.createElement("p");
    notice.className = "truncation-notice";
    notice.dataset.field = "truncated";
    notice.textContent = `showing first ${payload.variants.length} variants; raise the limit to see more`;
    el.append(notice);
  }
  if (payload.variants.length === 0) {
    const note = document.createElement("p");
    note.className = "quiet";
    note.textContent = "no passing configurations";
    el.append(note);
    return;
  }
  const table = document.createElement("table");
  table.className = "variants";
  const head = document.createElement("thead");
  const headRow = document.createElement("tr");
  for (const title of ["#", "score", "selection", "derived facts"]) {
    const cell = document.createElement("th");
    cell.textContent = title;
    headRow.append(cell);
  }
  head.append(headRow);
  const body = document.createElement("tbody");
  payload.variants.forEach((variant, index) => {
    const row = document.createElement("tr");
    row.className = "variant-row";
    row.dataset.variantIndex = String(index);
    row.title = "load this configuration into the tree";
    const rank = document.createElement("td");
    rank.textContent = String(index + 1);
    const total = document.createElement("td");
    total.dataset.field = "variant-total";
    total.textContent = String(variant.score.total);
    const selection = document.createElement("td");
    selection.textContent = variant.selected.join(", ");
    const derived = document.createElement("td");
    derived.textContent = variant.derived.join(", ");
    row.append(rank, total, selection, derived);
    row.addEventListener("click", () => onPick([...variant.selected]));
    body.append(row);
  });
  table.append(head, body);
  el.append(table);
}

export function renderReports(el: HTMLElement, payload: ReportsPayload, urls: ReportUrls): void {
  el.textContent = "";
  const statics = document.createElement("ul");
  statics.className = "report-list";
  for (const report of payload.statics) {
    const item = document.createElement("li");
    const link = document.createElement("a");
    link.href = urls.staticReportUrl(report.id);
    link.dataset.staticReport = report.id;
    link.setAttribute("download", `${report.id}.xml`);
    link.textContent = `${report.title} (XML)`;
    item.append(link);
    statics.append(item);
  }
  const pivots = document.createElement("ul");
  pivots.className = "report-list";
  for (const report of payload.pivots) {
    const item = document.createElement("li");
    const link = document.createElement("a");
    link.href = urls.pivotReportUrl(report.id);
    link.dataset.pivotReport = report.id;
    link.setAttribute("download", `${report.id}.csv`);
    link.textContent = `${report.id} on ${report.cube} (CSV)`;
    item.append(link);
    pivots.append(item);
  }
  const staticsHeading = document.createElement("h3");
  staticsHeading.textContent = "static reports";
  const pivotsHeading = document.createElement("h3");
  pivotsHeading.textContent = "pivot reports";
  el.append(staticsHeading, statics, pivotsHeading, pivots);
}
