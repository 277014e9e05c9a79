/**
 * Interactive AND/OR tree view.
 *
 * The structure is rendered once from the model; selection checkmarks and
 * per-node status badges are patched in place afterwards so expanded value
 * panels and focus survive evaluation updates. All statuses come from the
 * engine's evaluation reply — nothing is computed locally.
 */

import { CharacteristicValue, ModelNode, ModelPayload } from "./contracts.js";
import { SelectionStore } from "./state.js";

export interface TreeCallbacks {
  onToggle(id: string): void;
}

function formatValue(value: CharacteristicValue): string {
  if (typeof value === "number") return String(value);
  return value.series.map(([x, y]) => `${x} → ${y}`).join(", ");
}

function valuesPanel(values: Record<string, CharacteristicValue>): HTMLElement {
  const list = document.createElement("dl");
  list.className = "values";
  for (const [name, value] of Object.entries(values)) {
    const term = document.createElement("dt");
    term.textContent = name;
    const detail = document.createElement("dd");
    detail.textContent = formatValue(value);
    list.append(term, detail);
  }
  return list;
}

function renderNode(
  id: string,
  byId: Map<string, ModelNode>,
  values: Map<string, Record<string, CharacteristicValue>>,
  store: SelectionStore,
  callbacks: TreeCallbacks,
): HTMLLIElement {
  const node = byId.get(id);
  const item = document.createElement("li");
  if (node === undefined) {
    item.textContent = `missing node: ${id}`;
    return item;
  }
  item.dataset.nodeId = node.id;

  const row = document.createElement("div");
  row.className = "node-row";
  row.dataset.rowFor = node.id;

  const label = document.createElement("label");
  const checkbox = document.createElement("input");
  checkbox.type = "checkbox";
  checkbox.dataset.toggle = node.id;
  checkbox.checked = store.has(node.id);
  checkbox.addEventListener("change", () => callbacks.onToggle(node.id));
  const text = document.createElement("span");
  text.className = "node-label";
  text.textContent = node.label;
  label.append(checkbox, text);
  row.append(label);

  const connector = node.connector.toLowerCase();
  if (connector === "and" || connector === "or") {
    const badge = document.createElement("span");
    badge.className = `badge connector-${connector}`;
    badge.textContent = connector.toUpperCase();
    row.append(badge);
  }

  const kind = document.createElement("span");
  kind.className = "kind";
  kind.textContent = node.kind;
  row.append(kind);

  const status = document.createElement("span");
  status.className = "status";
  status.dataset.statusOf = node.id;
  row.append(status);

  const nodeValues = values.get(node.id);
  if (nodeValues !== undefined) {
    const panel = valuesPanel(nodeValues);
    panel.hidden = true;
    const button = document.createElement("button");
    button.type = "button";
    button.className = "values-toggle";
    button.textContent = "values";
    button.addEventListener("click", () => {
      panel.hidden = !panel.hidden;
    });
    row.append(button);
    item.append(row, panel);
  } else {
    item.append(row);
  }

  if (node.children !== undefined && node.children.length > 0) {
    const children = document.createElement("ul");
    children.className = "children";
    for (const childId of node.children) {
      children.append(renderNode(childId, byId, values, store, callbacks));
    }
    item.append(children);
  }
  return item;
}

export function renderTree(
  container: HTMLElement,
  model: ModelPayload,
  store: SelectionStore,
  callbacks: TreeCallbacks,
): void {
  container.textContent = "";
  const byId = new Map(model.hierarchy.nodes.map((node) => [node.id, node]));
  const values = new Map(model.tables.map((table) => [table.node_id, table.values]));
  const list = document.createElement("ul");
  list.className = "tree";
  list.append(renderNode(model.hierarchy.root_id, byId, values, store, callbacks));
  container.append(list);
}

/** Patch checkmarks and status badges to match the store. */
export function updateTreeState(container: HTMLElement, store: SelectionStore): void {
  for (const input of container.querySelectorAll<HTMLInputElement>("input[data-toggle]")) {
    input.checked = store.has(input.dataset.toggle ?? "");
  }
  for (const badge of container.querySelectorAll<HTMLElement>("[data-status-of]")) {
    const status = store.statusOf(badge.dataset.statusOf ?? "");
    badge.textContent = status;
    badge.className = status === "" ? "status" : `status status-${status}`;
  }
}
