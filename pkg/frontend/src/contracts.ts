/**
 * JSON contracts for the engine's HTTP API, with runtime validators.
 *
 * Every payload the explorer consumes passes through one of the `as*`
 * functions below, so a server (or test mock) drifting from the published
 * shapes fails loudly at the boundary instead of corrupting UI state.
 */

export interface ModelNode {
  id: string;
  label: string;
  kind: string;
  connector: string;
  children?: string[];
  group_id?: string;
}

export interface SeriesValue {
  series: [number, number][];
}

export type CharacteristicValue = number | SeriesValue;

export interface CharacteristicTable {
  node_id: string;
  values: Record<string, CharacteristicValue>;
}

export interface AttributeDecl {
  name: string;
  value_kind: string;
  aggregation?: string;
  unit?: string;
}

export interface GroupSchema {
  group_id: string;
  attributes: AttributeDecl[];
}

export interface Bound {
  attribute: string;
  comparator: string;
  threshold: number;
}

export interface Constraints {
  payback_limit?: number;
  expenditure_ceiling?: number;
  bounds?: Bound[];
}

export interface ModelPayload {
  hierarchy: { root_id: string; nodes: ModelNode[] };
  schemas: GroupSchema[];
  tables: CharacteristicTable[];
  constraints: Constraints;
}

export interface ScorePayload {
  total: number;
  per_attribute: Record<string, number>;
}

export interface WhatIfPayload {
  admissible: boolean;
  vetoed: boolean;
  violated: string[];
  facts: string[];
  aggregates: Record<string, number>;
  score: ScorePayload;
  statuses: Record<string, string>;
}

export interface VariantEntry {
  selected: string[];
  derived: string[];
  score: ScorePayload;
}

export interface VariantsPayload {
  count: number;
  truncated: boolean;
  variants: VariantEntry[];
}

export interface ReportsPayload {
  statics: { id: string; title: string }[];
  pivots: { id: string; cube: string }[];
}

export interface TraceStep {
  fact: string;
  rule: string;
  supports: string[];
}

export interface TracePayload {
  facts: string[];
  seed: string[];
  vetoed: boolean;
  steps: TraceStep[];
}

export interface HealthPayload {
  status: string;
  version: number;
}

/** Raised when a payload does not match its published contract. */
export class ContractViolation extends Error {
  constructor(where: string) {
    super(`malformed payload: ${where}`);
    this.name = "ContractViolation";
  }
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function record(value: unknown, where: string): Record<string, unknown> {
  if (!isRecord(value)) throw new ContractViolation(`${where} must be an object`);
  return value;
}

function str(value: unknown, where: string): string {
  if (typeof value !== "string") throw new ContractViolation(`${where} must be a string`);
  return value;
}

function num(value: unknown, where: string): number {
  if (typeof value !== "number" || Number.isNaN(value)) {
    throw new ContractViolation(`${where} must be a number`);
  }
  return value;
}

function bool(value: unknown, where: string): boolean {
  if (typeof value !== "boolean") throw new ContractViolation(`${where} must be a boolean`);
  return value;
}

function arr(value: unknown, where: string): unknown[] {
  if (!Array.isArray(value)) throw new ContractViolation(`${where} must be an array`);
  return value;
}

function strArray(value: unknown, where: string): string[] {
  return arr(value, where).map((item, i) => str(item, `${where}[${i}]`));
}

function numMap(value: unknown, where: string): Record<string, number> {
  const raw = record(value, where);
  const out: Record<string, number> = {};
  for (const [key, item] of Object.entries(raw)) out[key] = num(item, `${where}.${key}`);
  return out;
}

function strMap(value: unknown, where: string): Record<string, string> {
  const raw = record(value, where);
  const out: Record<string, string> = {};
  for (const [key, item] of Object.entries(raw)) out[key] = str(item, `${where}.${key}`);
  return out;
}

function score(value: unknown, where: string): ScorePayload {
  const raw = record(value, where);
  return {
    total: num(raw.total, `${where}.total`),
    per_attribute: numMap(raw.per_attribute, `${where}.per_attribute`),
  };
}

function characteristicValue(value: unknown, where: string): CharacteristicValue {
  if (typeof value === "number") return num(value, where);
  const raw = record(value, where);
  const pairs = arr(raw.series, `${where}.series`).map((pair, i) => {
    const cell = arr(pair, `${where}.series[${i}]`);
    if (cell.length !== 2) throw new ContractViolation(`${where}.series[${i}] must be a pair`);
    return [num(cell[0], `${where}.series[${i}][0]`), num(cell[1], `${where}.series[${i}][1]`)] as [number, number];
  });
  return { series: pairs };
}

export function asModelPayload(value: unknown): ModelPayload {
  const raw = record(value, "model");
  const hierarchy = record(raw.hierarchy, "model.hierarchy");
  const nodes = arr(hierarchy.nodes, "model.hierarchy.nodes").map((entry, i) => {
    const node = record(entry, `nodes[${i}]`);
    const out: ModelNode = {
      id: str(node.id, `nodes[${i}].id`),
      label: str(node.label, `nodes[${i}].label`),
      kind: str(node.kind, `nodes[${i}].kind`),
      connector: str(node.connector, `nodes[${i}].connector`),
    };
    if (node.children !== undefined) out.children = strArray(node.children, `nodes[${i}].children`);
    if (node.group_id !== undefined) out.group_id = str(node.group_id, `nodes[${i}].group_id`);
    return out;
  });
  const tables = arr(raw.tables, "model.tables").map((entry, i) => {
    const table = record(entry, `tables[${i}]`);
    const values: Record<string, CharacteristicValue> = {};
    for (const [name, item] of Object.entries(record(table.values, `tables[${i}].values`))) {
      values[name] = characteristicValue(item, `tables[${i}].values.${name}`);
    }
    return { node_id: str(table.node_id, `tables[${i}].node_id`), values };
  });
  const schemas = arr(raw.schemas, "model.schemas").map((entry, i) => {
    const schema = record(entry, `schemas[${i}]`);
    const attributes = arr(schema.attributes, `schemas[${i}].attributes`).map((a, j) => {
      const attr = record(a, `schemas[${i}].attributes[${j}]`);
      const out: AttributeDecl = {
        name: str(attr.name, `schemas[${i}].attributes[${j}].name`),
        value_kind: str(attr.value_kind, `schemas[${i}].attributes[${j}].value_kind`),
      };
      if (attr.aggregation !== undefined) out.aggregation = str(attr.aggregation, "aggregation");
      if (attr.unit !== undefined) out.unit = str(attr.unit, "unit");
      return out;
    });
    return { group_id: str(schema.group_id, `schemas[${i}].group_id`), attributes };
  });
  const constraintsRaw = record(raw.constraints, "model.constraints");
  const constraints: Constraints = {};
  if (constraintsRaw.payback_limit !== undefined) {
    constraints.payback_limit = num(constraintsRaw.payback_limit, "constraints.payback_limit");
  }
  if (constraintsRaw.expenditure_ceiling !== undefined) {
    constraints.expenditure_ceiling = num(constraintsRaw.expenditure_ceiling, "constraints.expenditure_ceiling");
  }
  if (constraintsRaw.bounds !== undefined) {
    constraints.bounds = arr(constraintsRaw.bounds, "constraints.bounds").map((entry, i) => {
      const bound = record(entry, `bounds[${i}]`);
      return {
        attribute: str(bound.attribute, `bounds[${i}].attribute`),
        comparator: str(bound.comparator, `bounds[${i}].comparator`),
        threshold: num(bound.threshold, `bounds[${i}].threshold`),
      };
    });
  }
  return {
    hierarchy: { root_id: str(hierarchy.root_id, "model.hierarchy.root_id"), nodes },
    schemas,
    tables,
    constraints,
  };
}

export function asWhatIfPayload(value: unknown): WhatIfPayload {
  const raw = record(value, "whatif");
  return {
    admissible: bool(raw.admissible, "whatif.admissible"),
    vetoed: bool(raw.vetoed, "whatif.vetoed"),
    violated: strArray(raw.violated, "whatif.violated"),
    facts: strArray(raw.facts, "whatif.facts"),
    aggregates: numMap(raw.aggregates, "whatif.aggregates"),
    score: score(raw.score, "whatif.score"),
    statuses: strMap(raw.statuses, "whatif.statuses"),
  };
}

export function asVariantsPayload(value: unknown): VariantsPayload {
  const raw = record(value, "variants");
  return {
    count: num(raw.count, "variants.count"),
    truncated: bool(raw.truncated, "variants.truncated"),
    variants: arr(raw.variants, "variants.variants").map((entry, i) => {
      const variant = record(entry, `variants[${i}]`);
      return {
        selected: strArray(variant.selected, `variants[${i}].selected`),
        derived: strArray(variant.derived, `variants[${i}].derived`),
        score: score(variant.score, `variants[${i}].score`),
      };
    }),
  };
}

export function asReportsPayload(value: unknown): ReportsPayload {
  const raw = record(value, "reports");
  return {
    statics: arr(raw.statics, "reports.statics").map((entry, i) => {
      const item = record(entry, `statics[${i}]`);
      return { id: str(item.id, `statics[${i}].id`), title: str(item.title, `statics[${i}].title`) };
    }),
    pivots: arr(raw.pivots, "reports.pivots").map((entry, i) => {
      const item = record(entry, `pivots[${i}]`);
      return { id: str(item.id, `pivots[${i}].id`), cube: str(item.cube, `pivots[${i}].cube`) };
    }),
  };
}

export function asTracePayload(value: unknown): TracePayload {
  const raw = record(value, "trace");
  return {
    facts: strArray(raw.facts, "trace.facts"),
    seed: strArray(raw.seed, "trace.seed"),
    vetoed: bool(raw.vetoed, "trace.vetoed"),
    steps: arr(raw.steps, "trace.steps").map((entry, i) => {
      const step = record(entry, `steps[${i}]`);
      return {
        fact: str(step.fact, `steps[${i}].fact`),
        rule: str(step.rule, `steps[${i}].rule`),
        supports: strArray(step.supports, `steps[${i}].supports`),
      };
    }),
  };
}

export function asHealthPayload(value: unknown): HealthPayload {
  const raw = record(value, "health");
  return {
    status: str(raw.status, "health.status"),
    version: num(raw.version, "health.version"),
  };
}
