/** Operation pickers and request builders.

The pickers enumerate exactly what the server accepts: rotate targets are the
fact's starred dimensions not already on the other axis, drill targets are
strictly finer parameters of the displayed hierarchy, roll targets the
coarser-or-equal ones plus All. */

import type { OpRequest, SchemaDto, TablePayload } from "./api.js";

export interface DimHier {
  dim: string;
  hier: string;
}

function dimension(schema: SchemaDto, name: string) {
  const d = schema.dimensions.find((x) => x.name.toLowerCase() === name.toLowerCase());
  if (!d) throw new Error(`unknown dimension ${name}`);
  return d;
}

function hierarchy(schema: SchemaDto, dim: string, hier: string) {
  const d = dimension(schema, dim);
  const h = d.hierarchies.find((x) => x.name.toLowerCase() === hier.toLowerCase());
  if (!h) throw new Error(`unknown hierarchy ${dim}.${hier}`);
  return h;
}

function starred(schema: SchemaDto, fact: string): string[] {
  const f = schema.facts.find((x) => x.name.toLowerCase() === fact.toLowerCase());
  return f ? f.dimensions : [];
}

/** Level of a parameter or weak attribute; params index from 0 (finest). */
export function levelOf(schema: SchemaDto, dim: string, hier: string, attr: string): number {
  const h = hierarchy(schema, dim, hier);
  if (attr === "All") return h.params.length;
  const index = h.params.findIndex((p) => p === attr);
  if (index >= 0) return index;
  for (const [owner, weaks] of Object.entries(h.weak)) {
    if (weaks.includes(attr)) return h.params.indexOf(owner);
  }
  throw new Error(`unknown attribute ${attr}`);
}

function finestDisplayedLevel(schema: SchemaDto, axis: TablePayload["rows"]): number {
  const h = hierarchy(schema, axis.dim, axis.hier);
  const paramLevels = axis.attrs
    .filter((a) => a === "All" || h.params.includes(a))
    .map((a) => levelOf(schema, axis.dim, axis.hier, a));
  return paramLevels.length ? Math.min(...paramLevels) : h.params.length;
}

export function displayChoices(schema: SchemaDto, fact: string): DimHier[] {
  const out: DimHier[] = [];
  for (const dim of starred(schema, fact)) {
    for (const h of dimension(schema, dim).hierarchies) {
      out.push({ dim, hier: h.name });
    }
  }
  return out;
}

/** Dimensions/hierarchies a given axis of the table may rotate to. */
export function rotateTargets(schema: SchemaDto, table: TablePayload, axis: "rows" | "cols"): DimHier[] {
  const other = axis === "rows" ? table.cols : table.rows;
  return displayChoices(schema, table.subject.fact).filter(
    (t) => t.dim.toLowerCase() !== other.dim.toLowerCase(),
  );
}

/** Parameters strictly finer than the finest displayed one. */
export function drillTargets(schema: SchemaDto, table: TablePayload, axis: "rows" | "cols"): string[] {
  const ax = axis === "rows" ? table.rows : table.cols;
  const h = hierarchy(schema, ax.dim, ax.hier);
  const floor = finestDisplayedLevel(schema, ax);
  return h.params.filter((p) => levelOf(schema, ax.dim, ax.hier, p) < floor);
}

/** Parameters coarser than or equal to the finest displayed one, plus All. */
export function rollTargets(schema: SchemaDto, table: TablePayload, axis: "rows" | "cols"): string[] {
  const ax = axis === "rows" ? table.rows : table.cols;
  const h = hierarchy(schema, ax.dim, ax.hier);
  const floor = finestDisplayedLevel(schema, ax);
  const params = h.params.filter((p) => levelOf(schema, ax.dim, ax.hier, p) >= floor);
  return [...params, "All"];
}

export interface ThresholdState {
  enabled: boolean;
  value: number; // 0..1, step 0.05
}

function withThreshold(op: OpRequest, threshold: ThresholdState): OpRequest {
  if (threshold.enabled) {
    return { ...op, threshold: threshold.value };
  }
  return op;
}

export function buildDisplayRequest(
  fact: string,
  specs: { agg: string; measure: string }[],
  rows: DimHier,
  cols: DimHier,
  threshold: ThresholdState,
): OpRequest {
  return withThreshold(
    {
      kind: "display",
      fact,
      specs,
      rowdim: rows.dim,
      rowhier: rows.hier,
      coldim: cols.dim,
      colhier: cols.hier,
    },
    threshold,
  );
}

export function buildRotateRequest(
  table: TablePayload,
  axis: "rows" | "cols",
  target: DimHier,
  threshold: ThresholdState,
): OpRequest {
  const old = axis === "rows" ? table.rows : table.cols;
  return withThreshold(
    { kind: "rotate", d_old: old.dim, d_new: target.dim, hier: target.hier },
    threshold,
  );
}

export function buildDrillRequest(
  table: TablePayload,
  axis: "rows" | "cols",
  attr: string,
  threshold: ThresholdState,
): OpRequest {
  const ax = axis === "rows" ? table.rows : table.cols;
  return withThreshold({ kind: "drilldown", dim: ax.dim, attr }, threshold);
}

export function buildRollupRequest(
  table: TablePayload,
  axis: "rows" | "cols",
  attr: string,
  threshold: ThresholdState,
): OpRequest {
  const ax = axis === "rows" ? table.rows : table.cols;
  return withThreshold({ kind: "rollup", dim: ax.dim, attr }, threshold);
}
