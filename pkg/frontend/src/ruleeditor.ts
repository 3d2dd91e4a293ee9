/** Rule editing helpers: inline error positioning and the weight inspector
 * context. Server validation errors are rendered, never swallowed. */

import type { ErrorBody, TablePayload } from "./api.js";

/** The offending source line with a caret under the reported column. */
export function positionMarker(source: string, line: number, col: number): string {
  const lines = source.split("\n");
  const text = lines[line - 1] ?? "";
  return `${text}\n${" ".repeat(Math.max(col - 1, 0))}^`;
}

export function formatError(source: string, error: ErrorBody): string {
  if (!error.position) {
    return `${error.code}: ${error.message}`;
  }
  const { line, col } = error.position;
  return `${error.code} at ${line}:${col}: ${error.message}\n${positionMarker(source, line, col)}`;
}

/** Weight-inspector query for the current table's context. */
export function inspectorContext(table: TablePayload | null): Record<string, string> {
  if (!table) return {};
  return {
    event: "DISPLAYED",
    fact: table.subject.fact,
    rowdim: table.rows.dim,
    rowhier: table.rows.hier,
    coldim: table.cols.dim,
    colhier: table.cols.hier,
  };
}
