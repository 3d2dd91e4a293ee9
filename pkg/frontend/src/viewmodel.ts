/** Pure pivot-grid model derived from a table payload.

Header tuples are recovered from the cell list and sorted the same way the
server sorts them (per-component codepoint order), so the client never
reorders or invents data: absent cells stay null, never zero. */

import type { TablePayload } from "./api.js";

export interface Span {
  text: string;
  span: number;
}

export interface BodyRow {
  /** One entry per row attribute; null when merged into the span above. */
  headers: (Span | null)[];
  /** One entry per (column tuple x measure); null when the cell is absent. */
  values: (number | null)[];
}

export interface TableViewModel {
  fact: string;
  specs: string[];
  rowAttrs: string[];
  colAttrs: string[];
  rowLabel: string;
  colLabel: string;
  /** One header line per column attribute, cells carry colspans. */
  colHeaderRows: Span[][];
  /** Per data column measure labels; shown when more than one measure. */
  measureRow: string[];
  rowTuples: string[][];
  colTuples: string[][];
  body: BodyRow[];
  empty: boolean;
}

function codepoints(s: string): number[] {
  return Array.from(s, (ch) => ch.codePointAt(0) ?? 0);
}

function compareStrings(a: string, b: string): number {
  const ca = codepoints(a);
  const cb = codepoints(b);
  for (let i = 0; i < Math.min(ca.length, cb.length); i++) {
    const x = ca[i]!;
    const y = cb[i]!;
    if (x !== y) return x - y;
  }
  return ca.length - cb.length;
}

export function compareTuples(a: string[], b: string[]): number {
  for (let i = 0; i < Math.min(a.length, b.length); i++) {
    const cmp = compareStrings(a[i]!, b[i]!);
    if (cmp !== 0) return cmp;
  }
  return a.length - b.length;
}

function uniqueSortedTuples(tuples: string[][]): string[][] {
  const seen = new Map<string, string[]>();
  for (const t of tuples) {
    seen.set(JSON.stringify(t), t);
  }
  return [...seen.values()].sort(compareTuples);
}

function assertPayload(payload: TablePayload): void {
  const bad = (what: string) => {
    throw new Error(`malformed payload: ${what}`);
  };
  if (!payload || typeof payload !== "object") bad("not an object");
  if (!payload.subject || typeof payload.subject.fact !== "string") bad("missing subject");
  if (!Array.isArray(payload.subject.specs)) bad("missing specs");
  for (const axis of [payload.rows, payload.cols]) {
    if (!axis || !Array.isArray(axis.attrs) || typeof axis.dim !== "string") bad("missing axis");
  }
  if (!Array.isArray(payload.cells)) bad("missing cells");
  for (const cell of payload.cells) {
    if (!Array.isArray(cell.row) || cell.row.length !== payload.rows.attrs.length) {
      bad("cell row arity");
    }
    if (!Array.isArray(cell.col) || cell.col.length !== payload.cols.attrs.length) {
      bad("cell col arity");
    }
    if (typeof cell.value !== "number" || typeof cell.measure !== "string") bad("cell value");
    if (!payload.subject.specs.includes(cell.measure)) bad(`unknown measure ${cell.measure}`);
  }
}

/** Spans for one header level: consecutive tuples sharing their prefix up to
 * `level` merge into one cell. */
export function headerSpans(tuples: string[][], level: number, repeat: number): Span[] {
  const row: Span[] = [];
  let i = 0;
  while (i < tuples.length) {
    let j = i + 1;
    const prefix = JSON.stringify(tuples[i]!.slice(0, level + 1));
    while (j < tuples.length && JSON.stringify(tuples[j]!.slice(0, level + 1)) === prefix) {
      j++;
    }
    row.push({ text: tuples[i]![level]!, span: (j - i) * repeat });
    i = j;
  }
  return row;
}

export function buildViewModel(payload: TablePayload): TableViewModel {
  assertPayload(payload);
  const specs = payload.subject.specs;
  const rowTuples = uniqueSortedTuples(payload.cells.map((c) => c.row));
  const colTuples = uniqueSortedTuples(payload.cells.map((c) => c.col));

  const lookup = new Map<string, number>();
  for (const cell of payload.cells) {
    lookup.set(JSON.stringify([cell.row, cell.col, cell.measure]), cell.value);
  }

  const colHeaderRows = payload.cols.attrs.map((_attr, level) =>
    headerSpans(colTuples, level, specs.length),
  );
  const measureRow: string[] = [];
  if (specs.length > 1) {
    for (let i = 0; i < colTuples.length; i++) {
      measureRow.push(...specs);
    }
  }

  const body: BodyRow[] = rowTuples.map((tuple, index) => {
    const headers: (Span | null)[] = payload.rows.attrs.map((_a, level) => {
      const prefix = JSON.stringify(tuple.slice(0, level + 1));
      if (index > 0 && JSON.stringify(rowTuples[index - 1]!.slice(0, level + 1)) === prefix) {
        return null; // merged into the span opened above
      }
      let span = 1;
      for (let j = index + 1; j < rowTuples.length; j++) {
        if (JSON.stringify(rowTuples[j]!.slice(0, level + 1)) !== prefix) break;
        span++;
      }
      return { text: tuple[level]!, span };
    });
    const values: (number | null)[] = [];
    for (const col of colTuples) {
      for (const spec of specs) {
        const value = lookup.get(JSON.stringify([tuple, col, spec]));
        values.push(value === undefined ? null : value);
      }
    }
    return { headers, values };
  });

  return {
    fact: payload.subject.fact,
    specs,
    rowAttrs: payload.rows.attrs,
    colAttrs: payload.cols.attrs,
    rowLabel: `${payload.rows.dim}.${payload.rows.hier}`,
    colLabel: `${payload.cols.dim}.${payload.cols.hier}`,
    colHeaderRows,
    measureRow,
    rowTuples,
    colTuples,
    body,
    empty: payload.cells.length === 0,
  };
}
