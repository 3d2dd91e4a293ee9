"""Deterministic text rendering and the JSON table payload.

Both the REPL and the HTTP API derive their output from `table_payload`, so
the two surfaces stay byte-identical for the same operation sequence.
"""

from __future__ import annotations

from .algebra import MultidimTable
from .store import format_value


def _blank_repeats(tuples) -> list[list[str]]:
    """Repeated leading components are shown once (merged-cell look)."""
    out: list[list[str]] = []
    prev: tuple | None = None
    for t in tuples:
        line = []
        still_equal = True
        for i, v in enumerate(t):
            text = format_value(v)
            if prev is not None and still_equal and i < len(prev) and prev[i] == v:
                line.append("")
            else:
                still_equal = False
                line.append(text)
        out.append(line)
        prev = t
    return out


def render_text(t: MultidimTable) -> str:
    """Fixed-layout grid: column headers on top, row headers on the left,
    right-aligned numeric cells, absent cells blank."""
    grid = t.grid
    n_left = max(len(t.rows.attrs), 1)
    data_cols = [(ct, spec) for ct in grid.col_tuples for spec in t.specs]

    lines: list[list[str]] = []
    title = [""] * n_left + [""] * len(data_cols)
    title[0] = t.fact
    if data_cols:
        title[n_left] = t.cols.label()
    else:
        title += [t.cols.label()]
    lines.append(title)

    col_headers = _blank_repeats([ct for ct, _ in data_cols])
    for j, attr in enumerate(t.cols.attrs):
        line = [""] * n_left
        line[n_left - 1] = attr
        for k in range(len(data_cols)):
            # a column repeats its tuple once per measure; only the first shows it
            line.append(col_headers[k][j] if k % len(t.specs) == 0 else "")
        lines.append(line)

    spec_line = [""] * n_left
    spec_line[0] = ", ".join(s.label() for s in t.specs)
    if len(t.specs) > 1:
        spec_line += [spec.label() for _, spec in data_cols]
    else:
        spec_line += [""] * len(data_cols)
    lines.append(spec_line)

    axis_line = [""] * (n_left + len(data_cols))
    axis_line[0] = t.rows.label()
    lines.append(axis_line)
    attr_line = list(t.rows.attrs) + [""] * (n_left - len(t.rows.attrs)) + [""] * len(data_cols)
    lines.append(attr_line)

    for rt, header in zip(grid.row_tuples, _blank_repeats(grid.row_tuples)):
        line = header + [""] * (n_left - len(header))
        for ct, spec in data_cols:
            cell = grid.cells.get((rt, ct, spec))
            line.append("" if cell is None else format_value(cell))
        lines.append(line)

    header_lines = 4 + len(t.cols.attrs)
    widths = [0] * max(len(line) for line in lines)
    for line in lines:
        for i, cell in enumerate(line):
            widths[i] = max(widths[i], len(cell))
    rendered = []
    for idx, line in enumerate(lines):
        is_data_row = idx >= header_lines
        cells = []
        for i, cell in enumerate(line):
            if i >= n_left and is_data_row:
                cells.append(cell.rjust(widths[i]))
            else:
                cells.append(cell.ljust(widths[i]))
        rendered.append("  ".join(cells).rstrip())
    return "\n".join(rendered)


def table_payload(t: MultidimTable) -> dict:
    """JSON-ready description of a table: subject, axes and sparse cells."""
    cells = []
    for ri, rt in enumerate(t.grid.row_tuples):
        for ci, ct in enumerate(t.grid.col_tuples):
            for spec in t.specs:
                value = t.grid.cells.get((rt, ct, spec))
                if value is None:
                    continue
                cells.append(
                    {
                        "row": [format_value(v) for v in rt],
                        "col": [format_value(v) for v in ct],
                        "measure": spec.label(),
                        "value": int(value) if value == int(value) else value,
                    }
                )
    return {
        "subject": {"fact": t.fact, "specs": [s.label() for s in t.specs]},
        "rows": {"dim": t.rows.dim, "hier": t.rows.hier, "attrs": list(t.rows.attrs)},
        "cols": {"dim": t.cols.dim, "hier": t.cols.hier, "attrs": list(t.cols.attrs)},
        "cells": cells,
    }
