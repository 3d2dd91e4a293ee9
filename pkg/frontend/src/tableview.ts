/** DOM rendering of the pivot grid; every number comes from the payload. */

import type { TablePayload } from "./api.js";
import { buildViewModel } from "./viewmodel.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderTable(container: HTMLElement, payload: TablePayload): void {
  container.replaceChildren();
  let vm;
  try {
    vm = buildViewModel(payload);
  } catch (err) {
    const banner = el("div", "error-banner", `cannot render table — ${(err as Error).message}`);
    container.appendChild(banner);
    return;
  }

  const caption = el("div", "table-caption", `${vm.fact} — ${vm.specs.join(", ")}`);
  container.appendChild(caption);

  if (vm.empty) {
    container.appendChild(el("div", "placeholder", "no data"));
    return;
  }

  const table = el("table", "pivot");
  const thead = el("thead");
  const nLeft = vm.rowAttrs.length;

  vm.colHeaderRows.forEach((spans, level) => {
    const tr = el("tr");
    const corner = el("th", "corner", level === 0 ? vm.colLabel : "");
    corner.colSpan = nLeft;
    tr.appendChild(corner);
    const label = el("th", "axis-attr", vm.colAttrs[level] ?? "");
    tr.appendChild(label);
    for (const span of spans) {
      const th = el("th", "col-header", span.text);
      th.colSpan = span.span;
      tr.appendChild(th);
    }
    thead.appendChild(tr);
  });

  if (vm.measureRow.length > 0) {
    const tr = el("tr");
    const corner = el("th", "corner", "");
    corner.colSpan = nLeft + 1;
    tr.appendChild(corner);
    for (const label of vm.measureRow) {
      tr.appendChild(el("th", "measure", label));
    }
    thead.appendChild(tr);
  }

  const attrLine = el("tr");
  for (const attr of vm.rowAttrs) {
    attrLine.appendChild(el("th", "axis-attr", attr));
  }
  const rowLabel = el("th", "corner", vm.rowLabel);
  rowLabel.colSpan = 1 + vm.colTuples.length * vm.specs.length;
  attrLine.appendChild(rowLabel);
  thead.appendChild(attrLine);
  table.appendChild(thead);

  const tbody = el("tbody");
  for (const row of vm.body) {
    const tr = el("tr");
    for (const header of row.headers) {
      if (header === null) continue; // covered by a rowspan above
      const th = el("th", "row-header", header.text);
      th.rowSpan = header.span;
      tr.appendChild(th);
    }
    tr.appendChild(el("td", "spacer", ""));
    for (const value of row.values) {
      tr.appendChild(el("td", value === null ? "cell absent" : "cell", value === null ? "" : String(value)));
    }
    tbody.appendChild(tr);
  }
  table.appendChild(tbody);
  container.appendChild(table);
}
