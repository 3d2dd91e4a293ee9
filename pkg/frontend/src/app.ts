/** Single-page analyst client: session bootstrap, operation toolbar, pivot
 * table and rule editor. One operation in flight at a time. */

import { Api, ApiError, type SchemaDto, type TablePayload } from "./api.js";
import { formatError, inspectorContext } from "./ruleeditor.js";
import { renderTable } from "./tableview.js";
import {
  buildDisplayRequest,
  buildDrillRequest,
  buildRollupRequest,
  buildRotateRequest,
  displayChoices,
  drillTargets,
  rollTargets,
  rotateTargets,
  type ThresholdState,
} from "./toolbar.js";

const api = new Api("");

interface AppState {
  schema: SchemaDto;
  sessionId: string;
  profile: string;
  table: TablePayload | null;
  pending: boolean;
}

function $(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function option(value: string, label = value): HTMLOptionElement {
  const o = document.createElement("option");
  o.value = value;
  o.textContent = label;
  return o;
}

function fillSelect(select: HTMLSelectElement, values: { value: string; label?: string }[]): void {
  select.replaceChildren();
  for (const v of values) {
    select.appendChild(option(v.value, v.label ?? v.value));
  }
  select.disabled = values.length === 0;
}

function threshold(state: AppState): ThresholdState {
  const enabled = ($("thr-on") as HTMLInputElement).checked;
  const value = Number(($("thr-value") as HTMLInputElement).value);
  void state;
  return { enabled, value };
}

function setStatus(text: string, isError = false): void {
  const node = $("status");
  node.textContent = text;
  node.className = isError ? "status error" : "status";
}

async function guardOp(state: AppState, run: () => Promise<TablePayload>): Promise<void> {
  if (state.pending) return;
  state.pending = true;
  document.querySelectorAll("button, select, input").forEach((n) => {
    (n as HTMLButtonElement).disabled = true;
  });
  try {
    state.table = await run();
    renderTable($("table-host"), state.table);
    setStatus("ok");
  } catch (err) {
    if (err instanceof ApiError) {
      setStatus(
        err.body.position
          ? `${err.body.code} at ${err.body.position.line}:${err.body.position.col}: ${err.body.message}`
          : `${err.body.code}: ${err.body.message}`,
        true,
      );
    } else {
      setStatus(String(err), true);
    }
  } finally {
    state.pending = false;
    document.querySelectorAll("button, select, input").forEach((n) => {
      (n as HTMLButtonElement).disabled = false;
    });
    refreshPickers(state);
    void refreshWeights(state);
  }
}

function refreshPickers(state: AppState): void {
  const { schema, table } = state;
  const fact = ($("display-fact") as HTMLSelectElement).value || schema.facts[0]?.name || "";
  const choices = displayChoices(schema, fact).map((c) => ({
    value: `${c.dim}.${c.hier}`,
  }));
  fillSelect($("display-rows") as HTMLSelectElement, choices);
  fillSelect(
    $("display-cols") as HTMLSelectElement,
    choices.length > 1 ? choices.slice(1).concat(choices.slice(0, 1)) : choices,
  );

  const axisSelect = $("op-axis") as HTMLSelectElement;
  if (!table) {
    fillSelect(axisSelect, []);
    fillSelect($("rotate-target") as HTMLSelectElement, []);
    fillSelect($("drill-target") as HTMLSelectElement, []);
    fillSelect($("roll-target") as HTMLSelectElement, []);
    return;
  }
  fillSelect(axisSelect, [
    { value: "rows", label: `rows: ${table.rows.dim}.${table.rows.hier}` },
    { value: "cols", label: `cols: ${table.cols.dim}.${table.cols.hier}` },
  ]);
  const axis = (axisSelect.value || "rows") as "rows" | "cols";
  fillSelect(
    $("rotate-target") as HTMLSelectElement,
    rotateTargets(schema, table, axis).map((c) => ({ value: `${c.dim}.${c.hier}` })),
  );
  fillSelect(
    $("drill-target") as HTMLSelectElement,
    drillTargets(schema, table, axis).map((value) => ({ value })),
  );
  fillSelect(
    $("roll-target") as HTMLSelectElement,
    rollTargets(schema, table, axis).map((value) => ({ value })),
  );
}

async function refreshWeights(state: AppState): Promise<void> {
  const host = $("weights-host");
  if (!state.table) {
    host.textContent = "display a table to inspect weights";
    return;
  }
  try {
    const { weights } = await api.getWeights(state.profile, inspectorContext(state.table));
    const thr = threshold(state);
    const lines = weights.map(
      (w) => `${w.element} = ${w.weight}${thr.enabled && w.weight >= thr.value ? "  (qualifies)" : ""}  [${w.rule}]`,
    );
    host.textContent = lines.length
      ? `threshold: ${thr.enabled ? thr.value : "off"}\n${lines.join("\n")}`
      : "no weights for this context";
  } catch (err) {
    host.textContent = String(err);
  }
}

async function refreshRules(state: AppState): Promise<void> {
  const { rules } = await api.listRules(state.profile);
  const list = $("rule-list");
  list.replaceChildren();
  for (const rule of rules) {
    const item = document.createElement("li");
    const name = document.createElement("code");
    name.textContent = rule.name;
    const remove = document.createElement("button");
    remove.textContent = "delete";
    remove.addEventListener("click", async () => {
      await api.deleteRule(state.profile, rule.name);
      await refreshRules(state);
      void refreshWeights(state);
    });
    item.appendChild(name);
    item.appendChild(remove);
    item.title = rule.source;
    list.appendChild(item);
  }
}

function wireToolbar(state: AppState): void {
  $("display-run").addEventListener("click", () => {
    const fact = ($("display-fact") as HTMLSelectElement).value;
    const [rd, rh] = ($("display-rows") as HTMLSelectElement).value.split(".");
    const [cd, ch] = ($("display-cols") as HTMLSelectElement).value.split(".");
    const factDto = state.schema.facts.find((f) => f.name === fact);
    if (!factDto || !rd || !rh || !cd || !ch) return;
    const specs = factDto.measures.map((m) => ({ agg: m.agg, measure: m.name }));
    void guardOp(state, () =>
      api.runOp(
        state.sessionId,
        buildDisplayRequest(fact, specs, { dim: rd, hier: rh }, { dim: cd, hier: ch }, threshold(state)),
      ),
    );
  });
  $("op-axis").addEventListener("change", () => refreshPickers(state));
  $("rotate-run").addEventListener("click", () => {
    if (!state.table) return;
    const axis = (($("op-axis") as HTMLSelectElement).value || "rows") as "rows" | "cols";
    const [dim, hier] = ($("rotate-target") as HTMLSelectElement).value.split(".");
    if (!dim || !hier) return;
    void guardOp(state, () =>
      api.runOp(state.sessionId, buildRotateRequest(state.table!, axis, { dim, hier }, threshold(state))),
    );
  });
  $("drill-run").addEventListener("click", () => {
    if (!state.table) return;
    const axis = (($("op-axis") as HTMLSelectElement).value || "rows") as "rows" | "cols";
    const attr = ($("drill-target") as HTMLSelectElement).value;
    if (!attr) return;
    void guardOp(state, () =>
      api.runOp(state.sessionId, buildDrillRequest(state.table!, axis, attr, threshold(state))),
    );
  });
  $("roll-run").addEventListener("click", () => {
    if (!state.table) return;
    const axis = (($("op-axis") as HTMLSelectElement).value || "rows") as "rows" | "cols";
    const attr = ($("roll-target") as HTMLSelectElement).value;
    if (!attr) return;
    void guardOp(state, () =>
      api.runOp(state.sessionId, buildRollupRequest(state.table!, axis, attr, threshold(state))),
    );
  });
  $("thr-on").addEventListener("change", () => void refreshWeights(state));
  $("thr-value").addEventListener("change", () => {
    $("thr-label").textContent = ($("thr-value") as HTMLInputElement).value;
    void refreshWeights(state);
  });
}

function wireRuleEditor(state: AppState): void {
  $("rule-submit").addEventListener("click", async () => {
    const sourceNode = $("rule-source") as HTMLTextAreaElement;
    const errorNode = $("rule-error");
    errorNode.textContent = "";
    try {
      await api.addRule(state.profile, sourceNode.value);
      sourceNode.value = "";
      await refreshRules(state);
      void refreshWeights(state);
    } catch (err) {
      if (err instanceof ApiError) {
        errorNode.textContent = formatError(sourceNode.value, err.body);
      } else {
        errorNode.textContent = String(err);
      }
    }
  });
}

export async function boot(): Promise<void> {
  const profile = ($("profile-select") as HTMLSelectElement).value || "default";
  const schema = await api.getSchema();
  const session = await api.createSession(profile);
  const state: AppState = {
    schema,
    sessionId: session.session_id,
    profile: session.profile,
    table: null,
    pending: false,
  };
  fillSelect($("display-fact") as HTMLSelectElement, schema.facts.map((f) => ({ value: f.name })));
  refreshPickers(state);
  wireToolbar(state);
  wireRuleEditor(state);
  await refreshRules(state);
  await refreshWeights(state);
  setStatus(`session ${state.sessionId} (profile ${state.profile})`);
  $("profile-select").addEventListener("change", () => {
    window.location.reload();
  });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot();
}
