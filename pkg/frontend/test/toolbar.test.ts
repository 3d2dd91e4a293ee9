import { describe, expect, it } from "vitest";

import type { SchemaDto, TablePayload } from "../src/api.js";
import {
  buildDisplayRequest,
  buildDrillRequest,
  buildRollupRequest,
  buildRotateRequest,
  drillTargets,
  levelOf,
  rollTargets,
  rotateTargets,
} from "../src/toolbar.js";

const SCHEMA: SchemaDto = {
  name: "constellation",
  facts: [
    {
      name: "VENTES",
      measures: [{ name: "Montant", agg: "SUM" }],
      dimensions: ["TEMPS", "CLIENTS", "PRODUITS"],
    },
    { name: "ACHATS", measures: [{ name: "Montant", agg: "SUM" }], dimensions: ["TEMPS", "PRODUITS"] },
  ],
  dimensions: [
    {
      name: "TEMPS",
      hierarchies: [
        { name: "HTPS", params: ["MoisN", "Trimestre", "Année"], weak: { MoisN: ["LibelléM"] } },
      ],
    },
    {
      name: "CLIENTS",
      hierarchies: [{ name: "HGEO", params: ["CodeCli", "Ville", "DeptN", "Région"], weak: {} }],
    },
    { name: "PRODUITS", hierarchies: [{ name: "HPRO", params: ["CodeProduit", "Classe"], weak: {} }] },
  ],
};

function table(rowAttrs: string[], colAttrs: string[]): TablePayload {
  return {
    subject: { fact: "VENTES", specs: ["SUM(Montant)"] },
    rows: { dim: "CLIENTS", hier: "HGEO", attrs: rowAttrs },
    cols: { dim: "TEMPS", hier: "HTPS", attrs: colAttrs },
    cells: [],
  };
}

describe("pickers", () => {
  it("drill picker on [Année] offers Trimestre and MoisN only", () => {
    expect(drillTargets(SCHEMA, table(["Région"], ["Année"]), "cols")).toEqual(["MoisN", "Trimestre"]);
  });

  it("drill picker is empty at the finest level", () => {
    expect(drillTargets(SCHEMA, table(["Région"], ["MoisN"]), "cols")).toEqual([]);
  });

  it("roll picker lists coarser-or-equal parameters plus All", () => {
    expect(rollTargets(SCHEMA, table(["Région"], ["Année", "MoisN"]), "cols")).toEqual([
      "MoisN", "Trimestre", "Année", "All",
    ]);
    expect(rollTargets(SCHEMA, table(["Région"], ["Année"]), "cols")).toEqual(["Année", "All"]);
  });

  it("weak attributes do not lower the displayed floor", () => {
    // LibelléM sits at MoisN's level but only parameters bound the floor
    expect(drillTargets(SCHEMA, table(["Région"], ["Année", "LibelléM"]), "cols")).toEqual([
      "MoisN", "Trimestre",
    ]);
  });

  it("rotate targets exclude the other axis' dimension", () => {
    const targets = rotateTargets(SCHEMA, table(["Région"], ["Année"]), "cols");
    expect(targets).toEqual([
      { dim: "TEMPS", hier: "HTPS" },
      { dim: "PRODUITS", hier: "HPRO" },
    ]);
  });

  it("levelOf counts from the finest parameter", () => {
    expect(levelOf(SCHEMA, "TEMPS", "HTPS", "MoisN")).toBe(0);
    expect(levelOf(SCHEMA, "TEMPS", "HTPS", "LibelléM")).toBe(0);
    expect(levelOf(SCHEMA, "TEMPS", "HTPS", "Année")).toBe(2);
    expect(levelOf(SCHEMA, "TEMPS", "HTPS", "All")).toBe(3);
  });
});

describe("request builders", () => {
  const off = { enabled: false, value: 0.5 };
  const on = { enabled: true, value: 0.5 };

  it("display request includes axes and optional threshold", () => {
    const req = buildDisplayRequest(
      "VENTES",
      [{ agg: "SUM", measure: "Montant" }],
      { dim: "CLIENTS", hier: "HGEO" },
      { dim: "PRODUITS", hier: "HPRO" },
      on,
    );
    expect(req).toEqual({
      kind: "display",
      fact: "VENTES",
      specs: [{ agg: "SUM", measure: "Montant" }],
      rowdim: "CLIENTS", rowhier: "HGEO",
      coldim: "PRODUITS", colhier: "HPRO",
      threshold: 0.5,
    });
  });

  it("threshold off means no threshold key (classic mode)", () => {
    const req = buildRotateRequest(table(["Région"], ["Année"]), "cols", { dim: "PRODUITS", hier: "HPRO" }, off);
    expect(req).toEqual({ kind: "rotate", d_old: "TEMPS", d_new: "PRODUITS", hier: "HPRO" });
    expect("threshold" in req).toBe(false);
  });

  it("drill and roll target the axis dimension", () => {
    expect(buildDrillRequest(table(["Région"], ["Année"]), "cols", "MoisN", on)).toEqual({
      kind: "drilldown", dim: "TEMPS", attr: "MoisN", threshold: 0.5,
    });
    expect(buildRollupRequest(table(["Région"], ["Année"]), "rows", "All", off)).toEqual({
      kind: "rollup", dim: "CLIENTS", attr: "All",
    });
  });
});
