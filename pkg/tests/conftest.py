from __future__ import annotations

from pathlib import Path

import pytest

from olap_persona.engine import Engine
from olap_persona.rules import AxisContext, OperationContext
from olap_persona.schema import MeasureSpec

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

SUM_MONTANT = MeasureSpec("SUM", "Montant")

# Rule sources from the case study, verbatim where possible.

RULE_TEMPS_UNCONDITIONAL = """\
CREATE RULE display_temps_ventes ON Temps
WHEN displayed
THEN priority(Temps.HTPS.Année, 1),
      priority(Temps.HTPS.Trimestre, 1),
      priority(Temps.HTPS.MoisN, 0),
      priority(Temps.HTPS.Libellém, 1);
"""

# Same priorities, also firing when a rotation lands on TEMPS.
RULE_TEMPS_UNCONDITIONAL_ROTATED = """\
CREATE RULE display_temps_ventes ON Temps
WHEN displayed OR rotated TO Temps
THEN priority(Temps.HTPS.Année, 1),
      priority(Temps.HTPS.Trimestre, 1),
      priority(Temps.HTPS.MoisN, 0),
      priority(Temps.HTPS.Libellém, 1);
"""

RULE_TEMPS_VENTES_MONTHLY = """\
CREATE RULE display_temps_ventes ON Temps
WHEN displayed OR rotated
IF current(Ventes)
THEN priority(Temps.HTPS.Année, 1),
      priority(Temps.HTPS.Trimestre, 0),
      priority(Temps.HTPS.MoisN, 1);
"""

RULE_TEMPS_ACHATS_QUARTERLY = """\
CREATE RULE display_temps_achats ON Temps
WHEN displayed
IF current(Achats)
THEN priority(Temps.HTPS.Année, 1),
      priority(Temps.HTPS.Trimestre, 1),
      priority(Temps.HTPS.MoisN, 0);
"""

# As published; the priority elements misname the dimension, so this text
# parses but does not register against the schema.
RULE_CLIENTS_GEO_VERBATIM = """\
CREATE RULE display_clients ON Clients
WHEN displayed
IF current(HGEO)
THEN priority(Produits.HGEO.CodeCli, 0.4),
      priority(Produits.HGEO.Ville, 0.4),
      priority(Produits.HGEO.DeptN, 0.8),
      priority(Produits.HGEO.Région, 0.6);
"""

RULE_CLIENTS_GEO = """\
CREATE RULE display_clients ON Clients
WHEN displayed
IF current(Clients.HGEO)
THEN priority(Clients.HGEO.CodeCli, 0.4),
      priority(Clients.HGEO.Ville, 0.4),
      priority(Clients.HGEO.DeptN, 0.8),
      priority(Clients.HGEO.Région, 0.6);
"""

RULE_TEMPS_DRILL_WEIGHTS = """\
CREATE RULE display_temps_ventes ON Temps
WHEN displayed
IF current(Ventes)
THEN priority(Temps.HTPS.Année, 0.7),
      priority(Temps.HTPS.Trimestre, 1),
      priority(Temps.HTPS.LibelléM, 0.7),
      priority(Temps.HTPS.MoisN, 0.5);
"""

# Frozen expected cells ------------------------------------------------------

REGION_CLASS_CELLS = {
    (("Midi-Pyrénées",), ("Technologique",)): 2000.0,
    (("Midi-Pyrénées",), ("Habillement",)): 3500.0,
    (("Midi-Pyrénées",), ("Mobilier",)): 1500.0,
    (("Aquitaine",), ("Technologique",)): 1800.0,
    (("Aquitaine",), ("Habillement",)): 3000.0,
    (("Aquitaine",), ("Mobilier",)): 2000.0,
    (("Bretagne",), ("Technologique",)): 1600.0,
    (("Bretagne",), ("Habillement",)): 3200.0,
    (("Bretagne",), ("Mobilier",)): 1900.0,
}

REGION_DEPT_CLASS_CELLS = {
    (("Midi-Pyrénées", "31"), ("Technologique",)): 1200.0,
    (("Midi-Pyrénées", "31"), ("Habillement",)): 2000.0,
    (("Midi-Pyrénées", "31"), ("Mobilier",)): 1000.0,
    (("Midi-Pyrénées", "81"), ("Technologique",)): 800.0,
    (("Midi-Pyrénées", "81"), ("Habillement",)): 1500.0,
    (("Midi-Pyrénées", "81"), ("Mobilier",)): 500.0,
    (("Aquitaine", "33"), ("Technologique",)): 1800.0,
    (("Aquitaine", "33"), ("Habillement",)): 3000.0,
    (("Aquitaine", "33"), ("Mobilier",)): 2000.0,
    (("Bretagne", "22"), ("Technologique",)): 800.0,
    (("Bretagne", "22"), ("Habillement",)): 2000.0,
    (("Bretagne", "22"), ("Mobilier",)): 1000.0,
    (("Bretagne", "29"), ("Technologique",)): 800.0,
    (("Bretagne", "29"), ("Habillement",)): 1200.0,
    (("Bretagne", "29"), ("Mobilier",)): 900.0,
}

# Computed with tests.oracle.oracle_cells over the fixture (sum of every
# region-by-class cell).
GRAND_TOTAL = 20500.0


@pytest.fixture()
def engine() -> Engine:
    e = Engine()
    e.load_schema_file(FIXTURES / "schema.ddl")
    e.load_data_dir(FIXTURES / "data")
    return e


@pytest.fixture()
def constellation(engine):
    return engine.constellation


@pytest.fixture()
def store(engine):
    return engine.store


def single_measure_cells(grid) -> dict:
    """Collapse the per-spec cell keys when exactly one measure is displayed."""
    out = {}
    for (rt, ct, _spec), value in grid.cells.items():
        out[(rt, ct)] = value
    return out


def make_ctx(
    kind: str = "DISPLAYED",
    fact: str = "VENTES",
    specs=(SUM_MONTANT,),
    row=("TEMPS", "HTPS", ("Année",)),
    col=("PRODUITS", "HPRO", ("Classe",)),
    **extra,
) -> OperationContext:
    return OperationContext(
        kind=kind,
        fact=fact,
        specs=tuple(specs),
        row=AxisContext(*row),
        col=AxisContext(*col),
        **extra,
    )
