#!/usr/bin/env python3
"""Walk the case-study analysis once classically and once personalized.

Usage: python scripts/demo_session.py [--threshold 0.5]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from olap_persona.engine import Engine
from olap_persona.repl import run_command

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--threshold", type=float, default=0.5)
    args = parser.parse_args()
    thr = args.threshold

    engine = Engine()
    engine.load_schema_file(ROOT / "fixtures" / "schema.ddl")
    engine.load_data_dir(ROOT / "fixtures" / "data")
    engine.load_rules_file(ROOT / "fixtures" / "rules.rul", "demo")
    session = engine.create_session("demo")

    steps = [
        "DISPLAY Ventes (SUM(Montant)) ROWS Clients.HGEO COLS Produits.HPRO;",
        f"DISPLAY Ventes (SUM(Montant)) ROWS Clients.HGEO COLS Produits.HPRO THRESHOLD {thr};",
        f"ROTATE Produits TO Temps.HTPS THRESHOLD {thr};",
        "ROLLUP Temps TO ALL;",
    ]
    for command in steps:
        print(f"olap> {command}")
        print(run_command(engine, session, command))
        print()

    print("weights behind the personalized display:")
    wa = engine.weights_for("demo", fact="Ventes", rowdim="Clients", coldim="Produits")
    for entry in sorted(wa.entries(), key=lambda e: e.ref.text()):
        print(f"  {entry.ref.text()} = {entry.weight} ({entry.rule})")


if __name__ == "__main__":
    main()
