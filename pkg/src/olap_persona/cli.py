"""Command-line entry point: load fixtures, then serve HTTP or run the REPL."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .engine import Engine
from .errors import EngineError
from .repl import repl_loop

DEFAULT_PROFILE_VAR = "OLAP_PERSONA_PROFILE"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="olap-persona",
        description="Personalized multidimensional analysis engine",
    )
    parser.add_argument("--schema", metavar="FILE", help="schema definition file")
    parser.add_argument("--data", metavar="DIR", help="directory of <name>.csv instance files")
    parser.add_argument("--rules", metavar="FILE", help="rule file registered to the default profile")
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--serve", metavar="ADDR:PORT", help="run the HTTP API (and UI when built)")
    mode.add_argument("--repl", action="store_true", help="run the interactive shell")
    parser.add_argument(
        "--profile",
        default=os.environ.get(DEFAULT_PROFILE_VAR, "default"),
        help=f"default profile (or ${DEFAULT_PROFILE_VAR})",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    engine = Engine()
    try:
        if args.schema:
            engine.load_schema_file(args.schema)
        if args.data:
            engine.load_data_dir(args.data)
        if args.rules:
            engine.load_rules_file(args.rules, args.profile)
    except EngineError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1

    if args.repl:
        repl_loop(engine, args.profile)
        return 0

    import uvicorn

    from .server import create_app

    host, _, port = args.serve.rpartition(":")
    static = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    app = create_app(engine, static_dir=static if static.is_dir() else None)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
