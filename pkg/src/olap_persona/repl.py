"""Operator command language and the interactive shell.

    DISPLAY <fact> ( AGG(measure) [, ...] ) ROWS <dim>.<hier> COLS <dim>.<hier>
        [THRESHOLD n] ;
    ROTATE <dim_old> TO <dim_new>.<hier> [THRESHOLD n] ;
    DRILLDOWN <dim> TO <attr> [THRESHOLD n] ;
    ROLLUP <dim> TO <attr|ALL> [THRESHOLD n] ;
    LOAD SCHEMA|DATA|RULES <path> ;  SET PROFILE <name> ;  SHOW WEIGHTS ;
"""

from __future__ import annotations

import re
import sys

from .engine import Engine, Session
from .errors import EngineError
from .lexing import TokenStream, tokenize
from .render import render_text
from .rule_parser import DISPLAYED
from .rules import AxisContext, OperationContext, fire_rules
from .schema import AGGREGATIONS, MeasureSpec
from .store import format_value

_PUNCTS = ("(", ")", ",", ".", ";")


def run_command(engine: Engine, session: Session, line: str) -> str:
    """Execute one `;`-terminated statement and return its rendered result."""
    try:
        result = _dispatch(engine, session, line)
    except EngineError as err:
        if err.code == "syntax-error":
            raise EngineError("command-syntax-error", err.message, err.position) from None
        raise
    session.history.append(line.strip())
    return result


def _dispatch(engine: Engine, session: Session, line: str) -> str:
    load = re.match(r"\s*load\s+(schema|data|rules)\s+(.+?)\s*;\s*$", line, re.I | re.S)
    if load:
        kind, path = load.group(1).casefold(), load.group(2)
        if kind == "schema":
            c = engine.load_schema_file(path)
            return f"schema {c.name}: {len(c.facts)} fact(s), {len(c.dimensions)} dimension(s)"
        if kind == "data":
            loaded = engine.load_data_dir(path)
            return "loaded " + ", ".join(loaded)
        names = engine.load_rules_file(path, session.profile)
        return "registered " + ", ".join(names)

    ts = TokenStream(tokenize(line, puncts=_PUNCTS))
    head = ts.expect_word(
        "DISPLAY", "ROTATE", "DRILLDOWN", "ROLLUP", "LOAD", "SET", "SHOW"
    ).folded
    if head == "load":
        ts.expect_word("SCHEMA", "DATA", "RULES")
        raise EngineError("command-syntax-error", "missing path")

    if head == "set":
        ts.expect_word("PROFILE")
        name = ts.expect_ident().text
        ts.expect_punct(";")
        session.profile = engine.profile(name).name
        return f"profile {session.profile}"

    if head == "show":
        ts.expect_word("WEIGHTS")
        ts.expect_punct(";")
        return _show_weights(engine, session)

    if head == "display":
        fact = ts.expect_ident().text
        ts.expect_punct("(")
        specs = [_parse_spec(ts)]
        while ts.accept_punct(","):
            specs.append(_parse_spec(ts))
        ts.expect_punct(")")
        ts.expect_word("ROWS")
        dl, hl = _parse_dim_hier(ts)
        ts.expect_word("COLS")
        dc, hc = _parse_dim_hier(ts)
        threshold = _parse_threshold(ts)
        ts.expect_punct(";")
        table = engine.display(session, fact, specs, dl, hl, dc, hc, threshold)
        return render_text(table)

    if head == "rotate":
        d_old = ts.expect_ident().text
        ts.expect_word("TO")
        d_new, h_new = _parse_dim_hier(ts)
        threshold = _parse_threshold(ts)
        ts.expect_punct(";")
        return render_text(engine.rotate(session, d_old, d_new, h_new, threshold))

    dim = ts.expect_ident().text
    ts.expect_word("TO")
    attr = ts.expect_ident().text
    threshold = _parse_threshold(ts)
    ts.expect_punct(";")
    if head == "drilldown":
        return render_text(engine.drilldown(session, dim, attr, threshold))
    return render_text(engine.rollup(session, dim, attr, threshold))


def _parse_spec(ts: TokenStream) -> MeasureSpec:
    agg = ts.expect_word(*AGGREGATIONS).text.upper()
    ts.expect_punct("(")
    measure = ts.expect_ident().text
    ts.expect_punct(")")
    return MeasureSpec(agg, measure)


def _parse_dim_hier(ts: TokenStream) -> tuple[str, str]:
    dim = ts.expect_ident().text
    ts.expect_punct(".")
    hier = ts.expect_ident().text
    return dim, hier


def _parse_threshold(ts: TokenStream) -> float | None:
    if ts.accept_word("THRESHOLD"):
        tok = ts.peek()
        value = float(ts.expect_number().text)
        if not 0.0 <= value <= 1.0:
            raise EngineError(
                "weight-out-of-range", f"threshold {tok.text} is outside [0, 1]", (tok.line, tok.col)
            )
        return value
    return None


def _show_weights(engine: Engine, session: Session) -> str:
    c, _ = engine.require_schema()
    if session.table is None:
        raise EngineError("no-current-table", "run DISPLAY first")
    t = session.table
    ctx = OperationContext(
        kind=DISPLAYED,
        fact=t.fact,
        specs=t.specs,
        row=AxisContext(t.rows.dim, t.rows.hier, t.rows.attrs),
        col=AxisContext(t.cols.dim, t.cols.hier, t.cols.attrs),
    )
    wa = fire_rules(engine.profile(session.profile), c, ctx)
    entries = sorted(wa.entries(), key=lambda e: e.ref.text())
    if not entries:
        return "no weights assigned"
    width = max(len(e.ref.text()) for e in entries)
    return "\n".join(
        f"{e.ref.text().ljust(width)}  {format_value(e.weight)}  ({e.rule})" for e in entries
    )


def repl_loop(engine: Engine, profile: str) -> None:
    """Interactive shell; statements may span lines and end with `;`."""
    session = engine.create_session(profile)
    print(f"olap-persona — profile {session.profile!r}; end statements with ';', exit with .quit")
    buffer = ""
    while True:
        try:
            prompt = "olap> " if not buffer else "  ... "
            line = input(prompt)
        except EOFError:
            print()
            return
        if not buffer and line.strip() in {".quit", ".exit"}:
            return
        buffer = (buffer + "\n" + line).strip()
        if not buffer.endswith(";"):
            continue
        statement, buffer = buffer, ""
        try:
            print(run_command(engine, session, statement))
        except EngineError as err:
            print(f"error: {err}", file=sys.stderr)
