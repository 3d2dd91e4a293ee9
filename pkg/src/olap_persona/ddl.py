"""Parser for the schema definition language.

One statement per `;`:

    DEFINE DIMENSION <name>
      HIERARCHY <hname> : <p0> -> <p1> -> ... [WEAK <attr> ON <param>]*
      [HIERARCHY ...]* ;
    DEFINE FACT <name> ( <AGG>(<measure>) [, ...] ) CONNECT <dim> [, <dim>]* ;
"""

from __future__ import annotations

from .errors import EngineError
from .lexing import TokenStream, tokenize
from .schema import (
    AGGREGATIONS,
    Attribute,
    Constellation,
    Dimension,
    Fact,
    Hierarchy,
    MeasureSpec,
    build_constellation,
    canon,
)

_PUNCTS = ("->", "(", ")", ",", ";", ":")


def parse_schema(source: str, name: str = "constellation") -> Constellation:
    """Parse DDL text into a validated constellation."""
    ts = TokenStream(tokenize(source, puncts=_PUNCTS))
    dims: list[Dimension] = []
    facts: list[Fact] = []
    star: dict[str, list[str]] = {}
    while not ts.at_end():
        ts.expect_word("DEFINE")
        what = ts.expect_word("DIMENSION", "FACT")
        if what.folded == "dimension":
            dims.append(_parse_dimension(ts))
        else:
            fact, linked = _parse_fact(ts)
            facts.append(fact)
            star[fact.name] = linked
        ts.expect_punct(";")
    return build_constellation(name, dims, facts, star)


def _parse_dimension(ts: TokenStream) -> Dimension:
    name = ts.expect_ident().text
    hierarchies: list[Hierarchy] = []
    attrs: dict[str, Attribute] = {}
    ts.expect_word("HIERARCHY")
    while True:
        hname = ts.expect_ident().text
        ts.expect_punct(":")
        params = [ts.expect_ident().text]
        while ts.accept_punct("->"):
            params.append(ts.expect_ident().text)
        weak: dict[str, list[str]] = {}
        while ts.accept_word("WEAK"):
            wname = ts.expect_ident().text
            ts.expect_word("ON")
            owner_tok = ts.expect_ident()
            owner = next((p for p in params if canon(p) == owner_tok.folded), None)
            if owner is None:
                raise EngineError(
                    "hierarchy-attribute-missing",
                    f"WEAK {wname!r}: {owner_tok.text!r} is not a parameter of {hname!r}",
                    (owner_tok.line, owner_tok.col),
                )
            weak.setdefault(owner, []).append(wname)
            attrs.setdefault(canon(wname), Attribute(wname))
        for p in params:
            attrs.setdefault(canon(p), Attribute(p))
        hierarchies.append(Hierarchy(hname, tuple(params), {p: tuple(w) for p, w in weak.items()}))
        if not ts.accept_word("HIERARCHY"):
            break
    return Dimension(name, tuple(attrs.values()), tuple(hierarchies))


def _parse_fact(ts: TokenStream) -> tuple[Fact, list[str]]:
    name = ts.expect_ident().text
    ts.expect_punct("(")
    measures = [_parse_measure_spec(ts)]
    while ts.accept_punct(","):
        measures.append(_parse_measure_spec(ts))
    ts.expect_punct(")")
    ts.expect_word("CONNECT")
    linked = [ts.expect_ident().text]
    while ts.accept_punct(","):
        linked.append(ts.expect_ident().text)
    return Fact(name, tuple(measures)), linked


def _parse_measure_spec(ts: TokenStream) -> MeasureSpec:
    agg = ts.expect_word(*AGGREGATIONS)
    ts.expect_punct("(")
    measure = ts.expect_ident().text
    ts.expect_punct(")")
    return MeasureSpec(agg.text.upper(), measure)
