"""Recursive-descent parser and pretty-printer for the personalization rules.

    CREATE RULE <name> ON <element>
    WHEN <event> [OR <event>]*
    [IF <condition>]
    THEN priority(<element>, <weight>) [, ...];

Events: DISPLAYED | ROTATED [FROM d] [TO d] |
        DRILLED-DOWN / ROLLED-UP [ON d] [TO p] [ACCORDING TO h].
Conditions combine current(<element>) atoms with AND/OR/NOT and parentheses.
Weights are decimal literals in [0, 1]. Keywords are case-insensitive and
`--` starts a line comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EngineError
from .lexing import TokenStream, tokenize

DISPLAYED = "DISPLAYED"
ROTATED = "ROTATED"
DRILLED_DOWN = "DRILLED_DOWN"
ROLLED_UP = "ROLLED_UP"

EVENT_KINDS = (DISPLAYED, ROTATED, DRILLED_DOWN, ROLLED_UP)

_PUNCTS = ("(", ")", "[", "]", ",", ".", ";")


@dataclass(frozen=True)
class ElementPath:
    """An element spelling as written, before schema resolution."""

    segments: tuple[str, ...]
    bracketed: bool = False
    pos: tuple[int, int] | None = field(default=None, compare=False)

    def text(self) -> str:
        if self.bracketed and len(self.segments) >= 2:
            rest = "".join("." + s for s in self.segments[2:])
            return f"{self.segments[0]}[{self.segments[1]}]{rest}"
        return ".".join(self.segments)


@dataclass(frozen=True)
class EventPattern:
    kind: str
    from_dim: str | None = None  # ROTATED only
    to_dim: str | None = None  # ROTATED only
    on_dim: str | None = None  # forages only
    to_param: str | None = None  # forages only
    according_hier: str | None = None  # forages only

    def text(self) -> str:
        parts = [self.kind.replace("_", "-")]
        if self.from_dim:
            parts += ["FROM", self.from_dim]
        if self.to_dim:
            parts += ["TO", self.to_dim]
        if self.on_dim:
            parts += ["ON", self.on_dim]
        if self.to_param:
            parts += ["TO", self.to_param]
        if self.according_hier:
            parts += ["ACCORDING", "TO", self.according_hier]
        return " ".join(parts)


# Condition AST --------------------------------------------------------------


@dataclass(frozen=True)
class Current:
    element: ElementPath

    def text(self) -> str:
        return f"current({self.element.text()})"


@dataclass(frozen=True)
class Not:
    operand: "Condition"

    def text(self) -> str:
        return f"NOT {_atom_text(self.operand)}"


@dataclass(frozen=True)
class And:
    operands: tuple["Condition", ...]

    def text(self) -> str:
        return " AND ".join(_atom_text(op) for op in self.operands)


@dataclass(frozen=True)
class Or:
    operands: tuple["Condition", ...]

    def text(self) -> str:
        return " OR ".join(
            f"({op.text()})" if isinstance(op, Or) else op.text() for op in self.operands
        )


Condition = Current | Not | And | Or


def _atom_text(cond: Condition) -> str:
    if isinstance(cond, (And, Or)):
        return f"({cond.text()})"
    return cond.text()


@dataclass(frozen=True)
class Rule:
    name: str
    target: ElementPath
    events: tuple[EventPattern, ...]
    condition: Condition | None
    actions: tuple[tuple[ElementPath, float], ...]


def format_weight(w: float) -> str:
    if w == int(w):
        return str(int(w))
    text = repr(w)
    if "e" in text or "E" in text:
        text = f"{w:.20f}".rstrip("0")
    return text


def print_rule(rule: Rule) -> str:
    """Canonical text form; parsing it back yields an equal Rule."""
    lines = [f"CREATE RULE {rule.name} ON {rule.target.text()}"]
    lines.append("WHEN " + " OR ".join(ev.text() for ev in rule.events))
    if rule.condition is not None:
        lines.append("IF " + rule.condition.text())
    actions = ",\n     ".join(
        f"priority({el.text()}, {format_weight(w)})" for el, w in rule.actions
    )
    lines.append(f"THEN {actions};")
    return "\n".join(lines)


def parse_rule(source: str) -> Rule:
    """Parse exactly one rule statement."""
    ts = TokenStream(tokenize(source, puncts=_PUNCTS, join_hyphen=True))
    rule = _parse_rule(ts)
    if not ts.at_end():
        ts.fail("end of input")
    return rule


def parse_rules(source: str) -> list[Rule]:
    """Parse a rule file: any number of statements."""
    ts = TokenStream(tokenize(source, puncts=_PUNCTS, join_hyphen=True))
    rules = []
    while not ts.at_end():
        rules.append(_parse_rule(ts))
    return rules


def _parse_rule(ts: TokenStream) -> Rule:
    ts.expect_word("CREATE")
    ts.expect_word("RULE")
    name = ts.expect_ident().text
    ts.expect_word("ON")
    target = _parse_element(ts)
    ts.expect_word("WHEN")
    events = [_parse_event(ts)]
    while ts.accept_word("OR"):
        events.append(_parse_event(ts))
    condition = None
    if ts.accept_word("IF"):
        condition = _parse_or(ts)
    ts.expect_word("THEN")
    actions = [_parse_action(ts)]
    while ts.accept_punct(","):
        actions.append(_parse_action(ts))
    ts.expect_punct(";")
    return Rule(name, target, tuple(events), condition, tuple(actions))


def _parse_event(ts: TokenStream) -> EventPattern:
    tok = ts.expect_word("DISPLAYED", "ROTATED", "DRILLED-DOWN", "ROLLED-UP")
    word = tok.folded
    if word == "displayed":
        return EventPattern(DISPLAYED)
    if word == "rotated":
        from_dim = to_dim = None
        if ts.accept_word("FROM"):
            from_dim = ts.expect_ident().text
        if ts.accept_word("TO"):
            to_dim = ts.expect_ident().text
        return EventPattern(ROTATED, from_dim=from_dim, to_dim=to_dim)
    kind = DRILLED_DOWN if word == "drilled-down" else ROLLED_UP
    on_dim = to_param = according = None
    if ts.accept_word("ON"):
        on_dim = ts.expect_ident().text
    if ts.accept_word("TO"):
        to_param = ts.expect_ident().text
    if ts.accept_word("ACCORDING"):
        ts.expect_word("TO")
        according = ts.expect_ident().text
    return EventPattern(kind, on_dim=on_dim, to_param=to_param, according_hier=according)


def _parse_or(ts: TokenStream) -> Condition:
    operands = [_parse_and(ts)]
    while ts.accept_word("OR"):
        operands.append(_parse_and(ts))
    if len(operands) == 1:
        return operands[0]
    return Or(tuple(operands))


def _parse_and(ts: TokenStream) -> Condition:
    operands = [_parse_atom(ts)]
    while ts.accept_word("AND"):
        operands.append(_parse_atom(ts))
    if len(operands) == 1:
        return operands[0]
    return And(tuple(operands))


def _parse_atom(ts: TokenStream) -> Condition:
    if ts.accept_word("NOT"):
        return Not(_parse_atom(ts))
    if ts.accept_punct("("):
        inner = _parse_or(ts)
        ts.expect_punct(")")
        return inner
    ts.expect_word("CURRENT")
    ts.expect_punct("(")
    element = _parse_element(ts)
    ts.expect_punct(")")
    return Current(element)


def _parse_action(ts: TokenStream) -> tuple[ElementPath, float]:
    ts.expect_word("PRIORITY")
    ts.expect_punct("(")
    element = _parse_element(ts)
    ts.expect_punct(",")
    tok = ts.expect_number()
    weight = float(tok.text)
    if not 0.0 <= weight <= 1.0:
        raise EngineError(
            "weight-out-of-range", f"weight {tok.text} is outside [0, 1]", (tok.line, tok.col)
        )
    ts.expect_punct(")")
    return element, weight


def _parse_element(ts: TokenStream) -> ElementPath:
    first = ts.expect_ident()
    segments = [first.text]
    bracketed = False
    if ts.accept_punct("["):
        segments.append(ts.expect_ident().text)
        ts.expect_punct("]")
        bracketed = True
    while ts.accept_punct("."):
        segments.append(ts.expect_ident().text)
    return ElementPath(tuple(segments), bracketed, (first.line, first.col))
