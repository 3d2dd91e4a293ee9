"""Personalized multidimensional analysis: constellation schemas, ECA weight
rules and threshold-aware OLAP operators."""

from .algebra import Axis, MultidimTable, display, drilldown, rollup, rotate
from .engine import Engine, Session
from .errors import EngineError
from .render import render_text, table_payload
from .rule_parser import Rule, parse_rule, parse_rules, print_rule
from .rules import (
    OperationContext,
    Profile,
    WeightAssignment,
    evaluate_current,
    fire_rules,
    qualified_attributes,
    register_rule,
)
from .schema import (
    Attribute,
    Constellation,
    Dimension,
    ElementRef,
    Fact,
    Hierarchy,
    MeasureSpec,
    build_constellation,
    granularity_level,
    resolve_element,
)
from .store import CellGrid, DataStore, Predicate, Restriction

__all__ = [
    "Axis",
    "Attribute",
    "CellGrid",
    "Constellation",
    "DataStore",
    "Dimension",
    "ElementRef",
    "Engine",
    "EngineError",
    "Fact",
    "Hierarchy",
    "MeasureSpec",
    "MultidimTable",
    "OperationContext",
    "Predicate",
    "Profile",
    "Restriction",
    "Rule",
    "Session",
    "WeightAssignment",
    "build_constellation",
    "display",
    "drilldown",
    "evaluate_current",
    "fire_rules",
    "granularity_level",
    "parse_rule",
    "parse_rules",
    "print_rule",
    "qualified_attributes",
    "register_rule",
    "render_text",
    "resolve_element",
    "rollup",
    "rotate",
    "table_payload",
]
