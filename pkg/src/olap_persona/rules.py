"""Per-profile rule registration, weight registry and rule firing.

Two routes produce the same weights: unconditional rules are materialized
into flat registry entries at registration time (one row per event pattern
and attribute), while `fire_rules` walks the rule ASTs. The registry route is
exposed as `registry_assignment` so the two can be checked against each
other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EngineError
from .rule_parser import (
    And,
    Condition,
    Current,
    DISPLAYED,
    ElementPath,
    EventPattern,
    Not,
    Or,
    Rule,
    parse_rule,
)
from .schema import (
    AGGREGATED_MEASURE,
    ALL_LEVEL,
    Constellation,
    DIMENSION,
    Dimension,
    ElementRef,
    FACT,
    HIERARCHY,
    Hierarchy,
    MEASURE,
    MeasureSpec,
    PARAMETER,
    WEAK_ATTRIBUTE,
    canon,
    resolve_segments,
)


@dataclass(frozen=True)
class AxisContext:
    dim: str
    hier: str
    attrs: tuple[str, ...]


@dataclass(frozen=True)
class OperationContext:
    """The elements involved in the pending operation, post-operation view."""

    kind: str
    fact: str
    specs: tuple[MeasureSpec, ...]
    row: AxisContext
    col: AxisContext
    from_dim: str | None = None
    to_dim: str | None = None
    on_dim: str | None = None
    to_param: str | None = None
    according_hier: str | None = None

    def axes(self) -> tuple[AxisContext, AxisContext]:
        return self.row, self.col


@dataclass(frozen=True)
class WeightedElement:
    ref: ElementRef
    weight: float
    rule: str


class WeightAssignment:
    """Effective weights per attribute/measure element with rule provenance."""

    def __init__(self):
        self._entries: dict[tuple, WeightedElement] = {}

    def assign(self, ref: ElementRef, weight: float, rule: str) -> None:
        self._entries[ref.key()] = WeightedElement(ref, weight, rule)

    def entries(self) -> list[WeightedElement]:
        return list(self._entries.values())

    def groups(self) -> set[tuple]:
        return {_group_of(e.ref) for e in self._entries.values()}

    def merge_defaults(self, defaults: "WeightAssignment") -> "WeightAssignment":
        """Defaults apply only to (dimension, hierarchy) / fact groups this
        assignment says nothing about."""
        merged = WeightAssignment()
        shadowed = self.groups()
        for e in defaults._entries.values():
            if _group_of(e.ref) not in shadowed:
                merged.assign(e.ref, e.weight, e.rule)
        for e in self._entries.values():
            merged.assign(e.ref, e.weight, e.rule)
        return merged

    def attr_weight(self, dim: str, hier: str, attr: str) -> float | None:
        for kind in (PARAMETER, WEAK_ATTRIBUTE):
            e = self._entries.get((kind, canon(dim), canon(hier), canon(attr)))
            if e is not None:
                return e.weight
        return None

    def measure_weight(self, fact: str, measure: str) -> float | None:
        e = self._entries.get((MEASURE, canon(fact), canon(measure)))
        if e is not None:
            return e.weight
        return None

    def as_dict(self) -> dict[str, float]:
        return {e.ref.text(): e.weight for e in self._entries.values()}

    def __len__(self) -> int:
        return len(self._entries)


def _group_of(ref: ElementRef) -> tuple:
    if ref.kind in (PARAMETER, WEAK_ATTRIBUTE):
        return ("attr", canon(ref.path[0]), canon(ref.path[1]))
    return ("measure", canon(ref.path[0]))


@dataclass(frozen=True)
class RegistryEntry:
    """One materialized weight row (the flat-table view of a rule action)."""

    event: str
    element: str  # dimension or fact, declared spelling
    hierarchy: str | None
    attribute: str
    weight: float
    rule: str
    target: ElementRef
    pattern: EventPattern
    ref: ElementRef

    def row(self) -> tuple[str, str, str | None, str, float]:
        return (self.event, self.element, self.hierarchy, self.attribute, self.weight)


@dataclass
class RegisteredRule:
    rule: Rule
    target: ElementRef
    condition: Condition | None  # atoms hold resolved ElementRefs
    actions: tuple[tuple[ElementRef, float], ...]


@dataclass
class Profile:
    """A named analyst profile: ordered rules plus their registry projection."""

    name: str
    rules: list[RegisteredRule] = field(default_factory=list)
    registry: list[RegistryEntry] = field(default_factory=list)

    def rule_names(self) -> list[str]:
        return [r.rule.name for r in self.rules]

    def registry_rows(self) -> list[tuple[str, str, str | None, str, float]]:
        return [e.row() for e in self.registry]


# Registration ----------------------------------------------------------------


def _resolve_path(c: Constellation, path: ElementPath) -> ElementRef:
    try:
        return resolve_segments(c, path.segments)
    except EngineError as err:
        raise EngineError("unresolved-element", err.message, path.pos) from None


def _resolve_condition(c: Constellation, cond: Condition) -> Condition:
    if isinstance(cond, Current):
        return Current(_resolve_path(c, cond.element))  # type: ignore[arg-type]
    if isinstance(cond, Not):
        return Not(_resolve_condition(c, cond.operand))
    if isinstance(cond, And):
        return And(tuple(_resolve_condition(c, op) for op in cond.operands))
    if isinstance(cond, Or):
        return Or(tuple(_resolve_condition(c, op) for op in cond.operands))
    raise EngineError("unresolved-element", f"unknown condition node {cond!r}")


def expand_action(c: Constellation, ref: ElementRef) -> list[ElementRef]:
    """Expand dimension/hierarchy/fact targets down to attribute or measure refs."""
    if ref.kind in (PARAMETER, WEAK_ATTRIBUTE, MEASURE):
        return [ref]
    if ref.kind == AGGREGATED_MEASURE:
        return [ElementRef(MEASURE, (ref.path[0], ref.path[2]))]
    if ref.kind == HIERARCHY:
        d = c.dimension(ref.path[0])
        h = d.hierarchy(ref.path[1])
        return [_attr_ref(d, h, a) for a in h.attrs()]
    if ref.kind == DIMENSION:
        d = c.dimension(ref.path[0])
        out = []
        for h in d.hierarchies:
            out.extend(_attr_ref(d, h, a) for a in h.attrs())
        return out
    if ref.kind == FACT:
        f = c.fact(ref.path[0])
        return [ElementRef(MEASURE, (f.name, m.measure)) for m in f.measures]
    raise EngineError("unresolved-element", f"cannot weight {ref.kind} {ref.text()!r}")


def _attr_ref(d: Dimension, h: Hierarchy, attr: str) -> ElementRef:
    kind = PARAMETER if h.is_parameter(attr) else WEAK_ATTRIBUTE
    return ElementRef(kind, (d.name, h.name, attr))


def register_rule(profile: Profile, c: Constellation, rule: Rule | str) -> RegisteredRule:
    """Resolve a rule against the schema and append it to the profile.

    Unconditional rules additionally materialize registry entries per event
    pattern and expanded attribute; conditional rules stay symbolic.
    """
    if isinstance(rule, str):
        rule = parse_rule(rule)
    if any(canon(r.rule.name) == canon(rule.name) for r in profile.rules):
        raise EngineError("duplicate-rule-name", f"rule {rule.name!r} already registered")
    target = _resolve_path(c, rule.target)
    if target.kind not in (DIMENSION, HIERARCHY, FACT):
        raise EngineError(
            "unresolved-element",
            f"rules attach to a dimension, hierarchy or fact, not {target.kind}",
            rule.target.pos,
        )
    condition = _resolve_condition(c, rule.condition) if rule.condition is not None else None
    actions = tuple((_resolve_path(c, el), w) for el, w in rule.actions)

    registered = RegisteredRule(rule, target, condition, actions)
    profile.rules.append(registered)
    if condition is None:
        for pattern in rule.events:
            for ref, weight in actions:
                for atom in expand_action(c, ref):
                    element, hierarchy, attribute = _entry_columns(atom)
                    profile.registry.append(
                        RegistryEntry(
                            event=pattern.kind,
                            element=element,
                            hierarchy=hierarchy,
                            attribute=attribute,
                            weight=weight,
                            rule=rule.name,
                            target=target,
                            pattern=pattern,
                            ref=atom,
                        )
                    )
    return registered


def _entry_columns(ref: ElementRef) -> tuple[str, str | None, str]:
    if ref.kind in (PARAMETER, WEAK_ATTRIBUTE):
        return ref.path[0], ref.path[1], ref.path[2]
    return ref.path[0], None, ref.path[1]


def drop_rule(profile: Profile, name: str) -> None:
    key = canon(name)
    kept = [r for r in profile.rules if canon(r.rule.name) != key]
    if len(kept) == len(profile.rules):
        raise EngineError("unknown-rule", f"no rule named {name!r}")
    profile.rules = kept
    profile.registry = [e for e in profile.registry if canon(e.rule) != key]


# Firing ----------------------------------------------------------------------


def evaluate_current(ctx: OperationContext, ref: ElementRef) -> bool:
    """Is the element part of the prospective result context?"""
    if ref.kind == FACT:
        return canon(ref.path[0]) == canon(ctx.fact)
    if ref.kind == MEASURE:
        return canon(ref.path[0]) == canon(ctx.fact) and any(
            canon(s.measure) == canon(ref.path[1]) for s in ctx.specs
        )
    if ref.kind == AGGREGATED_MEASURE:
        return canon(ref.path[0]) == canon(ctx.fact) and any(
            s.agg == ref.path[1] and canon(s.measure) == canon(ref.path[2]) for s in ctx.specs
        )
    if ref.kind == DIMENSION:
        return any(canon(ax.dim) == canon(ref.path[0]) for ax in ctx.axes())
    if ref.kind == HIERARCHY:
        return any(
            canon(ax.dim) == canon(ref.path[0]) and canon(ax.hier) == canon(ref.path[1])
            for ax in ctx.axes()
        )
    if ref.kind in (PARAMETER, WEAK_ATTRIBUTE):
        for ax in ctx.axes():
            if canon(ax.dim) == canon(ref.path[0]) and canon(ax.hier) == canon(ref.path[1]):
                return any(canon(a) == canon(ref.path[2]) for a in ax.attrs)
        return False
    return False


def _eval_condition(ctx: OperationContext, cond: Condition) -> bool:
    if isinstance(cond, Current):
        return evaluate_current(ctx, cond.element)  # type: ignore[arg-type]
    if isinstance(cond, Not):
        return not _eval_condition(ctx, cond.operand)
    if isinstance(cond, And):
        return all(_eval_condition(ctx, op) for op in cond.operands)
    if isinstance(cond, Or):
        return any(_eval_condition(ctx, op) for op in cond.operands)
    raise EngineError("unresolved-element", f"unknown condition node {cond!r}")


def _names_equal(pattern_name: str | None, ctx_name: str | None) -> bool:
    if pattern_name is None:
        return True
    return ctx_name is not None and canon(pattern_name) == canon(ctx_name)


def pattern_matches(pattern: EventPattern, ctx: OperationContext, as_kind: str) -> bool:
    """Does the pattern trigger when ctx is read as event kind `as_kind`?

    Unspecified optional fields match anything; specified ones must equal the
    corresponding context field.
    """
    if pattern.kind != as_kind:
        return False
    return (
        _names_equal(pattern.from_dim, ctx.from_dim)
        and _names_equal(pattern.to_dim, ctx.to_dim)
        and _names_equal(pattern.on_dim, ctx.on_dim)
        and _names_equal(pattern.to_param, ctx.to_param)
        and _names_equal(pattern.according_hier, ctx.according_hier)
    )


def _fire_as(profile: Profile, c: Constellation, ctx: OperationContext, as_kind: str) -> WeightAssignment:
    wa = WeightAssignment()
    for rr in profile.rules:
        if not any(pattern_matches(p, ctx, as_kind) for p in rr.rule.events):
            continue
        if not evaluate_current(ctx, rr.target):
            continue
        if rr.condition is not None and not _eval_condition(ctx, rr.condition):
            continue
        for ref, weight in rr.actions:
            for atom in expand_action(c, ref):
                wa.assign(atom, weight, rr.rule.name)
    return wa


def fire_rules(profile: Profile, c: Constellation, ctx: OperationContext) -> WeightAssignment:
    """Apply the profile's rules to the context, in registration order.

    Later assignments overwrite earlier ones per element. For event kinds
    other than DISPLAYED, the DISPLAYED weights serve as defaults for every
    (dimension, hierarchy) group the event-specific rules left untouched.
    """
    assignment = _fire_as(profile, c, ctx, ctx.kind)
    if ctx.kind != DISPLAYED:
        defaults = _fire_as(profile, c, ctx, DISPLAYED)
        assignment = assignment.merge_defaults(defaults)
    return assignment


def registry_assignment(profile: Profile, ctx: OperationContext) -> WeightAssignment:
    """Weights straight from the materialized registry (unconditional rules only)."""

    def apply(as_kind: str) -> WeightAssignment:
        wa = WeightAssignment()
        for entry in profile.registry:
            if not pattern_matches(entry.pattern, ctx, as_kind):
                continue
            if not evaluate_current(ctx, entry.target):
                continue
            wa.assign(entry.ref, entry.weight, entry.rule)
        return wa

    assignment = apply(ctx.kind)
    if ctx.kind != DISPLAYED:
        assignment = assignment.merge_defaults(apply(DISPLAYED))
    return assignment


# Attribute qualification -------------------------------------------------------


def qualified_attributes(
    wa: WeightAssignment,
    threshold: float,
    dim: Dimension,
    hier: Hierarchy,
    level_floor: int = 0,
    forced: str | None = None,
) -> list[str]:
    """Attributes of the hierarchy that the weights qualify for display.

    Takes every parameter/weak attribute at level >= level_floor whose weight
    (missing = 0) reaches the threshold, always includes `forced`, and falls
    back to the coarsest parameter when nothing but weak attributes would
    remain. Ordered coarsest first, parameters before their weak attributes.
    """
    if not 0.0 <= threshold <= 1.0:
        raise EngineError("weight-out-of-range", f"threshold {threshold} is outside [0, 1]")
    chosen: dict[str, None] = {}
    for attr in hier.attrs():
        if hier.level_of(attr) < level_floor:
            continue
        weight = wa.attr_weight(dim.name, hier.name, attr)
        if (weight or 0.0) >= threshold:
            chosen[attr] = None
    if forced is not None:
        declared = hier.find(forced)
        if declared is None:
            raise EngineError("attr-not-in-hierarchy", f"{forced!r} is not in hierarchy {hier.name!r}")
        chosen[declared] = None
    if not any(hier.is_parameter(a) for a in chosen):
        if forced is None:
            chosen = {hier.coarsest: None}
    return order_attributes(hier, list(chosen))


def order_attributes(hier: Hierarchy, attrs: list[str]) -> list[str]:
    """Coarsest level first; at a given level the parameter precedes its weak
    attributes (declared order); All only survives alone."""
    uniq: dict[str, str] = {}
    for a in attrs:
        declared = hier.find(a)
        if declared is None:
            raise EngineError("attr-not-in-hierarchy", f"{a!r} is not in hierarchy {hier.name!r}")
        uniq.setdefault(canon(declared), declared)
    names = list(uniq.values())
    if len(names) > 1:
        names = [n for n in names if canon(n) != canon(ALL_LEVEL)]

    def sort_key(attr: str):
        level = hier.level_of(attr)
        if hier.is_parameter(attr):
            return (-level, 0, 0)
        owner = hier.weak_owner(attr)
        rank = list(hier.weak.get(owner, ())).index(attr) if owner else 0
        return (-level, 1, rank)

    return sorted(names, key=sort_key)
