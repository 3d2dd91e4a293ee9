"""Constellation metamodel: dimensions with multi-hierarchies, facts, star links.

A constellation is immutable once built; `build_constellation` is the single
validating constructor. Name matching is case-insensitive everywhere, with the
declared spelling kept as canonical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EngineError

AGGREGATIONS = ("SUM", "AVG", "MIN", "MAX", "COUNT")

#: Pseudo-parameter sitting one level above the coarsest parameter of every
#: hierarchy; never user-declared.
ALL_LEVEL = "All"

VALUE_KINDS = ("text", "integer", "real")


def canon(name: str) -> str:
    """Case-insensitive lookup key; declared spelling stays canonical."""
    return name.casefold()


@dataclass(frozen=True)
class Attribute:
    name: str
    value_kind: str = "text"  # one of VALUE_KINDS


@dataclass(frozen=True)
class MeasureSpec:
    """A measure observed through an aggregation function, e.g. SUM(Montant)."""

    agg: str
    measure: str

    def label(self) -> str:
        return f"{self.agg}({self.measure})"


@dataclass(frozen=True, eq=False)
class Hierarchy:
    name: str
    params: tuple[str, ...]  # finest (level 0) to coarsest
    weak: dict[str, tuple[str, ...]] = field(default_factory=dict)  # param -> weak attrs

    def level_of(self, attr: str) -> int:
        """Granularity level of a parameter, weak attribute or the All token."""
        key = canon(attr)
        if key == canon(ALL_LEVEL):
            return len(self.params)
        for i, p in enumerate(self.params):
            if canon(p) == key:
                return i
            if any(canon(w) == key for w in self.weak.get(p, ())):
                return i
        raise EngineError("attr-not-in-hierarchy", f"{attr!r} is not in hierarchy {self.name!r}")

    def weak_owner(self, attr: str) -> str | None:
        key = canon(attr)
        for p, weaks in self.weak.items():
            if any(canon(w) == key for w in weaks):
                return p
        return None

    def find(self, attr: str) -> str | None:
        """Declared spelling of a parameter/weak attribute, or None."""
        key = canon(attr)
        for p in self.params:
            if canon(p) == key:
                return p
            for w in self.weak.get(p, ()):
                if canon(w) == key:
                    return w
        if key == canon(ALL_LEVEL):
            return ALL_LEVEL
        return None

    def is_parameter(self, attr: str) -> bool:
        key = canon(attr)
        return key == canon(ALL_LEVEL) or any(canon(p) == key for p in self.params)

    def attrs(self) -> list[str]:
        """All parameters and weak attributes, finest first, weaks after their owner."""
        out: list[str] = []
        for p in self.params:
            out.append(p)
            out.extend(self.weak.get(p, ()))
        return out

    @property
    def coarsest(self) -> str:
        return self.params[-1]


@dataclass(frozen=True, eq=False)
class Dimension:
    name: str
    attributes: tuple[Attribute, ...]
    hierarchies: tuple[Hierarchy, ...]

    def hierarchy(self, name: str) -> Hierarchy:
        key = canon(name)
        for h in self.hierarchies:
            if canon(h.name) == key:
                return h
        raise EngineError("unknown-hierarchy", f"dimension {self.name!r} has no hierarchy {name!r}")

    def has_hierarchy(self, name: str) -> bool:
        return any(canon(h.name) == canon(name) for h in self.hierarchies)

    def attribute(self, name: str) -> Attribute | None:
        key = canon(name)
        for a in self.attributes:
            if canon(a.name) == key:
                return a
        return None

    @property
    def key_attribute(self) -> str:
        """The finest parameter, shared by all hierarchies of the dimension."""
        return self.hierarchies[0].params[0]


@dataclass(frozen=True, eq=False)
class Fact:
    name: str
    measures: tuple[MeasureSpec, ...]

    def measure(self, name: str) -> MeasureSpec | None:
        key = canon(name)
        for m in self.measures:
            if canon(m.measure) == key:
                return m
        return None


@dataclass(frozen=True, eq=False)
class Constellation:
    name: str
    facts: tuple[Fact, ...]
    dimensions: tuple[Dimension, ...]
    star: dict[str, tuple[str, ...]]  # declared fact name -> declared dimension names

    def dimension(self, name: str) -> Dimension:
        key = canon(name)
        for d in self.dimensions:
            if canon(d.name) == key:
                return d
        raise EngineError("unknown-dimension", f"no dimension named {name!r}")

    def fact(self, name: str) -> Fact:
        key = canon(name)
        for f in self.facts:
            if canon(f.name) == key:
                return f
        raise EngineError("unknown-fact", f"no fact named {name!r}")

    def has_dimension(self, name: str) -> bool:
        return any(canon(d.name) == canon(name) for d in self.dimensions)

    def has_fact(self, name: str) -> bool:
        return any(canon(f.name) == canon(name) for f in self.facts)

    def star_of(self, fact: str) -> tuple[str, ...]:
        f = self.fact(fact)
        return self.star[f.name]

    def is_starred(self, fact: str, dim: str) -> bool:
        return any(canon(d) == canon(dim) for d in self.star_of(fact))


# Element references -------------------------------------------------------

DIMENSION = "dimension"
HIERARCHY = "hierarchy"
PARAMETER = "parameter"
WEAK_ATTRIBUTE = "weak-attribute"
FACT = "fact"
MEASURE = "measure"
AGGREGATED_MEASURE = "aggregated-measure"


@dataclass(frozen=True)
class ElementRef:
    """A resolved reference to one constellation element.

    `path` holds canonical (declared) spellings: (dim,), (dim, hier),
    (dim, hier, attr), (fact,), (fact, measure) or (fact, agg, measure).
    """

    kind: str
    path: tuple[str, ...]

    def key(self) -> tuple[str, ...]:
        return (self.kind,) + tuple(canon(s) for s in self.path)

    def text(self) -> str:
        return ".".join(self.path)


def build_constellation(
    name: str,
    dims: list[Dimension],
    facts: list[Fact],
    star: dict[str, list[str] | tuple[str, ...]],
) -> Constellation:
    """Validate and assemble a constellation; raises EngineError on any defect."""
    seen: dict[str, str] = {}
    for label, named in (("dimension", dims), ("fact", facts)):
        for obj in named:
            key = canon(obj.name)
            if key in seen:
                raise EngineError("duplicate-name", f"{label} {obj.name!r} clashes with {seen[key]!r}")
            seen[key] = obj.name

    for d in dims:
        _validate_dimension(d)
    for f in facts:
        _validate_fact(f)

    dim_names = {canon(d.name): d.name for d in dims}
    fact_names = {canon(f.name): f.name for f in facts}
    canonical_star: dict[str, tuple[str, ...]] = {}
    for fact_name, linked in star.items():
        if canon(fact_name) not in fact_names:
            raise EngineError("dangling-star-reference", f"star maps unknown fact {fact_name!r}")
        resolved = []
        for dim_name in linked:
            if canon(dim_name) not in dim_names:
                raise EngineError(
                    "dangling-star-reference",
                    f"fact {fact_name!r} is starred to unknown dimension {dim_name!r}",
                )
            resolved.append(dim_names[canon(dim_name)])
        canonical_star[fact_names[canon(fact_name)]] = tuple(dict.fromkeys(resolved))
    for f in facts:
        if not canonical_star.get(f.name):
            raise EngineError("empty-star-entry", f"fact {f.name!r} connects to no dimension")

    return Constellation(name=name, facts=tuple(facts), dimensions=tuple(dims), star=canonical_star)


def _validate_dimension(d: Dimension) -> None:
    attr_keys: dict[str, str] = {}
    for a in d.attributes:
        if a.value_kind not in VALUE_KINDS:
            raise EngineError("unknown-value-kind", f"attribute {a.name!r}: kind {a.value_kind!r}")
        key = canon(a.name)
        if key in attr_keys:
            raise EngineError("duplicate-name", f"dimension {d.name!r}: duplicate attribute {a.name!r}")
        attr_keys[key] = a.name

    if not d.hierarchies:
        raise EngineError("hierarchy-attribute-missing", f"dimension {d.name!r} declares no hierarchy")
    hier_keys: set[str] = set()
    root = canon(d.hierarchies[0].params[0]) if d.hierarchies[0].params else ""
    for h in d.hierarchies:
        if canon(h.name) in hier_keys:
            raise EngineError("duplicate-name", f"dimension {d.name!r}: duplicate hierarchy {h.name!r}")
        hier_keys.add(canon(h.name))
        if not h.params:
            raise EngineError("hierarchy-attribute-missing", f"hierarchy {h.name!r} has no parameters")
        if len({canon(p) for p in h.params}) != len(h.params):
            raise EngineError("duplicate-parameter", f"hierarchy {h.name!r} repeats a parameter")
        if canon(h.params[0]) != root:
            raise EngineError(
                "root-mismatch",
                f"hierarchy {h.name!r} starts at {h.params[0]!r}, not the dimension root",
            )
        param_keys = {canon(p) for p in h.params}
        for p in h.params:
            if canon(p) not in attr_keys:
                raise EngineError(
                    "hierarchy-attribute-missing",
                    f"hierarchy {h.name!r} references unknown attribute {p!r}",
                )
        owned: set[str] = set()
        for p, weaks in h.weak.items():
            if canon(p) not in param_keys:
                raise EngineError(
                    "hierarchy-attribute-missing",
                    f"hierarchy {h.name!r}: weak attributes attached to non-parameter {p!r}",
                )
            for w in weaks:
                if canon(w) not in attr_keys:
                    raise EngineError(
                        "hierarchy-attribute-missing",
                        f"hierarchy {h.name!r} references unknown weak attribute {w!r}",
                    )
                if canon(w) in param_keys:
                    raise EngineError(
                        "weak-attribute-conflict",
                        f"{w!r} cannot be both a parameter and a weak attribute of {h.name!r}",
                    )
                if canon(w) in owned:
                    raise EngineError(
                        "weak-attribute-conflict",
                        f"weak attribute {w!r} attached to two parameters of {h.name!r}",
                    )
                owned.add(canon(w))


def _validate_fact(f: Fact) -> None:
    if not f.measures:
        raise EngineError("unknown-measure", f"fact {f.name!r} declares no measure")
    seen: set[str] = set()
    for spec in f.measures:
        if spec.agg not in AGGREGATIONS:
            raise EngineError("unknown-aggregation", f"fact {f.name!r}: {spec.agg!r}")
        if canon(spec.measure) in seen:
            raise EngineError("duplicate-name", f"fact {f.name!r}: duplicate measure {spec.measure!r}")
        seen.add(canon(spec.measure))


# Path resolution -----------------------------------------------------------


def parse_element_path(text: str) -> tuple[tuple[str, ...], bool]:
    """Split an element spelling into segments; returns (segments, used_brackets).

    Accepts both `A.B.C` and `A[B].C`; the bracketed segment becomes the
    second path segment.
    """
    from . import lexing

    tokens = lexing.TokenStream(lexing.tokenize(text, puncts=("[", "]", ".")))
    segments = [tokens.expect_ident().text]
    bracketed = False
    if tokens.accept_punct("["):
        segments.append(tokens.expect_ident().text)
        tokens.expect_punct("]")
        bracketed = True
    while tokens.accept_punct("."):
        segments.append(tokens.expect_ident().text)
    if not tokens.at_end():
        tokens.fail("end of element")
    return tuple(segments), bracketed


def resolve_element(c: Constellation, path_text: str) -> ElementRef:
    """Resolve a dotted or bracketed element spelling against the constellation."""
    segments, _ = parse_element_path(path_text)
    return resolve_segments(c, segments)


def resolve_segments(c: Constellation, segments: tuple[str, ...]) -> ElementRef:
    text = ".".join(segments)
    if len(segments) == 0 or len(segments) > 3:
        raise EngineError("unresolved-name", f"cannot resolve {text!r}")
    head = segments[0]

    if c.has_dimension(head):
        d = c.dimension(head)
        if len(segments) == 1:
            return ElementRef(DIMENSION, (d.name,))
        if len(segments) == 2:
            second = segments[1]
            if d.has_hierarchy(second):
                return ElementRef(HIERARCHY, (d.name, d.hierarchy(second).name))
            return _resolve_unqualified_attr(d, second, text)
        h = d.hierarchy(segments[1]) if d.has_hierarchy(segments[1]) else None
        if h is None:
            raise EngineError("unresolved-name", f"{text!r}: {segments[1]!r} is not a hierarchy of {d.name!r}")
        return _attr_ref(d, h, segments[2], text)

    if c.has_fact(head):
        f = c.fact(head)
        if len(segments) == 1:
            return ElementRef(FACT, (f.name,))
        if len(segments) == 2:
            m = f.measure(segments[1])
            if m is None:
                raise EngineError("unresolved-name", f"{text!r}: fact {f.name!r} has no measure {segments[1]!r}")
            return ElementRef(MEASURE, (f.name, m.measure))
        agg = segments[1].upper()
        if agg not in AGGREGATIONS:
            raise EngineError("unresolved-name", f"{text!r}: {segments[1]!r} is not an aggregation")
        m = f.measure(segments[2])
        if m is None:
            raise EngineError("unresolved-name", f"{text!r}: fact {f.name!r} has no measure {segments[2]!r}")
        return ElementRef(AGGREGATED_MEASURE, (f.name, agg, m.measure))

    raise EngineError("unresolved-name", f"no dimension or fact named {head!r}")


def _resolve_unqualified_attr(d: Dimension, attr: str, text: str) -> ElementRef:
    hits = [h for h in d.hierarchies if h.find(attr) is not None]
    if not hits:
        raise EngineError("unresolved-name", f"{text!r}: no attribute {attr!r} in dimension {d.name!r}")
    if len(hits) > 1:
        names = ", ".join(h.name for h in hits)
        raise EngineError("ambiguous-name", f"{text!r}: {attr!r} appears in hierarchies {names}")
    return _attr_ref(d, hits[0], attr, text)


def _attr_ref(d: Dimension, h: Hierarchy, attr: str, text: str) -> ElementRef:
    declared = h.find(attr)
    if declared is None:
        raise EngineError("unresolved-name", f"{text!r}: {attr!r} is not in hierarchy {h.name!r}")
    kind = PARAMETER if h.is_parameter(declared) else WEAK_ATTRIBUTE
    return ElementRef(kind, (d.name, h.name, declared))


def granularity_level(d: Dimension, h: Hierarchy, attr: str) -> int:
    """Level of a parameter (its index), weak attribute (its owner's index) or All."""
    del d  # the hierarchy is self-contained; kept for call-site symmetry
    return h.level_of(attr)
