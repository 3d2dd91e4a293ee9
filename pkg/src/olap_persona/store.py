"""Instance storage and grouped aggregation.

Dimension and fact rows are loaded from CSV (UTF-8, comma-separated, header
line first) and held in memory; `DataStore.aggregate` is the single cell
oracle every multidimensional table is computed from.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .errors import EngineError
from .schema import (
    ALL_LEVEL,
    Constellation,
    ElementRef,
    MeasureSpec,
    PARAMETER,
    WEAK_ATTRIBUTE,
    MEASURE,
    canon,
)

Value = str | int | float

COMPARATORS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Predicate:
    """One normalized restriction conjunct: element <comparator> literal."""

    ref: ElementRef
    op: str
    literal: Value

    def holds(self, value: Value) -> bool:
        left, right = _comparable(value, self.literal)
        if self.op == "=":
            return left == right
        if self.op == "!=":
            return left != right
        if self.op == "<":
            return left < right
        if self.op == "<=":
            return left <= right
        if self.op == ">":
            return left > right
        if self.op == ">=":
            return left >= right
        raise EngineError("unknown-comparator", self.op)


def _comparable(value: Value, literal: Value) -> tuple:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        try:
            return float(value), float(literal)
        except (TypeError, ValueError):
            return str(value), str(literal)
    return str(value), str(literal)


@dataclass(frozen=True)
class Restriction:
    """Conjunction of predicates; empty means true."""

    predicates: tuple[Predicate, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.predicates)


TRUE = Restriction()


@dataclass
class DimensionRows:
    """Loaded instances of one dimension, keyed by its finest parameter."""

    dimension: str
    key: str
    columns: tuple[str, ...]
    rows: list[dict[str, Value]] = field(default_factory=list)  # canon(attr) -> value
    by_key: dict[Value, dict[str, Value]] = field(default_factory=dict)


@dataclass
class FactRows:
    """Loaded instances of one fact: measures plus one key per starred dimension."""

    fact: str
    rows: list[dict[str, Value]] = field(default_factory=list)  # canon(col) -> value


@dataclass(frozen=True)
class CellGrid:
    """Header tuples plus the sparse cell map; absent means no contributing rows."""

    row_tuples: tuple[tuple[Value, ...], ...]
    col_tuples: tuple[tuple[Value, ...], ...]
    cells: dict[tuple[tuple[Value, ...], tuple[Value, ...], MeasureSpec], float]


def format_value(v: Value) -> str:
    """Canonical text form of a header component or cell value."""
    if isinstance(v, float):
        if v == int(v) and abs(v) < 1e15:
            return str(int(v))
        text = f"{v:.2f}".rstrip("0").rstrip(".")
        return text
    return str(v)


def _read_csv(stream) -> list[list[str]]:
    if isinstance(stream, bytes):
        text = stream.decode("utf-8")
    elif isinstance(stream, str):
        text = stream
    else:
        raw = stream.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    return [row for row in csv.reader(io.StringIO(text)) if row]


def ref_column(dim_name: str) -> str:
    return f"{dim_name.casefold()}_ref"


class DataStore:
    """In-memory instance store bound to one constellation."""

    def __init__(self, constellation: Constellation):
        self.constellation = constellation
        self.dimensions: dict[str, DimensionRows] = {}  # canon(dim) -> rows
        self.facts: dict[str, FactRows] = {}  # canon(fact) -> rows

    # Loading ---------------------------------------------------------------

    def load_dimension_rows(self, dim: str, stream) -> DimensionRows:
        d = self.constellation.dimension(dim)
        parsed = _read_csv(stream)
        if not parsed:
            raise EngineError("header-mismatch", f"dimension {d.name!r}: empty CSV")
        header = parsed[0]
        declared = {canon(a.name): a for a in d.attributes}
        seen = [canon(h.strip()) for h in header]
        if sorted(seen) != sorted(declared):
            raise EngineError(
                "header-mismatch",
                f"dimension {d.name!r}: CSV columns {header} do not match attributes "
                f"{[a.name for a in d.attributes]}",
            )
        key_attr = canon(d.key_attribute)
        loaded = DimensionRows(
            dimension=d.name,
            key=d.key_attribute,
            columns=tuple(declared[c].name for c in seen),
        )
        for line in parsed[1:]:
            row: dict[str, Value] = {}
            for col, raw in zip(seen, line):
                row[col] = _typed(declared[col].value_kind, raw.strip(), d.name, declared[col].name)
            key = row[key_attr]
            if key in loaded.by_key:
                raise EngineError("duplicate-key", f"dimension {d.name!r}: duplicate key {key!r}")
            loaded.by_key[key] = row
            loaded.rows.append(row)
        _check_dependencies(d, loaded)
        self.dimensions[canon(d.name)] = loaded
        return loaded

    def load_fact_rows(self, fact: str, stream) -> FactRows:
        f = self.constellation.fact(fact)
        dims = self.constellation.star_of(f.name)
        for dim in dims:
            if canon(dim) not in self.dimensions:
                raise EngineError("unresolved-reference", f"dimension {dim!r} not loaded yet")
        parsed = _read_csv(stream)
        if not parsed:
            raise EngineError("header-mismatch", f"fact {f.name!r}: empty CSV")
        header = [canon(h.strip()) for h in parsed[0]]
        expected = {canon(m.measure) for m in f.measures} | {ref_column(d) for d in dims}
        if sorted(header) != sorted(expected):
            raise EngineError(
                "header-mismatch",
                f"fact {f.name!r}: CSV columns {parsed[0]} do not match measures plus "
                f"{sorted(ref_column(d) for d in dims)}",
            )
        loaded = FactRows(fact=f.name)
        measure_cols = {canon(m.measure) for m in f.measures}
        dim_by_ref = {ref_column(d): canon(d) for d in dims}
        for line in parsed[1:]:
            row: dict[str, Value] = {}
            for col, raw in zip(header, line):
                raw = raw.strip()
                if col in measure_cols:
                    try:
                        row[col] = float(raw)
                    except ValueError:
                        raise EngineError(
                            "non-numeric-measure", f"fact {f.name!r}: {raw!r} is not numeric"
                        ) from None
                else:
                    dim_rows = self.dimensions[dim_by_ref[col]]
                    key = _typed_like(dim_rows.by_key, raw)
                    if key not in dim_rows.by_key:
                        raise EngineError(
                            "unresolved-reference",
                            f"fact {f.name!r}: no {dim_rows.dimension!r} row with key {raw!r}",
                        )
                    row[col] = key
            loaded.rows.append(row)
        self.facts[canon(f.name)] = loaded
        return loaded

    # Aggregation -------------------------------------------------------------

    def aggregate(
        self,
        fact: str,
        specs: list[MeasureSpec] | tuple[MeasureSpec, ...],
        row_attrs: list[ElementRef] | tuple[ElementRef, ...],
        col_attrs: list[ElementRef] | tuple[ElementRef, ...],
        restriction: Restriction = TRUE,
    ) -> CellGrid:
        f = self.constellation.fact(fact)
        fact_rows = self.facts.get(canon(f.name))
        if fact_rows is None:
            raise EngineError("unresolved-reference", f"fact {f.name!r} has no loaded rows")
        specs = tuple(dict.fromkeys(specs))
        for spec in specs:
            if f.measure(spec.measure) is None:
                raise EngineError("unknown-measure", f"fact {f.name!r} has no measure {spec.measure!r}")
        row_plan = _axis_plan(self.constellation, f.name, row_attrs)
        col_plan = _axis_plan(self.constellation, f.name, col_attrs)
        preds = [self._pred_plan(f.name, p) for p in restriction.predicates]

        acc: dict[tuple, _Accumulator] = {}
        for frow in fact_rows.rows:
            if not all(pred.holds(getter(frow)) for pred, getter in preds):
                continue
            rt = row_plan.tuple_of(self, frow)
            ct = col_plan.tuple_of(self, frow)
            for spec in specs:
                key = (rt, ct, spec)
                bucket = acc.get(key)
                if bucket is None:
                    bucket = acc[key] = _Accumulator(spec.agg)
                bucket.add(float(frow[canon(spec.measure)]))

        row_tuples = _sorted_tuples({k[0] for k in acc})
        col_tuples = _sorted_tuples({k[1] for k in acc})
        cells = {key: bucket.result() for key, bucket in acc.items()}
        return CellGrid(row_tuples=row_tuples, col_tuples=col_tuples, cells=cells)

    def _pred_plan(self, fact: str, pred: Predicate):
        ref = pred.ref
        if ref.kind == MEASURE:
            if canon(ref.path[0]) != canon(fact):
                raise EngineError("attr-fact-mismatch", f"{ref.text()!r} is not a measure of {fact!r}")
            col = canon(ref.path[1])
            return pred, lambda frow: frow[col]
        if ref.kind in (PARAMETER, WEAK_ATTRIBUTE):
            dim = ref.path[0]
            if not self.constellation.is_starred(fact, dim):
                raise EngineError("attr-fact-mismatch", f"{dim!r} is not starred by fact {fact!r}")
            rows = self.dimensions[canon(dim)]
            refcol = ref_column(dim)
            attr = canon(ref.path[2])
            return pred, lambda frow: rows.by_key[frow[refcol]][attr]
        raise EngineError("attr-fact-mismatch", f"restriction cannot use {ref.kind} {ref.text()!r}")


def _typed(kind: str, raw: str, dim: str, attr: str) -> Value:
    try:
        if kind == "integer":
            return int(raw)
        if kind == "real":
            return float(raw)
    except ValueError:
        raise EngineError(
            "invalid-value", f"dimension {dim!r}: {attr!r} value {raw!r} is not {kind}"
        ) from None
    return raw


def _typed_like(by_key: dict[Value, dict], raw: str) -> Value:
    """Coerce a fact reference to the key's loaded type."""
    for key in by_key:
        if isinstance(key, int):
            try:
                return int(raw)
            except ValueError:
                return raw
        if isinstance(key, float):
            try:
                return float(raw)
            except ValueError:
                return raw
        break
    return raw


def _check_dependencies(d, loaded: DimensionRows) -> None:
    """Strictness: along each hierarchy each finer value maps to one coarser value,
    and each parameter value fixes its weak attributes."""
    for h in d.hierarchies:
        pairs = list(zip(h.params, h.params[1:]))
        pairs += [(p, w) for p in h.params for w in h.weak.get(p, ())]
        for finer, coarser in pairs:
            mapping: dict[Value, Value] = {}
            for row in loaded.rows:
                fv, cv = row[canon(finer)], row[canon(coarser)]
                if fv in mapping and mapping[fv] != cv:
                    raise EngineError(
                        "dependency-violation",
                        f"dimension {d.name!r}: {finer}={fv!r} maps to both "
                        f"{coarser}={mapping[fv]!r} and {coarser}={cv!r}",
                    )
                mapping[fv] = cv


class _AxisPlan:
    def __init__(self, dim: str, getters):
        self.dim = dim
        self.refcol = ref_column(dim)
        self.getters = getters

    def tuple_of(self, store: DataStore, frow: dict[str, Value]) -> tuple[Value, ...]:
        dim_row = store.dimensions[canon(self.dim)].by_key[frow[self.refcol]]
        return tuple(g(dim_row) for g in self.getters)


def _axis_plan(c: Constellation, fact: str, attrs) -> _AxisPlan:
    if not attrs:
        raise EngineError("mixed-dimension-axis", "axis needs at least one attribute")
    dims = {canon(ref.path[0]) for ref in attrs}
    hiers = {(canon(ref.path[0]), canon(ref.path[1])) for ref in attrs}
    if len(dims) != 1 or len(hiers) != 1:
        raise EngineError("mixed-dimension-axis", "axis attributes span several dimensions/hierarchies")
    dim = attrs[0].path[0]
    if not c.is_starred(fact, dim):
        raise EngineError("attr-fact-mismatch", f"{dim!r} is not starred by fact {fact!r}")
    getters = []
    for ref in attrs:
        if ref.kind not in (PARAMETER, WEAK_ATTRIBUTE):
            raise EngineError("attr-fact-mismatch", f"axis cannot display {ref.kind} {ref.text()!r}")
        attr = ref.path[2]
        if canon(attr) == canon(ALL_LEVEL):
            getters.append(lambda _row: ALL_LEVEL)
        else:
            key = canon(attr)
            getters.append(lambda row, key=key: row[key])
    return _AxisPlan(dim, getters)


def _sorted_tuples(tuples: set[tuple[Value, ...]]) -> tuple[tuple[Value, ...], ...]:
    return tuple(sorted(tuples, key=lambda t: tuple(format_value(v) for v in t)))


class _Accumulator:
    """Exact running aggregate; AVG is kept as sum/count until the end."""

    __slots__ = ("agg", "total", "count", "low", "high")

    def __init__(self, agg: str):
        self.agg = agg
        self.total = 0.0
        self.count = 0
        self.low: float | None = None
        self.high: float | None = None

    def add(self, v: float) -> None:
        self.total += v
        self.count += 1
        self.low = v if self.low is None else min(self.low, v)
        self.high = v if self.high is None else max(self.high, v)

    def result(self) -> float:
        if self.agg == "SUM":
            return self.total
        if self.agg == "COUNT":
            return float(self.count)
        if self.agg == "AVG":
            return self.total / self.count
        if self.agg == "MIN":
            return float(self.low)
        if self.agg == "MAX":
            return float(self.high)
        raise EngineError("unknown-aggregation", self.agg)
