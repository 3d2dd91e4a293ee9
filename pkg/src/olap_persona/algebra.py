"""Multidimensional tables and the four threshold-aware operators.

Every operator is a pure function of (constellation, store, profile, inputs)
and returns a fresh table whose grid is recomputed through
`DataStore.aggregate`. Without a threshold the operators behave classically
and ignore the profile's rules entirely; with a threshold the displayed
attribute lists come from firing the rules and qualifying attributes against
the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import EngineError
from .rule_parser import DISPLAYED, DRILLED_DOWN, ROLLED_UP, ROTATED
from .rules import (
    AxisContext,
    OperationContext,
    Profile,
    WeightAssignment,
    fire_rules,
    order_attributes,
    qualified_attributes,
)
from .schema import (
    ALL_LEVEL,
    Constellation,
    Dimension,
    ElementRef,
    Hierarchy,
    MeasureSpec,
    PARAMETER,
    WEAK_ATTRIBUTE,
    canon,
)
from .store import CellGrid, DataStore, Restriction, TRUE


@dataclass(frozen=True)
class Axis:
    dim: str
    hier: str
    attrs: tuple[str, ...]  # ordered displayed attributes (All allowed, alone)

    def label(self) -> str:
        return f"{self.dim}.{self.hier}"


@dataclass(frozen=True)
class MultidimTable:
    fact: str
    specs: tuple[MeasureSpec, ...]
    rows: Axis
    cols: Axis
    restriction: Restriction
    grid: CellGrid


def _axis_refs(c: Constellation, axis: Axis) -> list[ElementRef]:
    d = c.dimension(axis.dim)
    h = d.hierarchy(axis.hier)
    refs = []
    for attr in axis.attrs:
        declared = h.find(attr)
        if declared is None:
            raise EngineError("attr-not-in-hierarchy", f"{attr!r} is not in hierarchy {h.name!r}")
        kind = PARAMETER if h.is_parameter(declared) else WEAK_ATTRIBUTE
        refs.append(ElementRef(kind, (d.name, h.name, declared)))
    return refs


def compute_grid(c: Constellation, store: DataStore, t: MultidimTable) -> CellGrid:
    return store.aggregate(
        t.fact, t.specs, _axis_refs(c, t.rows), _axis_refs(c, t.cols), t.restriction
    )


def _finest_displayed_level(h: Hierarchy, attrs: tuple[str, ...]) -> int:
    """Level of the finest displayed parameter (All counts as the top level)."""
    levels = [h.level_of(a) for a in attrs if h.is_parameter(a)]
    if not levels:
        return len(h.params)
    return min(levels)


def _personalized_specs(
    c: Constellation, fact: str, specs: tuple[MeasureSpec, ...], wa: WeightAssignment, threshold: float
) -> tuple[MeasureSpec, ...]:
    """Requested measures always stay; weighted extra measures join with their
    declared default aggregation."""
    out = list(specs)
    named = {canon(s.measure) for s in specs}
    for m in c.fact(fact).measures:
        if canon(m.measure) in named:
            continue
        weight = wa.measure_weight(fact, m.measure)
        if weight is not None and weight >= threshold:
            out.append(m)
    return tuple(out)


def _check_threshold(threshold: float | None) -> None:
    if threshold is not None and not 0.0 <= threshold <= 1.0:
        raise EngineError("weight-out-of-range", f"threshold {threshold} is outside [0, 1]")


def display(
    c: Constellation,
    store: DataStore,
    profile: Profile,
    fact: str,
    specs: list[MeasureSpec] | tuple[MeasureSpec, ...],
    dl: str,
    hl: str,
    dc: str,
    hc: str,
    threshold: float | None = None,
) -> MultidimTable:
    """Build the initial table; classic mode shows the coarsest parameter of
    each hierarchy."""
    _check_threshold(threshold)
    f = c.fact(fact)
    if not specs:
        raise EngineError("unknown-measure", "DISPLAY needs at least one measure")
    canonical = []
    for s in specs:
        m = f.measure(s.measure)
        if m is None:
            raise EngineError("unknown-measure", f"fact {f.name!r} has no measure {s.measure!r}")
        canonical.append(MeasureSpec(s.agg.upper(), m.measure))
    specs = tuple(dict.fromkeys(canonical))
    d_row, d_col = c.dimension(dl), c.dimension(dc)
    if canon(d_row.name) == canon(d_col.name):
        raise EngineError("same-dimension-on-both-axes", f"{d_row.name!r} cannot fill both axes")
    for d in (d_row, d_col):
        if not c.is_starred(f.name, d.name):
            raise EngineError("fact-not-starred", f"fact {f.name!r} is not starred to {d.name!r}")
    h_row, h_col = d_row.hierarchy(hl), d_col.hierarchy(hc)

    row_attrs: list[str] = [h_row.coarsest]
    col_attrs: list[str] = [h_col.coarsest]
    if threshold is not None:
        ctx = OperationContext(
            kind=DISPLAYED,
            fact=f.name,
            specs=specs,
            row=AxisContext(d_row.name, h_row.name, tuple(row_attrs)),
            col=AxisContext(d_col.name, h_col.name, tuple(col_attrs)),
        )
        wa = fire_rules(profile, c, ctx)
        row_attrs = qualified_attributes(wa, threshold, d_row, h_row)
        col_attrs = qualified_attributes(wa, threshold, d_col, h_col)
        specs = _personalized_specs(c, f.name, specs, wa, threshold)

    t = MultidimTable(
        fact=f.name,
        specs=specs,
        rows=Axis(d_row.name, h_row.name, tuple(row_attrs)),
        cols=Axis(d_col.name, h_col.name, tuple(col_attrs)),
        restriction=TRUE,
        grid=CellGrid((), (), {}),
    )
    return replace(t, grid=compute_grid(c, store, t))


def _pick_axis(t: MultidimTable, dim: str) -> tuple[str, Axis]:
    if canon(t.rows.dim) == canon(dim):
        return "rows", t.rows
    if canon(t.cols.dim) == canon(dim):
        return "cols", t.cols
    raise EngineError("dim-not-in-table", f"{dim!r} is not a displayed dimension")


def _with_axis(t: MultidimTable, side: str, axis: Axis) -> MultidimTable:
    return replace(t, rows=axis) if side == "rows" else replace(t, cols=axis)


def rotate(
    c: Constellation,
    store: DataStore,
    profile: Profile,
    t: MultidimTable,
    d_old: str,
    d_new: str,
    h_new: str,
    threshold: float | None = None,
) -> MultidimTable:
    """Swap one analysis axis for a new dimension; amounts are recomputed."""
    _check_threshold(threshold)
    side, _ = _pick_axis(t, d_old)
    other = t.cols if side == "rows" else t.rows
    dim_new = c.dimension(d_new)
    if canon(dim_new.name) == canon(other.dim):
        raise EngineError("rotation-target-conflict", f"{dim_new.name!r} already fills the other axis")
    if not c.is_starred(t.fact, dim_new.name):
        raise EngineError("fact-not-starred", f"fact {t.fact!r} is not starred to {dim_new.name!r}")
    hier_new = dim_new.hierarchy(h_new)

    attrs: list[str] = [hier_new.coarsest]
    specs = t.specs
    if threshold is not None:
        new_axis_ctx = AxisContext(dim_new.name, hier_new.name, tuple(attrs))
        other_ctx = AxisContext(other.dim, other.hier, other.attrs)
        ctx = OperationContext(
            kind=ROTATED,
            fact=t.fact,
            specs=t.specs,
            row=new_axis_ctx if side == "rows" else other_ctx,
            col=new_axis_ctx if side == "cols" else other_ctx,
            from_dim=c.dimension(d_old).name,
            to_dim=dim_new.name,
        )
        wa = fire_rules(profile, c, ctx)
        attrs = qualified_attributes(wa, threshold, dim_new, hier_new)
        specs = _personalized_specs(c, t.fact, t.specs, wa, threshold)

    out = _with_axis(
        replace(t, specs=specs), side, Axis(dim_new.name, hier_new.name, tuple(attrs))
    )
    return replace(out, grid=compute_grid(c, store, out))


def drilldown(
    c: Constellation,
    store: DataStore,
    profile: Profile,
    t: MultidimTable,
    dim: str,
    att_inf: str,
    threshold: float | None = None,
) -> MultidimTable:
    """Refine one displayed dimension down to `att_inf` (no intermediates in
    classic mode)."""
    _check_threshold(threshold)
    side, axis = _pick_axis(t, dim)
    d = c.dimension(axis.dim)
    h = d.hierarchy(axis.hier)
    declared = h.find(att_inf)
    if declared is None or not h.is_parameter(declared) or canon(declared) == canon(ALL_LEVEL):
        raise EngineError("attr-not-in-hierarchy", f"{att_inf!r} is not a parameter of {h.name!r}")
    target_level = h.level_of(declared)
    if target_level >= _finest_displayed_level(h, axis.attrs):
        raise EngineError("attr-not-finer", f"{declared!r} is not finer than the displayed parameters")

    classic = order_attributes(h, list(axis.attrs) + [declared])
    specs = t.specs
    if threshold is None:
        attrs = classic
    else:
        ctx = _forage_context(t, side, DRILLED_DOWN, d, h, declared, classic)
        wa = fire_rules(profile, c, ctx)
        attrs = qualified_attributes(wa, threshold, d, h, level_floor=target_level, forced=declared)
        specs = _personalized_specs(c, t.fact, t.specs, wa, threshold)

    out = _with_axis(replace(t, specs=specs), side, Axis(d.name, h.name, tuple(attrs)))
    return replace(out, grid=compute_grid(c, store, out))


def rollup(
    c: Constellation,
    store: DataStore,
    profile: Profile,
    t: MultidimTable,
    dim: str,
    att_sup: str,
    threshold: float | None = None,
) -> MultidimTable:
    """Coarsen one displayed dimension up to `att_sup` (All gives the grand
    total line)."""
    _check_threshold(threshold)
    side, axis = _pick_axis(t, dim)
    d = c.dimension(axis.dim)
    h = d.hierarchy(axis.hier)
    declared = h.find(att_sup)
    if declared is None or not h.is_parameter(declared):
        raise EngineError("attr-not-in-hierarchy", f"{att_sup!r} is not a parameter of {h.name!r}")
    target_level = h.level_of(declared)
    if target_level < _finest_displayed_level(h, axis.attrs):
        raise EngineError("attr-not-coarser", f"{declared!r} is finer than the displayed parameters")

    kept = [a for a in axis.attrs if h.level_of(a) >= target_level]
    classic = order_attributes(h, kept + [declared])
    specs = t.specs
    if threshold is None:
        attrs = classic
    else:
        ctx = _forage_context(t, side, ROLLED_UP, d, h, declared, classic)
        wa = fire_rules(profile, c, ctx)
        attrs = qualified_attributes(wa, threshold, d, h, level_floor=target_level, forced=declared)
        specs = _personalized_specs(c, t.fact, t.specs, wa, threshold)

    out = _with_axis(replace(t, specs=specs), side, Axis(d.name, h.name, tuple(attrs)))
    return replace(out, grid=compute_grid(c, store, out))


def _forage_context(
    t: MultidimTable,
    side: str,
    kind: str,
    d: Dimension,
    h: Hierarchy,
    target: str,
    prospective: list[str],
) -> OperationContext:
    changed = AxisContext(d.name, h.name, tuple(prospective))
    other = t.cols if side == "rows" else t.rows
    other_ctx = AxisContext(other.dim, other.hier, other.attrs)
    return OperationContext(
        kind=kind,
        fact=t.fact,
        specs=t.specs,
        row=changed if side == "rows" else other_ctx,
        col=changed if side == "cols" else other_ctx,
        on_dim=d.name,
        to_param=target,
        according_hier=h.name,
    )
