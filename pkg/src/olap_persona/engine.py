"""Engine facade: schema/data/rule state, analyst profiles and sessions.

The REPL and the HTTP API both drive this object, so their semantics cannot
drift apart. Loads swap state under an exclusive lock; table computations
only read immutable snapshots.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path

from . import algebra
from .ddl import parse_schema
from .errors import EngineError
from .rule_parser import DISPLAYED, EVENT_KINDS, Rule, parse_rules
from .rules import (
    AxisContext,
    OperationContext,
    Profile,
    WeightAssignment,
    drop_rule,
    fire_rules,
    register_rule,
)
from .schema import Constellation, MeasureSpec, canon
from .store import DataStore


@dataclass
class Session:
    """One analyst's seat: a profile binding, the current table and history."""

    id: str
    profile: str
    table: algebra.MultidimTable | None = None
    history: list[str] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class Engine:
    def __init__(self):
        self._lock = threading.RLock()
        self.constellation: Constellation | None = None
        self.store: DataStore | None = None
        self.profiles: dict[str, Profile] = {}
        self.sessions: dict[str, Session] = {}

    # State loading ----------------------------------------------------------

    def load_schema_text(self, source: str, name: str = "constellation") -> Constellation:
        """Replace the whole schema; dependent data, rules and tables reset."""
        c = parse_schema(source, name)
        with self._lock:
            self.constellation = c
            self.store = DataStore(c)
            self.profiles = {}
            for s in self.sessions.values():
                s.table = None
        return c

    def load_schema_file(self, path: str | Path) -> Constellation:
        p = Path(path)
        return self.load_schema_text(p.read_text(encoding="utf-8"), name=p.stem)

    def require_schema(self) -> tuple[Constellation, DataStore]:
        if self.constellation is None or self.store is None:
            raise EngineError("no-schema", "no schema loaded")
        return self.constellation, self.store

    def load_data_dir(self, path: str | Path) -> list[str]:
        """Load every `<name>.csv` whose stem names a dimension or fact;
        dimensions first so fact references resolve."""
        c, store = self.require_schema()
        directory = Path(path)
        if not directory.is_dir():
            raise EngineError("unresolved-reference", f"{str(directory)!r} is not a directory")
        loaded = []
        files = sorted(directory.glob("*.csv"))
        with self._lock:
            for f in files:
                if c.has_dimension(f.stem):
                    store.load_dimension_rows(f.stem, f.read_bytes())
                    loaded.append(c.dimension(f.stem).name)
            for f in files:
                if c.has_fact(f.stem):
                    store.load_fact_rows(f.stem, f.read_bytes())
                    loaded.append(c.fact(f.stem).name)
        return loaded

    def load_rules_file(self, path: str | Path, profile: str) -> list[str]:
        source = Path(path).read_text(encoding="utf-8")
        return [self.add_rule(profile, r).rule.name for r in parse_rules(source)]

    # Profiles and rules -------------------------------------------------------

    def profile(self, name: str) -> Profile:
        """Profiles appear implicitly on first use."""
        key = canon(name)
        with self._lock:
            if key not in self.profiles:
                self.profiles[key] = Profile(name=name)
            return self.profiles[key]

    def add_rule(self, profile: str, rule: Rule | str):
        c, _ = self.require_schema()
        with self._lock:
            return register_rule(self.profile(profile), c, rule)

    def remove_rule(self, profile: str, name: str) -> None:
        with self._lock:
            drop_rule(self.profile(profile), name)

    def weights_for(
        self,
        profile: str,
        event: str = DISPLAYED,
        fact: str | None = None,
        rowdim: str | None = None,
        rowhier: str | None = None,
        coldim: str | None = None,
        colhier: str | None = None,
        from_dim: str | None = None,
        to_dim: str | None = None,
        on_dim: str | None = None,
        to_param: str | None = None,
        according_hier: str | None = None,
    ) -> WeightAssignment:
        """Effective weights for a described context (the UI's weight inspector)."""
        c, _ = self.require_schema()
        kind = event.upper().replace("-", "_")
        if kind not in EVENT_KINDS:
            raise EngineError("command-syntax-error", f"unknown event kind {event!r}")
        if fact is None:
            raise EngineError("unknown-fact", "a fact is required to describe a context")
        f = c.fact(fact)
        star = c.star_of(f.name)
        dl = c.dimension(rowdim) if rowdim else c.dimension(star[0])
        remaining = [d for d in star if canon(d) != canon(dl.name)]
        dc = c.dimension(coldim) if coldim else c.dimension(remaining[0] if remaining else star[0])
        hl = dl.hierarchy(rowhier) if rowhier else dl.hierarchies[0]
        hc = dc.hierarchy(colhier) if colhier else dc.hierarchies[0]
        ctx = OperationContext(
            kind=kind,
            fact=f.name,
            specs=f.measures,
            row=AxisContext(dl.name, hl.name, (hl.coarsest,)),
            col=AxisContext(dc.name, hc.name, (hc.coarsest,)),
            from_dim=from_dim,
            to_dim=to_dim,
            on_dim=on_dim,
            to_param=to_param,
            according_hier=according_hier,
        )
        return fire_rules(self.profile(profile), c, ctx)

    # Sessions -----------------------------------------------------------------

    def create_session(self, profile: str) -> Session:
        session = Session(id=secrets.token_hex(8), profile=self.profile(profile).name)
        with self._lock:
            self.sessions[session.id] = session
        return session

    def session(self, session_id: str) -> Session:
        s = self.sessions.get(session_id)
        if s is None:
            raise EngineError("unknown-session", f"no session {session_id!r}")
        return s

    # Operators ------------------------------------------------------------------

    def display(
        self,
        session: Session,
        fact: str,
        specs: list[MeasureSpec],
        dl: str,
        hl: str,
        dc: str,
        hc: str,
        threshold: float | None = None,
    ) -> algebra.MultidimTable:
        c, store = self.require_schema()
        t = algebra.display(
            c, store, self.profile(session.profile), fact, specs, dl, hl, dc, hc, threshold
        )
        session.table = t
        return t

    def _require_table(self, session: Session) -> algebra.MultidimTable:
        if session.table is None:
            raise EngineError("no-current-table", "run DISPLAY first")
        return session.table

    def rotate(
        self, session: Session, d_old: str, d_new: str, h_new: str, threshold: float | None = None
    ) -> algebra.MultidimTable:
        c, store = self.require_schema()
        t = algebra.rotate(
            c, store, self.profile(session.profile), self._require_table(session),
            d_old, d_new, h_new, threshold,
        )
        session.table = t
        return t

    def drilldown(
        self, session: Session, dim: str, att_inf: str, threshold: float | None = None
    ) -> algebra.MultidimTable:
        c, store = self.require_schema()
        t = algebra.drilldown(
            c, store, self.profile(session.profile), self._require_table(session),
            dim, att_inf, threshold,
        )
        session.table = t
        return t

    def rollup(
        self, session: Session, dim: str, att_sup: str, threshold: float | None = None
    ) -> algebra.MultidimTable:
        c, store = self.require_schema()
        t = algebra.rollup(
            c, store, self.profile(session.profile), self._require_table(session),
            dim, att_sup, threshold,
        )
        session.table = t
        return t
