"""HTTP JSON API over the engine; also serves the browser UI when built.

Errors come back as {code, message, position?} with a 4xx status.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .engine import Engine
from .errors import EngineError
from .render import table_payload
from .rule_parser import print_rule
from .schema import MeasureSpec

_NOT_FOUND = {"unknown-session", "unknown-rule"}


class SessionBody(BaseModel):
    profile: str


class RuleBody(BaseModel):
    source: str


class OpBody(BaseModel):
    kind: str
    fact: str | None = None
    specs: list[dict] | None = None
    rowdim: str | None = None
    rowhier: str | None = None
    coldim: str | None = None
    colhier: str | None = None
    d_old: str | None = None
    d_new: str | None = None
    hier: str | None = None
    dim: str | None = None
    attr: str | None = None
    threshold: float | None = None


def _error_response(err: EngineError) -> JSONResponse:
    body: dict = {"code": err.code, "message": err.message}
    if err.position is not None:
        body["position"] = {"line": err.position[0], "col": err.position[1]}
    status = 404 if err.code in _NOT_FOUND else 400
    return JSONResponse(status_code=status, content=body)


def create_app(engine: Engine, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="olap-persona")

    @app.exception_handler(EngineError)
    async def on_engine_error(_request: Request, err: EngineError):
        return _error_response(err)

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionBody):
        session = engine.create_session(body.profile)
        return {"session_id": session.id, "profile": session.profile}

    @app.get("/schema")
    def get_schema():
        c, _ = engine.require_schema()
        return {
            "name": c.name,
            "facts": [
                {
                    "name": f.name,
                    "measures": [{"name": m.measure, "agg": m.agg} for m in f.measures],
                    "dimensions": list(c.star_of(f.name)),
                }
                for f in c.facts
            ],
            "dimensions": [
                {
                    "name": d.name,
                    "hierarchies": [
                        {
                            "name": h.name,
                            "params": list(h.params),
                            "weak": {p: list(w) for p, w in h.weak.items()},
                        }
                        for h in d.hierarchies
                    ],
                }
                for d in c.dimensions
            ],
        }

    @app.get("/profiles/{profile}/rules")
    def list_rules(profile: str):
        p = engine.profile(profile)
        return {
            "rules": [
                {"name": r.rule.name, "source": print_rule(r.rule)} for r in p.rules
            ]
        }

    @app.post("/profiles/{profile}/rules", status_code=201)
    def add_rule(profile: str, body: RuleBody):
        registered = engine.add_rule(profile, body.source)
        return {"name": registered.rule.name}

    @app.delete("/profiles/{profile}/rules/{name}")
    def delete_rule(profile: str, name: str):
        engine.remove_rule(profile, name)
        return {"deleted": name}

    @app.get("/profiles/{profile}/weights")
    def get_weights(
        profile: str,
        event: str = "DISPLAYED",
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
    ):
        wa = engine.weights_for(
            profile,
            event=event,
            fact=fact,
            rowdim=rowdim,
            rowhier=rowhier,
            coldim=coldim,
            colhier=colhier,
            from_dim=from_dim,
            to_dim=to_dim,
            on_dim=on_dim,
            to_param=to_param,
            according_hier=according_hier,
        )
        return {
            "weights": [
                {"element": e.ref.text(), "kind": e.ref.kind, "weight": e.weight, "rule": e.rule}
                for e in sorted(wa.entries(), key=lambda e: e.ref.text())
            ]
        }

    @app.post("/sessions/{session_id}/op")
    def run_op(session_id: str, body: OpBody):
        session = engine.session(session_id)
        kind = body.kind.casefold()
        with session.lock:
            if kind == "display":
                specs = [MeasureSpec(s["agg"].upper(), s["measure"]) for s in body.specs or []]
                t = engine.display(
                    session, _req(body.fact, "fact"), specs,
                    _req(body.rowdim, "rowdim"), _req(body.rowhier, "rowhier"),
                    _req(body.coldim, "coldim"), _req(body.colhier, "colhier"),
                    body.threshold,
                )
            elif kind == "rotate":
                t = engine.rotate(
                    session, _req(body.d_old, "d_old"), _req(body.d_new, "d_new"),
                    _req(body.hier, "hier"), body.threshold,
                )
            elif kind == "drilldown":
                t = engine.drilldown(
                    session, _req(body.dim, "dim"), _req(body.attr, "attr"), body.threshold
                )
            elif kind == "rollup":
                t = engine.rollup(
                    session, _req(body.dim, "dim"), _req(body.attr, "attr"), body.threshold
                )
            else:
                raise EngineError("command-syntax-error", f"unknown operation kind {body.kind!r}")
            session.history.append(f"op:{kind}")
        return table_payload(t)

    @app.get("/sessions/{session_id}/table")
    def get_table(session_id: str):
        session = engine.session(session_id)
        if session.table is None:
            raise EngineError("no-current-table", "run an operation first")
        return table_payload(session.table)

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str):
        return {"history": list(engine.session(session_id).history)}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app


def _req(value: str | None, name: str) -> str:
    if value is None:
        raise EngineError("command-syntax-error", f"missing argument {name!r}")
    return value
