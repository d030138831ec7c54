"""HTTP front-end: route/feedback/complete/stats over JSON.

Endpoints (wire field names are a contract):
  POST /v1/route     {"episode_id","step_index","role","instruction","phase"}
                     -> {"decision_id","model","fallback_used","pareto_models","candidate_count"}
  POST /v1/feedback  {"decision_id","cost_usd","duration_s","step_success"} -> {"ok": true}
  POST /v1/complete  {"episode_id","task_performance"} -> {"generation","records_added"}
  GET  /v1/stats     -> {"records","generation","selection_counts"}

Environment: EVOROUTE_KB_PATH (knowledge-base file), EVOROUTE_CONFIG (config
file), EVOROUTE_BIND (listen address for `serve`).

Committed trajectories are journaled to the KB file before the complete
response is sent, so they survive a process restart; uncommitted episode
buffers are in-memory only and expire after a configurable idle period —
records can never be committed without their task score.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .config import load_runtime
from .core import Phase
from .errors import DuplicateStepOutcome, IncompleteBuffer, InvalidPerformance, UnknownDecision
from .experience_base import ExperienceBase
from .router import RoutingEngine

DEFAULT_IDLE_EXPIRY_S = 3600.0

KB_PATH_ENV = "EVOROUTE_KB_PATH"
CONFIG_ENV = "EVOROUTE_CONFIG"
BIND_ENV = "EVOROUTE_BIND"


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def _field(body: dict, name: str, kind: type | tuple[type, ...]):
    """Returns (value, None) or (None, error response) for a required field."""
    if name not in body:
        return None, _error(400, f"missing field: {name}")
    value = body[name]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        return None, _error(400, f"invalid field: {name}")
    return value, None


def build_engine(
    kb_path: str | Path | None = None, config_path: str | Path | None = None
) -> RoutingEngine:
    kb_path = kb_path or os.environ.get(KB_PATH_ENV)
    config_path = config_path or os.environ.get(CONFIG_ENV)
    setup = load_runtime(config_path)
    if kb_path and Path(kb_path).exists():
        kb = ExperienceBase.load(Path(kb_path), journal=kb_path)
    else:
        kb = ExperienceBase(dimension=setup.embedder.dimension, journal=kb_path)
    return RoutingEngine(kb=kb, pool=setup.pool, config=setup.router, embedder=setup.embedder)


def create_app(
    engine: RoutingEngine | None = None,
    kb_path: str | Path | None = None,
    config_path: str | Path | None = None,
    idle_expiry_s: float = DEFAULT_IDLE_EXPIRY_S,
) -> FastAPI:
    if engine is None:
        engine = build_engine(kb_path, config_path)
    app = FastAPI(title="evoroute gateway")
    app.state.engine = engine

    @app.post("/v1/route")
    async def handle_route(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "body is not valid JSON")
        if not isinstance(body, dict):
            return _error(400, "body must be a JSON object")
        episode_id, err = _field(body, "episode_id", str)
        if err:
            return err
        step_index, err = _field(body, "step_index", int)
        if err:
            return err
        role, err = _field(body, "role", str)
        if err:
            return err
        instruction, err = _field(body, "instruction", str)
        if err:
            return err
        phase_raw, err = _field(body, "phase", str)
        if err:
            return err
        try:
            phase = Phase(phase_raw)
        except ValueError:
            return _error(422, f"unknown phase: {phase_raw!r}")
        engine.sweep_expired(idle_expiry_s)
        decision = engine.route_step(episode_id, step_index, role, instruction, phase=phase)
        return {
            "decision_id": decision.decision_id,
            "model": decision.model,
            "fallback_used": decision.fallback_used,
            "pareto_models": list(decision.pareto_models),
            "candidate_count": decision.candidate_count,
        }

    @app.post("/v1/feedback")
    async def handle_feedback(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "body is not valid JSON")
        if not isinstance(body, dict):
            return _error(400, "body must be a JSON object")
        decision_id, err = _field(body, "decision_id", str)
        if err:
            return err
        cost, err = _field(body, "cost_usd", float)
        if err:
            return err
        duration, err = _field(body, "duration_s", float)
        if err:
            return err
        step_success, err = _field(body, "step_success", int)
        if err:
            return err
        if step_success not in (0, 1):
            return _error(400, "invalid field: step_success must be 0 or 1")
        if cost < 0 or duration < 0:
            return _error(400, "invalid field: cost_usd and duration_s must be >= 0")
        engine.sweep_expired(idle_expiry_s)
        try:
            engine.record_feedback(decision_id, cost, duration, step_success)
        except UnknownDecision:
            return _error(404, f"unknown decision: {decision_id}")
        except DuplicateStepOutcome:
            return _error(409, f"feedback already recorded for decision: {decision_id}")
        return {"ok": True}

    @app.post("/v1/complete")
    async def handle_complete(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "body is not valid JSON")
        if not isinstance(body, dict):
            return _error(400, "body must be a JSON object")
        episode_id, err = _field(body, "episode_id", str)
        if err:
            return err
        performance, err = _field(body, "task_performance", float)
        if err:
            return err
        engine.sweep_expired(idle_expiry_s)
        if not engine.has_episode(episode_id):
            return _error(404, f"unknown episode: {episode_id}")
        try:
            generation, added = engine.complete(episode_id, performance)
        except IncompleteBuffer as exc:
            return _error(409, f"incomplete buffer; missing decisions: {', '.join(exc.missing)}")
        except InvalidPerformance as exc:
            return _error(400, str(exc))
        return {"generation": generation, "records_added": added}

    @app.get("/v1/stats")
    async def handle_stats():
        kb = engine.kb
        counts: dict[str, int] = {}
        for rec in kb.snapshot().records():
            counts[rec.model] = counts.get(rec.model, 0) + 1
        return {
            "records": len(kb),
            "generation": kb.generation,
            "selection_counts": dict(sorted(counts.items())),
        }

    return app


def serve(
    kb_path: str | None = None,
    config_path: str | None = None,
    bind: str | None = None,
) -> None:
    import uvicorn

    bind = bind or os.environ.get(BIND_ENV, "127.0.0.1:8000")
    host, _, port = bind.partition(":")
    app = create_app(kb_path=kb_path, config_path=config_path)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or "8000"))
