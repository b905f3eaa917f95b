"""HTTP session API over the tutoring engine.

The engine's blocking prompt/answer contract is inverted here into turns: a
session generator is advanced until it needs an answer, the prompt is parked
as "pending", and the next POST resumes the generator with the submitted
answer, collecting any informational messages emitted along the way. One
pending prompt per session, interactions linearized per session id.

Endpoints: POST /sessions, POST /sessions/{id}/answer, GET /sessions/{id},
GET /sessions/{id}/metrics, DELETE /sessions/{id}.
"""

from __future__ import annotations

import os
import threading
import uuid
from pathlib import Path
from typing import Generator, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .genome import GaConfig, InvalidConfigError
from .metrics import MalformedLogError, compute
from .questions import Answer, NONE, Prompt, SessionEvent, YES_NO
from .session import SessionState, TargetSpec, new_session, session_program

UI_ORIGIN_ENV_VAR = "KINETUTOR_UI_ORIGIN"
UI_DIR_ENV_VAR = "KINETUTOR_UI_DIR"


class ConfigModel(BaseModel):
    population_size: int = 50
    chromosome_bits: int = 12000
    crossover_probability: float = 0.25
    mutation_probability_per_bit: float = 0.01
    max_generations: int = 500
    mode: str = "ga"


class TargetModel(BaseModel):
    var: str
    object_text: str
    zone_text: str


class CreateSessionRequest(BaseModel):
    seed: int = 1
    config: ConfigModel = Field(default_factory=ConfigModel)
    capture_target: bool = True
    target: Optional[TargetModel] = None


class AnswerRequest(BaseModel):
    text: str = ""
    affirmative: Optional[bool] = None


def _prompt_json(prompt: Prompt) -> dict:
    return {
        "kind": prompt.kind,
        "text": prompt.text,
        "expected": prompt.expected,
        "context": prompt.context,
    }


def _event_json(event: SessionEvent) -> dict:
    return {
        "generation": event.generation,
        "kind": event.kind,
        "payload": event.payload,
        "timestamp": event.timestamp,
    }


class SessionRunner:
    """One live session: its state, its suspended generator, and a lock that
    linearizes all interactions."""

    def __init__(self, state: SessionState):
        self.state = state
        self.program: Generator = session_program(state)
        self.lock = threading.Lock()
        self.pending: Prompt | None = None

    def advance(self, send: Answer | None) -> list[Prompt]:
        """Resume the generator until the next answer-expecting prompt or
        termination; returns the informational prompts seen on the way."""
        messages: list[Prompt] = []
        try:
            prompt = next(self.program) if send is None and self.pending is None else self.program.send(send)
            while prompt.expected == NONE:
                messages.append(prompt)
                prompt = self.program.send(None)
            self.pending = prompt
        except StopIteration:
            self.pending = None
        return messages


def create_app() -> FastAPI:
    app = FastAPI(title="kinetutor", version="0.1.0")
    origin = os.environ.get(UI_ORIGIN_ENV_VAR, "*")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    runners: dict[str, SessionRunner] = {}
    app.state.runners = runners

    def get_runner(session_id: str) -> SessionRunner:
        runner = runners.get(session_id)
        if runner is None:
            raise HTTPException(status_code=404, detail="unknown session id")
        return runner

    def turn_response(runner: SessionRunner, messages: list[Prompt]) -> dict:
        state = runner.state
        return {
            "messages": [_prompt_json(p) for p in messages],
            "prompt": None if runner.pending is None else _prompt_json(runner.pending),
            "status": state.status,
            "generation": state.stores.generation,
            "solved_at": state.solved_at,
        }

    @app.post("/sessions", status_code=201)
    def create_session(request: CreateSessionRequest):
        try:
            config = GaConfig(**request.config.model_dump())
        except InvalidConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        target = None
        if not request.capture_target:
            if request.target is None:
                raise HTTPException(
                    status_code=400,
                    detail="capture_target=false requires an explicit target",
                )
            target = TargetSpec(
                var=request.target.var,
                object_text=request.target.object_text,
                zone_text=request.target.zone_text,
            )
        state = new_session(config, request.seed, target=target)
        runner = SessionRunner(state)
        session_id = uuid.uuid4().hex
        runners[session_id] = runner
        with runner.lock:
            messages = runner.advance(None)
        return {"id": session_id, **turn_response(runner, messages)}

    @app.post("/sessions/{session_id}/answer")
    def submit_answer(session_id: str, request: AnswerRequest):
        runner = get_runner(session_id)
        if not runner.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="an answer is already being processed")
        try:
            pending = runner.pending
            if pending is None:
                raise HTTPException(status_code=409, detail="no pending prompt")
            if pending.expected == YES_NO and request.affirmative is None:
                raise HTTPException(status_code=422, detail="this prompt needs a yes/no answer")
            if pending.expected != YES_NO and not request.text.strip():
                raise HTTPException(status_code=422, detail="this prompt needs a text answer")
            answer = Answer(prompt=pending, text=request.text, affirmative=request.affirmative)
            messages = runner.advance(answer)
            return turn_response(runner, messages)
        finally:
            runner.lock.release()

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        runner = get_runner(session_id)
        state = runner.state
        domain = state.domain
        knowns = [
            {
                "object": e.object,
                "eqn": e.eqn,
                "var": e.var,
                "symbol": domain.variable_at(e.eqn, e.var),
                "zone": e.zone,
                "response": e.response,
                "provenance": e.provenance,
            }
            for e in state.stores.knowns
        ]
        return {
            "status": state.status,
            "generation": state.stores.generation,
            "solved_at": state.solved_at,
            "target": None
            if state.target is None
            else {
                "var": state.target.var,
                "object_text": state.target.object_text,
                "zone_text": state.target.zone_text,
            },
            "objects": {str(k): v for k, v in state.stores.objects.entries.items()},
            "objects_closed": state.stores.objects.closed,
            "zones": [
                {"object": o, "zone": z, "description": d}
                for (o, z), d in state.stores.zones.entries.items()
            ],
            "knowns": knowns,
            "pending": None if runner.pending is None else _prompt_json(runner.pending),
            "events": [_event_json(ev) for ev in state.events],
        }

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str):
        runner = get_runner(session_id)
        try:
            run_metrics = compute(runner.state.events)
        except MalformedLogError:
            return {"per_generation": [], "knowns_timeline": [], "solved_at": None}
        return {
            "per_generation": [
                {
                    "generation": row.generation,
                    "responses": row.responses,
                    "min_fitness": row.min_fitness,
                    "mean_fitness": row.mean_fitness,
                    "max_fitness": row.max_fitness,
                }
                for row in run_metrics.per_generation
            ],
            "knowns_timeline": [
                {
                    "generation": row.generation,
                    "object": row.object,
                    "eqn": row.eqn,
                    "var": row.var,
                    "zone": row.zone,
                    "provenance": row.provenance,
                    "response": row.response,
                }
                for row in run_metrics.knowns_timeline
            ],
            "solved_at": run_metrics.solved_at,
        }

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        get_runner(session_id)
        del runners[session_id]
        return {"deleted": True}

    _mount_ui(app)
    return app


def _mount_ui(app: FastAPI) -> None:
    """Serve the web client's static bundle at /ui when one is present."""
    ui_dir = os.environ.get(UI_DIR_ENV_VAR)
    if ui_dir is None:
        repo_root = Path(__file__).resolve().parents[2]
        default = repo_root / "frontend" / "dist"
        ui_dir = str(default) if default.is_dir() else None
    if ui_dir and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")


app = create_app()
