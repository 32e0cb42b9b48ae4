"""HTTP surface: POST /v1/score and GET /healthz.

Stateless across requests: identical request bodies produce identical
responses (evaluation mode, no sampling). Errors: 400 malformed body or
over-length pair, 413 batch too large, 503 model not loaded.
"""

from __future__ import annotations

import threading
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, field_validator

from .config import ServiceConfig
from .model import LabelRoles, load_scorer, resolve_label_roles, softmax_triple

SIMPLEX_TOLERANCE = 1e-6


class PairIn(BaseModel):
    premise: str
    hypothesis: str

    @field_validator("premise", "hypothesis")
    @classmethod
    def _non_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("must be non-empty")
        return value


class ScoreRequest(BaseModel):
    pairs: list[PairIn] = Field(min_length=1)


class ModelHolder:
    """Loads the scorer once; concurrent loads and reads are safe."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self._lock = threading.Lock()
        self._scorer = None
        self._roles: LabelRoles | None = None
        self.load_error: str | None = None

    def load(self) -> None:
        with self._lock:
            if self._scorer is not None:
                return
            try:
                scorer = load_scorer(self.config)
                self._roles = resolve_label_roles(scorer.id2label)
                self._scorer = scorer
                self.load_error = None
            except Exception as err:  # stay unloaded; /healthz keeps saying 503
                self.load_error = f"{type(err).__name__}: {err}"

    @property
    def scorer(self):
        return self._scorer

    @property
    def roles(self) -> LabelRoles | None:
        return self._roles


def create_app(config: ServiceConfig | None = None, *, load_immediately: bool = True) -> FastAPI:
    cfg = config or ServiceConfig.from_env()
    holder = ModelHolder(cfg)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if load_immediately:
            holder.load()
        yield

    app = FastAPI(title="nli-service", lifespan=lifespan)
    app.state.holder = holder

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/healthz")
    def healthcheck():
        if holder.scorer is None:
            detail = holder.load_error or "model not loaded"
            return JSONResponse(status_code=503, content={"error": detail})
        return {"status": "ok", "model": holder.scorer.identifier}

    @app.post("/v1/score")
    def serve_score(request: ScoreRequest):
        scorer = holder.scorer
        if scorer is None:
            detail = holder.load_error or "model not loaded"
            return JSONResponse(status_code=503, content={"error": detail})
        if len(request.pairs) > cfg.max_batch_size:
            return JSONResponse(
                status_code=413,
                content={"error": f"batch of {len(request.pairs)} exceeds maximum {cfg.max_batch_size}"},
            )
        for i, pair in enumerate(request.pairs):
            if scorer.too_long(pair.premise, pair.hypothesis):
                return JSONResponse(
                    status_code=400,
                    content={"error": f"pair {i} exceeds the model's length limit"},
                )
        logits = scorer.logits([(p.premise, p.hypothesis) for p in request.pairs])
        scores = [softmax_triple(vector, holder.roles) for vector in logits]
        for triple in scores:
            total = triple["entail"] + triple["neutral"] + triple["contradict"]
            if abs(total - 1.0) > SIMPLEX_TOLERANCE or not all(
                0.0 <= v <= 1.0 for v in triple.values()
            ):
                return JSONResponse(
                    status_code=500, content={"error": f"invalid probability triple (sum {total})"}
                )
        return {"scores": scores}

    return app
