"""FastAPI application speaking the normative embedding protocol.

POST /v1/embed  {"texts": [...]}  ->  {"model", "dim", "embeddings", "warnings"?}
GET  /health                      ->  {"status": "ok", "model", "dim"}  (503 while loading)

Requests are bounded to 256 texts; inference is serialized behind a lock so
concurrent requests cannot interleave inside the encoder.
"""

from __future__ import annotations

import threading
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .encoders import Encoder

MAX_TEXTS = 256


def create_app(encoder: Encoder | None = None, encoder_factory=None) -> FastAPI:
    """Build the service; pass a ready encoder or a factory to load on startup."""

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if encoder_factory is not None:
            app.state.encoder = encoder_factory()
        yield

    app = FastAPI(title="embed-service", lifespan=lifespan)
    app.state.encoder = encoder
    app.state.lock = threading.Lock()

    def _unavailable():
        return JSONResponse(status_code=503, content={"detail": "model not loaded"})

    @app.get("/health")
    def health():
        enc = app.state.encoder
        if enc is None:
            return _unavailable()
        return {"status": "ok", "model": enc.name, "dim": enc.dimension}

    @app.post("/v1/embed")
    async def embed(request: Request):
        enc = app.state.encoder
        if enc is None:
            return _unavailable()
        try:
            doc = await request.json()
        except Exception:
            return JSONResponse(status_code=400, content={"detail": "body must be JSON"})
        texts = doc.get("texts") if isinstance(doc, dict) else None
        if not isinstance(texts, list) or not texts:
            return JSONResponse(status_code=400, content={"detail": "texts must be a non-empty list"})
        if len(texts) > MAX_TEXTS:
            return JSONResponse(status_code=413, content={"detail": f"at most {MAX_TEXTS} texts per call"})
        if any(not isinstance(t, str) or not t for t in texts):
            return JSONResponse(status_code=400, content={"detail": "texts must be non-empty strings"})
        with app.state.lock:
            result = enc.encode(texts)
        payload = {
            "model": enc.name,
            "dim": enc.dimension,
            "embeddings": result.vectors.tolist(),
        }
        if result.truncated:
            payload["warnings"] = [
                f"text {i} exceeded {enc.max_tokens} tokens and was truncated"
                for i in result.truncated
            ]
        return payload

    return app
