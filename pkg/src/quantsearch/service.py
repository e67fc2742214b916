"""HTTP search service.

Endpoints: GET /search?q=&method=&k=, GET /record/{id}, GET /methods,
GET /health.  The corpus and models load once at startup; /health answers
503 until loading finishes.  Rankings are byte-identical to the CLI
because both go through the same SearchEngine.
"""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from . import ranker
from .config import load_config
from .corpus import load_corpus
from .engine import SearchEngine
from .errors import QuantsearchError


class ServiceState:
    def __init__(self):
        self.engine: SearchEngine | None = None

    @property
    def loaded(self) -> bool:
        return self.engine is not None


def build_engine(
    corpus_path, ranker_path=None, embeddings_path=None, config_path=None
) -> SearchEngine:
    config = load_config(config_path)
    corpus = load_corpus(corpus_path)
    models = {
        "dense": ranker.HashedEmbeddingModel(
            dim=config.embedding_dim, n_buckets=config.embedding_buckets,
            seed=config.seed,
        )
    }
    if ranker_path:
        models["dense_ws"] = ranker.HashedEmbeddingModel.load(ranker_path)
    if embeddings_path:
        models["dense_pre"] = ranker.PrecomputedEmbeddings.load(embeddings_path)
    return SearchEngine(corpus, models, k1=config.bm25_k1, b=config.bm25_b)


def create_app(
    corpus_path=None,
    ranker_path=None,
    embeddings_path=None,
    config_path=None,
    engine: SearchEngine | None = None,
    defer_load: bool = False,
) -> FastAPI:
    """Build the app; pass engine= to serve a prebuilt in-memory engine."""
    config = load_config(config_path)
    state = ServiceState()

    lifespan = None
    if engine is None and corpus_path is not None and not defer_load:

        @asynccontextmanager
        async def lifespan(app):
            state.engine = build_engine(
                corpus_path, ranker_path, embeddings_path, config_path
            )
            yield

    app = FastAPI(title="quantsearch", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.cors_origins,
        allow_methods=["GET"],
        allow_headers=["*"],
    )
    app.state.service = state

    if engine is not None:
        state.engine = engine

    @app.get("/health")
    def health():
        if not state.loaded:
            raise HTTPException(status_code=503, detail="loading")
        return {"status": "ok"}

    @app.get("/methods")
    def methods():
        if not state.loaded:
            raise HTTPException(status_code=503, detail="loading")
        return {"methods": state.engine.methods()}

    @app.get("/search")
    def search(q: str = "", method: str = "cq-bm25", k: int = 10):
        if not state.loaded:
            raise HTTPException(status_code=503, detail="loading")
        if not q:
            raise HTTPException(status_code=400, detail="missing query parameter q")
        if not state.engine.available(method):
            raise HTTPException(status_code=400, detail=f"unknown or unavailable method {method!r}")
        if k < 1:
            raise HTTPException(status_code=400, detail="k must be >= 1")
        try:
            hits = state.engine.search(method, q, k)
        except QuantsearchError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "query": q,
            "method": method,
            "hits": state.engine.hit_details(method, hits),
        }

    @app.get("/record/{record_id}")
    def record(record_id: str):
        if not state.loaded:
            raise HTTPException(status_code=503, detail="loading")
        rec = state.engine.corpus.record_by_id(record_id)
        if rec is None:
            raise HTTPException(status_code=404, detail=f"no record {record_id!r}")
        return {
            "record_id": rec.record_id,
            "description": rec.description_text,
            "value": rec.value.render(),
            "evidence": rec.evidence,
            "doc_id": rec.doc_id,
            "sentence_id": rec.sentence_id,
        }

    return app
