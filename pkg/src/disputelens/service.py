"""HTTP service exposing the pipeline to the workbench UI.

Endpoints (all JSON, mirroring the corpus-store schemas):

    GET  /v1/sectors              the 29-entry taxonomy
    GET  /v1/judgments/{id}       one judgment record
    POST /v1/cases                register a case file
    POST /v1/summarize            {case_id | complaint_text [, written_statement_text], strategy}
    POST /v1/similar              {overview | case_id, sector?, k?, weight?}
    POST /v1/evaluate             {pairs: [{original, generated, case_id?}], kinds?}

Engine state is immutable after startup; per-request work never mutates the
corpus, so concurrent requests are safe. Responses carry no timestamps, so a
mock-backed service answers identical requests byte-identically.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .config import AppConfig, build_embedder, build_provider
from .errors import ConfigError, DisputeLensError, ParseError
from .gateway import ChatProvider, Embedder
from .judge import ALL_KINDS, evaluate_run, metric_kind_from_name
from .models import CaseFile, PromptStrategy
from .pipeline import Summarizer
from .retrieval import HybridRetriever
from .sectors import all_sectors, sector_from_code
from .store import load_case_files, load_judgments, summary_from_dict, summary_to_dict

logger = logging.getLogger(__name__)

_STATUS_BY_CODE = {
    "config_error": 503,
    "unknown_sector_code": 422,
    "unknown_sector_name": 422,
    "invalid_sector": 422,
    "out_of_scale": 422,
    "unknown_metric": 422,
    "parse_error": 422,
    "unsupported_combination": 422,
    "not_found": 404,
}


class CaseIn(BaseModel):
    id: str
    complaint_text: str
    written_statement_text: str = ""
    metadata: dict[str, str] = Field(default_factory=dict)


class SummarizeIn(BaseModel):
    case_id: str | None = None
    complaint_text: str | None = None
    written_statement_text: str = ""
    strategy: str = PromptStrategy.PARTWISE_COT.value


class SimilarIn(BaseModel):
    overview: str | None = None
    case_id: str | None = None
    sector: int | None = None
    k: int | None = Field(default=None, ge=1, le=100)
    weight: float | None = Field(default=None, ge=0.0, le=1.0)


class EvalPairIn(BaseModel):
    original: dict[str, Any]
    generated: dict[str, Any]
    case_id: str | None = None


class EvaluateIn(BaseModel):
    pairs: list[EvalPairIn]
    kinds: list[str] | None = None


class _NotFound(DisputeLensError):
    code = "not_found"
    exit_code = 3


def _strategy_from_string(value: str) -> PromptStrategy:
    for strategy in PromptStrategy:
        if strategy.value == value:
            return strategy
    raise ParseError(
        f"unknown strategy {value!r}; expected one of "
        f"{[s.value for s in PromptStrategy]}"
    )


def create_app(
    config: AppConfig,
    provider: ChatProvider | None = None,
    embedder: Embedder | None = None,
    judge_provider: ChatProvider | None = None,
    judgments: list | None = None,
    cases: list | None = None,
) -> FastAPI:
    """Build the service; injected providers/corpora win over config paths."""
    app = FastAPI(title="disputelens", version=__version__)
    if config.cors_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[config.cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    if provider is None:
        try:
            provider = build_provider(config)
        except ConfigError as exc:
            # retrieval-only deployments have no LLM configured; summarize
            # and evaluate report this when actually called
            logger.warning("no completion provider: %s", exc)
            provider = None
    if embedder is None:
        embedder = build_embedder(config)
    if judge_provider is None:
        judge_provider = provider

    if judgments is None:
        try:
            judgments = load_judgments(config.judgments_path)
        except FileNotFoundError:
            judgments = []
    if cases is None:
        try:
            cases = load_case_files(config.cases_path)
        except FileNotFoundError:
            cases = []

    state: dict[str, Any] = {
        "cases": {c.id: c for c in cases},
        "judgments": {j.id: j for j in judgments},
        "summaries": {},
        "retriever": None,
    }
    if judgments:
        retriever = HybridRetriever(
            lexical_weight=config.lexical_weight,
            top_k=config.top_k,
            embedder=embedder,
        )
        loaded = False
        if config.index_dir:
            bm25_path = Path(config.index_dir) / "bm25.idx"
            emb_path = Path(config.index_dir) / "embeddings.bin"
            if bm25_path.exists() and emb_path.exists():
                from .store import corpus_content_hash, load_bm25_index, load_semantic_index

                content_hash = corpus_content_hash(judgments)
                retriever.bm25_index_ = load_bm25_index(bm25_path, content_hash)
                retriever.semantic_index_ = load_semantic_index(
                    emb_path, content_hash, embedder.cache_key()
                )
                loaded = True
                logger.info("loaded persisted indexes from %s", config.index_dir)
        if not loaded:
            retriever.fit(judgments)
        state["retriever"] = retriever

    @app.exception_handler(DisputeLensError)
    async def _domain_error(request: Request, exc: DisputeLensError):
        status = _STATUS_BY_CODE.get(exc.code, 502 if exc.exit_code == 4 else 500)
        if exc.exit_code == 5 and exc.code not in _STATUS_BY_CODE:
            status = 502  # the upstream model produced unusable output
        return JSONResponse(
            status_code=status,
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.get("/v1/sectors")
    def get_sectors():
        return [{"name": s.name, "code": s.code} for s in all_sectors()]

    @app.get("/v1/judgments/{judgment_id}")
    def get_judgment(judgment_id: str):
        record = state["judgments"].get(judgment_id)
        if record is None:
            raise _NotFound(f"judgment {judgment_id!r} not found")
        from .store import judgment_to_record

        return judgment_to_record(record)

    @app.post("/v1/cases")
    def post_case(body: CaseIn):
        try:
            case = CaseFile(
                id=body.id,
                complaint_text=body.complaint_text,
                written_statement_text=body.written_statement_text,
                metadata=body.metadata,
            )
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
        state["cases"][case.id] = case
        return {"id": case.id, "stored": True}

    @app.post("/v1/summarize")
    def post_summarize(body: SummarizeIn):
        if provider is None:
            raise ConfigError(
                "no completion provider configured; set provider/llm_script_path "
                "or llm_base_url"
            )
        strategy = _strategy_from_string(body.strategy)
        if body.case_id:
            case = state["cases"].get(body.case_id)
            if case is None:
                raise _NotFound(f"case {body.case_id!r} not found")
        elif body.complaint_text:
            try:
                case = CaseFile(
                    id=f"adhoc-{len(state['cases']) + 1:04d}",
                    complaint_text=body.complaint_text,
                    written_statement_text=body.written_statement_text,
                )
            except ValueError as exc:
                raise ParseError(str(exc)) from exc
            state["cases"][case.id] = case
        else:
            raise ParseError("summarize needs case_id or complaint_text")
        summarizer = Summarizer(provider, strategy, model_name=config.llm_model)
        summary, provenance = summarizer.summarize_with_provenance(case)
        state["summaries"][case.id] = summary
        return {
            "case_id": case.id,
            "summary": summary_to_dict(summary),
            "provenance": {
                "strategy": provenance.strategy.value,
                "model_name": provenance.model_name,
                "parts": [
                    {
                        "part": t.part.value,
                        "attempts": t.attempts,
                        "prompt_sha256": t.prompt_sha256,
                    }
                    for t in provenance.parts
                ],
                "warnings": list(provenance.warnings),
            },
        }

    @app.post("/v1/similar")
    def post_similar(body: SimilarIn):
        retriever = state["retriever"]
        if retriever is None:
            raise ConfigError("no judgment corpus configured; cannot search")
        sector = None
        overview = body.overview
        if body.case_id:
            summary = state["summaries"].get(body.case_id)
            if summary is None:
                raise _NotFound(f"no summary for case {body.case_id!r}; summarize first")
            overview = summary.overview
            sector = summary.sector
        if body.sector is not None:
            sector = sector_from_code(body.sector)
        if not overview:
            raise ParseError("similar needs overview text or a summarized case_id")
        results = retriever.topk(overview, sector=sector, k=body.k, weight=body.weight)
        warning = None
        if sector is not None and retriever.sector_size(sector) == 0:
            warning = f"no judgments in sector {sector.name} ({sector.code})"
        return {
            "query": {
                "sector": {"name": sector.name, "code": sector.code} if sector else None,
                "k": body.k or retriever.top_k,
                "weight": retriever.lexical_weight if body.weight is None else body.weight,
            },
            "warning": warning,
            "results": [
                {
                    "judgment_id": r.judgment_id,
                    "rank": r.rank,
                    "lexical_score": r.lexical_score,
                    "semantic_score": r.semantic_score,
                    "fused_score": r.fused_score,
                    "title": state["judgments"][r.judgment_id].title
                    if r.judgment_id in state["judgments"]
                    else "",
                }
                for r in results
            ],
        }

    def _kind(name: str):
        try:
            return metric_kind_from_name(name)
        except KeyError:
            from .errors import UnknownMetric

            raise UnknownMetric(f"unknown metric kind {name!r}") from None

    @app.post("/v1/evaluate")
    def post_evaluate(body: EvaluateIn):
        if judge_provider is None:
            raise ConfigError(
                "no judge provider configured; set provider/llm_script_path "
                "or llm_base_url"
            )
        if not body.pairs:
            raise ParseError("evaluate needs at least one pair")
        kinds = (
            ALL_KINDS
            if body.kinds is None
            else tuple(_kind(k) for k in body.kinds)
        )
        pairs = []
        pair_ids = []
        for i, p in enumerate(body.pairs, start=1):
            pairs.append((summary_from_dict(p.original), summary_from_dict(p.generated)))
            pair_ids.append(p.case_id or f"pair-{i:04d}")
        report = evaluate_run(
            pairs,
            kinds=kinds,
            judge_provider=judge_provider,
            pair_ids=pair_ids,
            model_name=config.judge_model,
        )
        return report.to_dict()

    if config.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
