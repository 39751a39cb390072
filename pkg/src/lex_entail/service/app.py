"""FastAPI application exposing the harness core.

Stateless endpoints (render, extract, metrics) plus run execution backed
by a server-side completion cache, so repeated runs replay from disk.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..corpus import (
    CorpusError,
    EntailmentCase,
    Exemplar,
    ExemplarBank,
    GoldLabel,
    normalize_answer,
    parse_corpus,
)
from ..eval import (
    DEFAULT_BASELINES,
    EvalError,
    compare,
    ensemble_reports,
    quantize_check,
    run_strategy,
)
from ..explain import select_pseudo_explanation
from ..finetune import (
    FinetuneConfig,
    FinetuneError,
    build_records,
    serialize_jsonl,
)
from ..llm import (
    BackendError,
    CompletionClient,
    DiskCache,
    HttpBackend,
    MockBackend,
    MockRule,
)
from ..prompt import (
    LayoutSpec,
    LegalApproach,
    PromptError,
    RenderedPrompt,
    Strategy,
    render_cot_stage1,
    render_cot_stage2,
    render_fs,
    render_lr,
    render_zs,
)
from ..verdict import extract_verdict
from . import schemas

CACHE_DIR_ENV = "LEX_ENTAIL_CACHE_DIR"


def _default_cache_dir() -> Path:
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return Path(env)
    return Path(tempfile.gettempdir()) / "lex-entail-cache"


def _layout(model: schemas.LayoutModel) -> LayoutSpec:
    return LayoutSpec(
        premise_label=model.premise_label,
        hypothesis_label=model.hypothesis_label,
        use_labels=model.use_labels,
        separator=model.separator,
    )


def _strategy(model: schemas.StrategyModel) -> Strategy:
    approach = None
    if model.approach is not None:
        try:
            approach = LegalApproach(model.approach)
        except ValueError:
            raise PromptError(f"unknown legal reasoning approach {model.approach!r}")
    return Strategy(
        kind=model.kind,
        prompt_id=model.prompt_id,
        shots=model.shots,
        approach=approach,
        layout=_layout(model.layout),
    )


def _case(model: schemas.CaseModel) -> EntailmentCase:
    return EntailmentCase(
        id=model.id,
        premise=model.premise,
        hypothesis=model.hypothesis,
        label=GoldLabel(model.label),
    )


def _bank(models: list[schemas.ExemplarModel]) -> Optional[ExemplarBank]:
    if not models:
        return None
    return ExemplarBank(
        exemplars=tuple(
            Exemplar(
                question=m.question,
                answer=normalize_answer(m.answer),
                commentary=m.commentary,
            )
            for m in models
        )
    )


def _build_client(
    backend_model: schemas.BackendModel, cache: DiskCache
) -> tuple[CompletionClient, MockBackend | HttpBackend]:
    if backend_model.kind == "mock":
        backend = MockBackend(
            [MockRule(r.pattern, r.completion) for r in backend_model.rules]
        )
    elif backend_model.kind == "remote":
        if not backend_model.base_url:
            raise EvalError("remote backend requires base_url")
        backend = HttpBackend(
            backend_model.base_url,
            requests_per_minute=backend_model.requests_per_minute,
        )
    else:
        raise EvalError(f"unknown backend kind {backend_model.kind!r}")
    return CompletionClient(backend, cache, model=backend_model.model), backend


def create_app(cache_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="lex-entail", version=__version__)
    cache = DiskCache(cache_dir or _default_cache_dir())

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(BackendError)
    async def _backend_error(_: Request, exc: BackendError) -> JSONResponse:
        return JSONResponse(status_code=502, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/prompts/render", response_model=schemas.RenderResponse)
    def render(req: schemas.RenderRequest) -> schemas.RenderResponse:
        case = _case(req.case)
        strategy = _strategy(req.strategy)
        layout = strategy.layout
        rendered: RenderedPrompt
        if strategy.kind == "zs":
            rendered = render_zs(case, strategy.prompt_id, layout)
        elif strategy.kind == "fs":
            bank = _bank(req.exemplars)
            if bank is None:
                raise PromptError("fs render requires exemplars")
            rendered = render_fs(case, bank, strategy.shots, strategy.prompt_id, layout)
        elif strategy.kind == "lr":
            rendered = render_lr(case, strategy.approach, layout)
        else:
            stage1 = render_cot_stage1(case, strategy.prompt_id, layout)
            if req.stage == "cot_stage2":
                rendered = render_cot_stage2(stage1, req.reasoning or "", layout)
            else:
                rendered = stage1
        return schemas.RenderResponse(
            text=rendered.text,
            strategy=rendered.strategy,
            case_id=rendered.case_id,
            stage=rendered.stage,
        )

    @app.post("/verdicts/extract", response_model=schemas.ExtractResponse)
    def extract(req: schemas.ExtractRequest) -> schemas.ExtractResponse:
        result = extract_verdict(req.completion)
        return schemas.ExtractResponse(
            verdict=result.verdict.value if result.verdict else None,
            status=result.status.value,
            matched_span=result.matched_span,
        )

    @app.post("/runs", response_model=schemas.RunResponse)
    def run(req: schemas.RunRequest) -> schemas.RunResponse:
        corpus = parse_corpus(req.corpus_xml, req.corpus_name)
        strategy = _strategy(req.strategy)
        client, backend = _build_client(req.backend, cache)
        report = run_strategy(
            corpus,
            strategy,
            client,
            bank=_bank(req.exemplars),
            workers=req.workers,
            scoring_policy=req.scoring_policy,
        )
        baseline = None
        if req.baseline_year is not None:
            if req.baseline_year not in DEFAULT_BASELINES:
                raise EvalError(f"no baseline for year {req.baseline_year}")
            base = DEFAULT_BASELINES[req.baseline_year]
            points, relative = compare(report.accuracy, base)
            baseline = {
                "year": float(req.baseline_year),
                "baseline_accuracy": base,
                "points": round(points, 2),
                "relative_percent": round(relative, 2),
            }
        calls = backend.calls if isinstance(backend, MockBackend) else -1
        return schemas.RunResponse(
            report=report.to_dict(include_texts=req.include_texts),
            backend_calls=calls,
            baseline=baseline,
        )

    @app.post("/finetune/export", response_model=schemas.FinetuneResponse)
    def finetune_export(req: schemas.FinetuneRequest) -> schemas.FinetuneResponse:
        import io

        corpus = parse_corpus(req.corpus_xml, req.corpus_name)
        config = FinetuneConfig(req.config_id)
        client = None
        if req.backend is not None:
            client, _ = _build_client(req.backend, cache)
        elif config.id == 4:
            raise FinetuneError("completion backend required for config 4")
        records = build_records(corpus, config, completion_client=client)
        sink = io.BytesIO()
        serialize_jsonl(records, sink)
        return schemas.FinetuneResponse(
            jsonl=sink.getvalue().decode("utf-8"), count=len(records)
        )

    @app.post("/ensemble")
    def ensemble(req: schemas.EnsembleRequest) -> dict:
        return ensemble_reports(req.runs)

    @app.post("/metrics/quantize", response_model=schemas.QuantizeResponse)
    def quantize(req: schemas.QuantizeRequest) -> schemas.QuantizeResponse:
        results = [
            schemas.QuantizeResult(
                accuracy=cell.accuracy,
                total=cell.total,
                label=cell.label,
                count=quantize_check(cell.accuracy, cell.total),
            )
            for cell in req.cells
        ]
        return schemas.QuantizeResponse(
            results=results, all_unique=all(r.count is not None for r in results)
        )

    @app.post("/metrics/compare", response_model=schemas.CompareResponse)
    def compare_endpoint(req: schemas.CompareRequest) -> schemas.CompareResponse:
        baseline = req.baseline_accuracy
        if baseline is None:
            if req.baseline_year is None or req.baseline_year not in DEFAULT_BASELINES:
                raise EvalError("provide baseline_accuracy or a known baseline_year")
            baseline = DEFAULT_BASELINES[req.baseline_year]
        points, relative = compare(req.run_accuracy, baseline)
        return schemas.CompareResponse(points=points, relative_percent=relative)

    @app.post("/explain", response_model=schemas.ExplainRunResponse)
    def explain(req: schemas.ExplainRunRequest) -> schemas.ExplainRunResponse:
        corpus = parse_corpus(req.corpus_xml, req.corpus_name)
        items = []
        for case in corpus:
            pseudo = select_pseudo_explanation(case.premise, case.hypothesis)
            items.append(
                schemas.ExplainItem(
                    case_id=case.id,
                    index=pseudo.index,
                    score=pseudo.score,
                    sentence=pseudo.sentence,
                )
            )
        return schemas.ExplainRunResponse(items=items)

    @app.post("/corpus/validate", response_model=schemas.CorpusValidateResponse)
    def corpus_validate(
        req: schemas.CorpusValidateRequest,
    ) -> schemas.CorpusValidateResponse:
        try:
            corpus = parse_corpus(req.corpus_xml, req.corpus_name)
        except CorpusError as exc:
            return schemas.CorpusValidateResponse(ok=False, cases=0, error=str(exc))
        return schemas.CorpusValidateResponse(
            ok=True, cases=len(corpus), digest=corpus.digest()
        )

    @app.get("/cache/stats", response_model=schemas.CacheStatsResponse)
    def cache_stats() -> schemas.CacheStatsResponse:
        return schemas.CacheStatsResponse(**cache.stats())

    @app.post("/cache/prune", response_model=schemas.CachePruneResponse)
    def cache_prune() -> schemas.CachePruneResponse:
        return schemas.CachePruneResponse(removed=cache.prune())

    return app
