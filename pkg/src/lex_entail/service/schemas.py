"""Pydantic request/response models for the harness service."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class CaseModel(BaseModel):
    id: str
    premise: str
    hypothesis: str
    label: str = "YES"  # "YES" | "NO"


class LayoutModel(BaseModel):
    premise_label: str = "Premise:"
    hypothesis_label: str = "Hypothesis:"
    use_labels: bool = True
    separator: str = "\n"


class StrategyModel(BaseModel):
    kind: str  # "zs" | "fs" | "zscot" | "lr"
    prompt_id: int = 2
    shots: int = 0
    approach: Optional[str] = None
    layout: LayoutModel = Field(default_factory=LayoutModel)


class ExemplarModel(BaseModel):
    question: str
    answer: str
    commentary: Optional[str] = None


class MockRuleModel(BaseModel):
    pattern: str
    completion: str


class BackendModel(BaseModel):
    kind: str = "mock"  # "mock" | "remote"
    model: str = "mock"
    rules: list[MockRuleModel] = Field(default_factory=list)
    base_url: Optional[str] = None
    requests_per_minute: Optional[int] = None


class RenderRequest(BaseModel):
    case: CaseModel
    strategy: StrategyModel
    exemplars: list[ExemplarModel] = Field(default_factory=list)
    # For re-rendering the chain-of-thought answer stage:
    stage: str = "single"  # "single" | "cot_stage1" | "cot_stage2"
    reasoning: Optional[str] = None


class RenderResponse(BaseModel):
    text: str
    strategy: str
    case_id: str
    stage: str


class ExtractRequest(BaseModel):
    completion: str


class ExtractResponse(BaseModel):
    verdict: Optional[str]
    status: str
    matched_span: Optional[tuple[int, int]]


class RunRequest(BaseModel):
    corpus_xml: str
    corpus_name: str = "corpus"
    strategy: StrategyModel
    backend: BackendModel
    exemplars: list[ExemplarModel] = Field(default_factory=list)
    workers: int = 1
    scoring_policy: str = "strict"
    baseline_year: Optional[int] = None
    include_texts: bool = False


class RunResponse(BaseModel):
    report: dict[str, Any]
    backend_calls: int
    baseline: Optional[dict[str, float]] = None


class FinetuneRequest(BaseModel):
    corpus_xml: str
    corpus_name: str = "corpus"
    config_id: int
    backend: Optional[BackendModel] = None


class FinetuneResponse(BaseModel):
    jsonl: str
    count: int


class EnsembleRequest(BaseModel):
    runs: list[dict[str, Any]]


class QuantizeCell(BaseModel):
    accuracy: float
    total: int
    label: Optional[str] = None


class QuantizeRequest(BaseModel):
    cells: list[QuantizeCell]


class QuantizeResult(BaseModel):
    accuracy: float
    total: int
    label: Optional[str]
    count: Optional[int]


class QuantizeResponse(BaseModel):
    results: list[QuantizeResult]
    all_unique: bool


class CompareRequest(BaseModel):
    run_accuracy: float
    baseline_accuracy: Optional[float] = None
    baseline_year: Optional[int] = None


class CompareResponse(BaseModel):
    points: float
    relative_percent: float


class ExplainRunRequest(BaseModel):
    corpus_xml: str
    corpus_name: str = "corpus"


class ExplainItem(BaseModel):
    case_id: str
    index: int
    score: float
    sentence: str


class ExplainRunResponse(BaseModel):
    items: list[ExplainItem]


class CorpusValidateRequest(BaseModel):
    corpus_xml: str
    corpus_name: str = "corpus"


class CorpusValidateResponse(BaseModel):
    ok: bool
    cases: int
    digest: Optional[str] = None
    error: Optional[str] = None


class CacheStatsResponse(BaseModel):
    entries: int
    bytes: int
    root: str


class CachePruneResponse(BaseModel):
    removed: int
