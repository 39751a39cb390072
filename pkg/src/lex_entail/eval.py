"""Strategy execution, accuracy arithmetic, baseline deltas, accuracy
quantization checking, and majority-vote ensembling.

A run renders each case (one stage, or the two chain-of-thought stages),
asks the completion client, extracts a verdict, and folds the per-case
results into a report.  Execution may fan out to a worker pool; reports
are sorted by case id so they are independent of completion order.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .corpus import Corpus, EntailmentCase, ExemplarBank, GoldLabel
from .llm import (
    COT_STAGE1_MAX_TOKENS,
    CompletionClient,
    GenerationParams,
    cache_key,
)
from .prompt import (
    Strategy,
    render_cot_stage1,
    render_cot_stage2,
    render_fs,
    render_lr,
    render_zs,
)
from .verdict import (
    ExtractionResult,
    ExtractionStatus,
    Verdict,
    extract_verdict,
    verdict_to_label,
)


class EvalError(ValueError):
    """Raised for invalid evaluation input."""


# Accuracies the competition reported for the strongest system per year.
DEFAULT_BASELINES: dict[int, float] = {2021: 0.7037, 2022: 0.6789}


@dataclass(frozen=True)
class CaseResult:
    case_id: str
    prompts: tuple[str, ...]
    completions: tuple[str, ...]
    cache_keys: tuple[str, ...]
    extraction: ExtractionResult
    predicted: Optional[Verdict]
    gold: GoldLabel
    correct: bool


@dataclass(frozen=True)
class RunReport:
    strategy: str
    corpus_name: str
    corpus_digest: str
    model: str
    results: tuple[CaseResult, ...]
    accuracy: float
    counts: dict[str, int] = field(default_factory=dict)
    scoring_policy: str = "strict"

    def to_dict(self, include_texts: bool = True) -> dict:
        return {
            "strategy": self.strategy,
            "corpus_name": self.corpus_name,
            "corpus_digest": self.corpus_digest,
            "model": self.model,
            "accuracy": self.accuracy,
            "counts": dict(self.counts),
            "scoring_policy": self.scoring_policy,
            "results": [
                {
                    "case_id": r.case_id,
                    "gold": r.gold.value,
                    "predicted": r.predicted.value if r.predicted else None,
                    "status": r.extraction.status.value,
                    "correct": r.correct,
                    "cache_keys": list(r.cache_keys),
                    **(
                        {
                            "prompts": list(r.prompts),
                            "completions": list(r.completions),
                        }
                        if include_texts
                        else {}
                    ),
                }
                for r in self.results
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["id", "gold", "predicted", "status", "correct"])
        for r in self.results:
            writer.writerow(
                [
                    r.case_id,
                    r.gold.value,
                    r.predicted.value if r.predicted else "",
                    r.extraction.status.value,
                    str(r.correct).lower(),
                ]
            )
        return buf.getvalue()


def accuracy(correct: int, total: int) -> float:
    """Exact quotient rounded to 4 decimals, the reporting convention."""
    if total <= 0:
        raise EvalError("total must be positive")
    if not (0 <= correct <= total):
        raise EvalError("correct must be within [0, total]")
    return round(correct / total, 4)


def quantize_check(reported: float, total: int) -> Optional[int]:
    """Return the unique k with round(k/total, 4) == reported, else None."""
    if total <= 0:
        raise EvalError("total must be positive")
    if not (0 <= reported <= 1):
        raise EvalError("reported accuracy must be in [0, 1]")
    candidates = [
        k for k in range(total + 1) if abs(round(k / total, 4) - reported) < 5e-9
    ]
    return candidates[0] if len(candidates) == 1 else None


def compare(run_acc: float, baseline_acc: float) -> tuple[float, float]:
    """(absolute points, relative percent) of a run versus a baseline."""
    if baseline_acc <= 0:
        raise EvalError("baseline accuracy must be positive")
    points = 100.0 * (run_acc - baseline_acc)
    relative = 100.0 * (run_acc / baseline_acc - 1.0)
    return points, relative


def ensemble_vote(verdicts: list[Optional[Verdict]]) -> Optional[Verdict]:
    """Strict-majority vote over the present verdicts; ties and all-absent
    inputs abstain (None)."""
    if not verdicts:
        raise EvalError("ensemble_vote requires a nonempty list")
    trues = sum(1 for v in verdicts if v is Verdict.TRUE)
    falses = sum(1 for v in verdicts if v is Verdict.FALSE)
    if trues > falses:
        return Verdict.TRUE
    if falses > trues:
        return Verdict.FALSE
    return None


def _evaluate_case(
    case: EntailmentCase,
    strategy: Strategy,
    client: CompletionClient,
    bank: Optional[ExemplarBank],
) -> CaseResult:
    prompts: list[str] = []
    completions: list[str] = []
    keys: list[str] = []

    if strategy.kind == "zscot":
        stage1 = render_cot_stage1(case, strategy.prompt_id, strategy.layout)
        req1 = client.request(
            stage1.text,
            params=GenerationParams(max_tokens=COT_STAGE1_MAX_TOKENS),
            stage_tag="cot_stage1",
        )
        rec1 = client.complete(req1)
        reasoning = rec1.completion.strip() or "(no reasoning produced)"
        stage2 = render_cot_stage2(stage1, reasoning, strategy.layout)
        req2 = client.request(stage2.text, stage_tag="cot_stage2")
        rec2 = client.complete(req2)
        prompts = [stage1.text, stage2.text]
        completions = [rec1.completion, rec2.completion]
        keys = [cache_key(req1), cache_key(req2)]
        final_completion = rec2.completion
    else:
        if strategy.kind == "zs":
            rendered = render_zs(case, strategy.prompt_id, strategy.layout)
        elif strategy.kind == "fs":
            if bank is None:
                raise EvalError("fs strategy requires an exemplar bank")
            rendered = render_fs(
                case, bank, strategy.shots, strategy.prompt_id, strategy.layout
            )
        else:
            rendered = render_lr(case, strategy.approach, strategy.layout)
        request = client.request(rendered.text, stage_tag=rendered.stage)
        record = client.complete(request)
        prompts = [rendered.text]
        completions = [record.completion]
        keys = [cache_key(request)]
        final_completion = record.completion

    extraction = extract_verdict(final_completion)
    predicted = extraction.verdict
    correct = predicted is not None and verdict_to_label(predicted) == case.label
    return CaseResult(
        case_id=case.id,
        prompts=tuple(prompts),
        completions=tuple(completions),
        cache_keys=tuple(keys),
        extraction=extraction,
        predicted=predicted,
        gold=case.label,
        correct=correct,
    )


def run_strategy(
    corpus: Corpus,
    strategy: Strategy,
    client: CompletionClient,
    bank: Optional[ExemplarBank] = None,
    workers: int = 1,
    scoring_policy: str = "strict",
) -> RunReport:
    """Execute a strategy over a corpus and fold the results into a report.

    scoring_policy "strict" counts abstentions as incorrect; "exclude"
    removes them from the denominator.
    """
    if len(corpus) == 0:
        raise EvalError("empty corpus")
    if workers < 1:
        raise EvalError("workers must be >= 1")
    if scoring_policy not in {"strict", "exclude"}:
        raise EvalError(f"unknown scoring policy {scoring_policy!r}")

    if workers == 1:
        results = [_evaluate_case(c, strategy, client, bank) for c in corpus]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda c: _evaluate_case(c, strategy, client, bank), corpus)
            )

    results.sort(key=lambda r: r.case_id)
    n_correct = sum(1 for r in results if r.correct)
    n_ambiguous = sum(
        1 for r in results if r.extraction.status is ExtractionStatus.AMBIGUOUS
    )
    n_absent = sum(1 for r in results if r.extraction.status is ExtractionStatus.ABSENT)
    total = len(results)
    denominator = total - (n_ambiguous + n_absent) if scoring_policy == "exclude" else total
    acc = accuracy(n_correct, denominator) if denominator > 0 else 0.0
    return RunReport(
        strategy=strategy.describe(),
        corpus_name=corpus.name,
        corpus_digest=corpus.digest(),
        model=client.model,
        results=tuple(results),
        accuracy=acc,
        counts={
            "correct": n_correct,
            "incorrect": total - n_correct,
            "ambiguous": n_ambiguous,
            "absent": n_absent,
            "total": total,
        },
        scoring_policy=scoring_policy,
    )


def ensemble_reports(reports: list[dict]) -> dict:
    """Majority-vote ensemble over ≥2 run reports (dict form) sharing one
    corpus digest; returns an ensemble report dict."""
    if len(reports) < 2:
        raise EvalError("ensemble requires at least two runs")
    digests = {r["corpus_digest"] for r in reports}
    if len(digests) != 1:
        raise EvalError(f"corpus digest mismatch across runs: {sorted(digests)}")

    by_case: dict[str, list[Optional[Verdict]]] = {}
    gold: dict[str, GoldLabel] = {}
    for report in reports:
        for result in report["results"]:
            cid = result["case_id"]
            value = result.get("predicted")
            by_case.setdefault(cid, []).append(Verdict(value) if value else None)
            gold[cid] = GoldLabel(result["gold"])

    case_rows = []
    n_correct = 0
    for cid in sorted(by_case):
        voted = ensemble_vote(by_case[cid])
        correct = voted is not None and verdict_to_label(voted) == gold[cid]
        n_correct += correct
        case_rows.append(
            {
                "case_id": cid,
                "gold": gold[cid].value,
                "predicted": voted.value if voted else None,
                "votes": [v.value if v else None for v in by_case[cid]],
                "correct": correct,
            }
        )
    total = len(case_rows)
    return {
        "strategy": "ensemble(" + ", ".join(r["strategy"] for r in reports) + ")",
        "corpus_digest": next(iter(digests)),
        "accuracy": accuracy(n_correct, total),
        "counts": {"correct": n_correct, "incorrect": total - n_correct, "total": total},
        "results": case_rows,
    }


def write_run_artifacts(
    report: RunReport,
    run_dir,
    deterministic: bool = False,
) -> None:
    """Persist manifest.json, report.json and report.csv for a run."""
    import time
    from pathlib import Path

    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "strategy": report.strategy,
        "corpus_name": report.corpus_name,
        "corpus_digest": report.corpus_digest,
        "model": report.model,
        "cache_keys": [k for r in report.results for k in r.cache_keys],
        "scoring_policy": report.scoring_policy,
    }
    if not deterministic:
        manifest["created_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    (run_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    (run_dir / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    (run_dir / "report.csv").write_text(report.to_csv(), encoding="utf-8")
