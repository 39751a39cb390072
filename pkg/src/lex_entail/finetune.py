"""Fine-tuning dataset construction.

Four configurations:

1. input premise+hypothesis+"True or False?", completion = label
2. config 1 input preceded by the instructive prompt, completion = label
3. prompted input, completion = label + " Because according to " + the
   argmax-cosine premise sentence
4. prompted input, completion = a generated explanation conditioned on
   the gold label

Records serialize to JSONL with a leading-space completion and the
"\\n###" stop sequence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Optional, Union

from .corpus import Corpus, EntailmentCase, GoldLabel
from .explain import EmbeddingBackend, select_pseudo_explanation
from .llm import COT_STAGE1_MAX_TOKENS, CompletionClient, GenerationParams
from .prompt import (
    DEFAULT_LAYOUT,
    TRUE_OR_FALSE,
    LayoutSpec,
    render_explain_request,
    zs_prompt_text,
)

COMPLETION_PREFIX = " "
STOP_SEQUENCE = "\n###"
EXPLANATION_JOINT = "Because according to "


class FinetuneError(ValueError):
    """Raised for invalid fine-tune configuration or input."""


@dataclass(frozen=True)
class FinetuneConfig:
    id: int

    def __post_init__(self) -> None:
        if self.id not in (1, 2, 3, 4):
            raise FinetuneError(f"config id must be 1..4, got {self.id}")

    @property
    def uses_prompt(self) -> bool:
        return self.id != 1

    @property
    def completion_kind(self) -> str:
        return {
            1: "LABEL",
            2: "LABEL",
            3: "LABEL_PLUS_PSEUDO",
            4: "GENERATED_EXPLANATION",
        }[self.id]


@dataclass(frozen=True)
class FinetuneRecord:
    input_text: str
    completion_text: str
    case_id: str
    config_id: int

    def __post_init__(self) -> None:
        if not self.input_text.endswith(TRUE_OR_FALSE):
            raise FinetuneError(
                f"record {self.case_id!r}: input must end with {TRUE_OR_FALSE!r}"
            )
        if not self.completion_text:
            raise FinetuneError(f"record {self.case_id!r}: empty completion")


def _label_word(label: GoldLabel) -> str:
    return "True" if label is GoldLabel.YES else "False"


def _input_text(case: EntailmentCase, config: FinetuneConfig, layout: LayoutSpec) -> str:
    blocks = []
    if config.uses_prompt:
        blocks.append(zs_prompt_text(2))
    if layout.use_labels:
        blocks.append(f"{layout.premise_label} {case.premise}")
        blocks.append(f"{layout.hypothesis_label} {case.hypothesis}")
    else:
        blocks.extend([case.premise, case.hypothesis])
    blocks.append(TRUE_OR_FALSE)
    return layout.separator.join(blocks)


def build_records(
    corpus: Corpus,
    config: FinetuneConfig,
    embedding_backend: Optional[EmbeddingBackend] = None,
    completion_client: Optional[CompletionClient] = None,
    layout: LayoutSpec = DEFAULT_LAYOUT,
) -> list[FinetuneRecord]:
    """One record per training case, in corpus order."""
    if len(corpus) == 0:
        raise FinetuneError("empty corpus")
    if config.id == 4 and completion_client is None:
        raise FinetuneError("completion backend required for config 4")

    records: list[FinetuneRecord] = []
    for case in corpus:
        input_text = _input_text(case, config, layout)
        label = _label_word(case.label)
        if config.completion_kind == "LABEL":
            completion = label
        elif config.completion_kind == "LABEL_PLUS_PSEUDO":
            pseudo = select_pseudo_explanation(
                case.premise, case.hypothesis, embedding_backend
            )
            completion = f"{label} {EXPLANATION_JOINT}{pseudo.sentence}"
        else:
            prompt = render_explain_request(case, case.label, layout)
            request = completion_client.request(
                prompt.text,
                params=GenerationParams(max_tokens=COT_STAGE1_MAX_TOKENS),
                stage_tag="explain",
            )
            completion = completion_client.complete(request).completion
            if not completion:
                raise FinetuneError(f"backend returned empty explanation for {case.id!r}")
        records.append(
            FinetuneRecord(
                input_text=input_text,
                completion_text=completion,
                case_id=case.id,
                config_id=config.id,
            )
        )
    return records


def serialize_jsonl(records: list[FinetuneRecord], sink: IO[bytes]) -> int:
    """Write prompt/completion JSONL; returns the byte count written."""
    if not records:
        raise FinetuneError("no records to serialize")
    written = 0
    for record in records:
        line = json.dumps(
            {
                "prompt": record.input_text,
                "completion": f"{COMPLETION_PREFIX}{record.completion_text}{STOP_SEQUENCE}",
            },
            ensure_ascii=False,
        )
        data = (line + "\n").encode("utf-8")
        sink.write(data)
        written += len(data)
    return written


def parse_jsonl(
    source: Union[bytes, str, IO[bytes]],
    config_id: int = 0,
) -> list[FinetuneRecord]:
    """Read back an exported file; inverse of :func:`serialize_jsonl` up to
    case ids (the wire format does not carry them)."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read().decode("utf-8")
    records: list[FinetuneRecord] = []
    for lineno, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        obj = json.loads(line)
        completion = obj["completion"]
        if not completion.startswith(COMPLETION_PREFIX) or not completion.endswith(
            STOP_SEQUENCE
        ):
            raise FinetuneError(f"line {lineno}: completion framing missing")
        stripped = completion[len(COMPLETION_PREFIX) : -len(STOP_SEQUENCE)]
        records.append(
            FinetuneRecord(
                input_text=obj["prompt"],
                completion_text=stripped,
                case_id=f"line-{lineno}",
                config_id=config_id or 1,
            )
        )
    return records
