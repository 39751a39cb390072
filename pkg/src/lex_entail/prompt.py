"""Prompt rendering: zero-shot, few-shot, chain-of-thought two-stage,
legal-reasoning-schema, and explanation-request prompts.

All renders are pure functions; premise and hypothesis always appear
verbatim as contiguous substrings of the output.  The exact block layout
(section labels, separators) is configurable and pinned by golden files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .corpus import EntailmentCase, Exemplar, ExemplarBank, GoldLabel


class PromptError(ValueError):
    """Raised for invalid prompt parameters."""


ZS_PROMPTS: dict[int, str] = {
    1: "Please determine if the hypothesis is True or False based on the given premise.",
    2: "Please determine if the following hypothesis is True or False based on the given premise.",
    3: "Please determine if the following hypothesis is True or False based on the Japanese civil code statutes.",
}

TRUE_OR_FALSE = "True or False?"
COT_TRIGGER = "Let's think step by step"
ANSWER_TRIGGER = "Therefore, the hypothesis (True or False) is"
LR_INSTRUCTION = (
    "Please analyze if the hypothesis is True or False according to the given "
    "legal reasoning approach"
)
EXPLAIN_PREFIX = "Please explain why the following hypothesis is"
EXPLAIN_SUFFIX = "based on the given premise."


class LegalApproach(str, Enum):
    """Acronyms of lawyers' analysis schemas used as instructions."""

    TRRAC = "TRRAC"
    CLEO = "CLEO"
    ILAC = "ILAC"
    IRAACP = "IRAACP"
    IRREAC = "IRREAC"
    IGPAC = "IGPAC"
    IPAAC = "IPAAC"
    IRRAC = "IRRAC"
    IRAC = "IRAC"

    @property
    def expansion(self) -> str:
        return APPROACH_EXPANSIONS[self]


APPROACH_EXPANSIONS: dict[LegalApproach, str] = {
    LegalApproach.TRRAC: "Thesis, rule, rule, application, conclusion",
    LegalApproach.CLEO: "Claim, law, evaluation, outcome",
    LegalApproach.ILAC: "Issue, law, application, conclusion",
    LegalApproach.IRAACP: "Issue, rule, apply, apply, conclusion, policy",
    LegalApproach.IRREAC: "Issue, rule, rule, application, conclusion",
    LegalApproach.IGPAC: "Issue, general rule, precedent, application, conclusion",
    LegalApproach.IPAAC: "Issue, principle, authority, application, conclusion",
    LegalApproach.IRRAC: "Issue, rule, reasoning, application, conclusion",
    LegalApproach.IRAC: "Issue, rule, application, conclusion",
}


@dataclass(frozen=True)
class LayoutSpec:
    """Block layout: section labels and the separator between blocks."""

    premise_label: str = "Premise:"
    hypothesis_label: str = "Hypothesis:"
    use_labels: bool = True
    separator: str = "\n"


DEFAULT_LAYOUT = LayoutSpec()


@dataclass(frozen=True)
class Strategy:
    """A fully parameterized prompting recipe."""

    kind: str  # one of "zs", "fs", "zscot", "lr"
    prompt_id: int = 2
    shots: int = 0
    approach: Optional[LegalApproach] = None
    layout: LayoutSpec = field(default=DEFAULT_LAYOUT)

    def __post_init__(self) -> None:
        if self.kind not in {"zs", "fs", "zscot", "lr"}:
            raise PromptError(f"unknown strategy kind {self.kind!r}")
        if self.kind in {"zs", "fs", "zscot"} and self.prompt_id not in ZS_PROMPTS:
            raise PromptError(f"prompt id must be in {{1,2,3}}, got {self.prompt_id}")
        if self.kind == "fs" and self.shots < 0:
            raise PromptError("shots must be >= 0")
        if self.kind == "lr" and self.approach is None:
            raise PromptError("lr strategy requires an approach")

    def describe(self) -> str:
        if self.kind == "zs":
            return f"zs-prompt{self.prompt_id}"
        if self.kind == "fs":
            return f"fs-{self.shots}shot-prompt{self.prompt_id}"
        if self.kind == "zscot":
            return f"zscot-prompt{self.prompt_id}"
        return f"lr-{self.approach.value}"


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    strategy: str
    case_id: str
    stage: str = "single"  # "single" | "cot_stage1" | "cot_stage2"

    def __post_init__(self) -> None:
        if not self.text:
            raise PromptError("rendered prompt text must be nonempty")
        if self.stage not in {"single", "cot_stage1", "cot_stage2"}:
            raise PromptError(f"invalid stage {self.stage!r}")


def zs_prompt_text(prompt_id: int) -> str:
    """Return one of the three fixed zero-shot instruction strings."""
    try:
        return ZS_PROMPTS[prompt_id]
    except KeyError:
        raise PromptError(f"prompt id must be in {{1,2,3}}, got {prompt_id!r}")


def _case_blocks(case: EntailmentCase, layout: LayoutSpec) -> list[str]:
    if layout.use_labels:
        return [
            f"{layout.premise_label} {case.premise}",
            f"{layout.hypothesis_label} {case.hypothesis}",
        ]
    return [case.premise, case.hypothesis]


def render_zs(
    case: EntailmentCase,
    prompt_id: int = 2,
    layout: LayoutSpec = DEFAULT_LAYOUT,
) -> RenderedPrompt:
    """Instruction, premise, hypothesis, then the "True or False?" question."""
    blocks = [zs_prompt_text(prompt_id), *_case_blocks(case, layout), TRUE_OR_FALSE]
    return RenderedPrompt(
        text=layout.separator.join(blocks),
        strategy=f"zs-prompt{prompt_id}",
        case_id=case.id,
    )


def _exemplar_block(exemplar: Exemplar, layout: LayoutSpec) -> str:
    answer = "True" if exemplar.answer is GoldLabel.YES else "False"
    question = (
        f"{layout.hypothesis_label} {exemplar.question}"
        if layout.use_labels
        else exemplar.question
    )
    return layout.separator.join([question, f"Answer: {answer}"])


def render_fs(
    case: EntailmentCase,
    bank: ExemplarBank,
    shots: int,
    prompt_id: int = 2,
    layout: LayoutSpec = DEFAULT_LAYOUT,
) -> RenderedPrompt:
    """Prepend the first `shots` bank exemplars to the zero-shot rendering.

    shots=0 degenerates to the plain zero-shot prompt.  An exemplar whose
    question equals the target hypothesis is rejected (leakage).
    """
    if shots < 0:
        raise PromptError("shots must be >= 0")
    if shots > len(bank):
        raise PromptError(f"shots exceeds exemplar bank ({shots} > {len(bank)})")
    chosen = bank.exemplars[:shots]
    for exemplar in chosen:
        if exemplar.question == case.hypothesis:
            raise PromptError(
                f"exemplar question equals target hypothesis of case {case.id!r}"
            )
    target = render_zs(case, prompt_id, layout)
    blocks = [_exemplar_block(e, layout) for e in chosen] + [target.text]
    return RenderedPrompt(
        text=layout.separator.join(blocks),
        strategy=f"fs-{shots}shot-prompt{prompt_id}",
        case_id=case.id,
    )


def render_cot_stage1(
    case: EntailmentCase,
    prompt_id: int = 2,
    layout: LayoutSpec = DEFAULT_LAYOUT,
) -> RenderedPrompt:
    """Reasoning stage: the zero-shot prompt with the question replaced by
    the step-by-step trigger."""
    blocks = [zs_prompt_text(prompt_id), *_case_blocks(case, layout), COT_TRIGGER]
    return RenderedPrompt(
        text=layout.separator.join(blocks),
        strategy=f"zscot-prompt{prompt_id}",
        case_id=case.id,
        stage="cot_stage1",
    )


def render_cot_stage2(
    stage1: RenderedPrompt,
    reasoning: str,
    layout: LayoutSpec = DEFAULT_LAYOUT,
) -> RenderedPrompt:
    """Answer stage: stage-1 text, the model's reasoning verbatim, then the
    answer trigger."""
    if stage1.stage != "cot_stage1":
        raise PromptError(f"expected a cot_stage1 prompt, got {stage1.stage!r}")
    if not reasoning:
        raise PromptError("reasoning must be nonempty")
    text = layout.separator.join([stage1.text, reasoning, ANSWER_TRIGGER])
    return RenderedPrompt(
        text=text,
        strategy=stage1.strategy,
        case_id=stage1.case_id,
        stage="cot_stage2",
    )


def render_lr(
    case: EntailmentCase,
    approach: LegalApproach,
    layout: LayoutSpec = DEFAULT_LAYOUT,
) -> RenderedPrompt:
    """Zero-shot prompt naming a legal analysis schema (acronym + expansion)."""
    if not isinstance(approach, LegalApproach):
        try:
            approach = LegalApproach(str(approach))
        except ValueError:
            raise PromptError(f"unknown legal reasoning approach {approach!r}")
    blocks = [
        LR_INSTRUCTION,
        f"Approach: {approach.value} ({approach.expansion})",
        *_case_blocks(case, layout),
        TRUE_OR_FALSE,
    ]
    return RenderedPrompt(
        text=layout.separator.join(blocks),
        strategy=f"lr-{approach.value}",
        case_id=case.id,
    )


def render_explain_request(
    case: EntailmentCase,
    label: GoldLabel,
    layout: LayoutSpec = DEFAULT_LAYOUT,
) -> RenderedPrompt:
    """Ask for an explanation of why the hypothesis is True/False, given the
    gold label."""
    word = "True" if label is GoldLabel.YES else "False"
    blocks = [
        f"{EXPLAIN_PREFIX} {word} {EXPLAIN_SUFFIX}",
        *_case_blocks(case, layout),
    ]
    return RenderedPrompt(
        text=layout.separator.join(blocks),
        strategy=f"explain-{word.lower()}",
        case_id=case.id,
    )
