"""Normalize free-text completions into binary entailment verdicts.

The extraction cascade, in priority order:

1. leading True/False token (after trimming whitespace/punctuation);
2. "hypothesis is (true|false)" / "hypothesis (True or False) is (true|false)";
3. standalone Yes/No token (Yes -> TRUE, No -> FALSE);
4. last True/False token anywhere.

Within levels 2 and 3, conflicting cues yield AMBIGUOUS; no cue at any
level yields ABSENT.  Extraction is case-insensitive throughout.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .corpus import GoldLabel


class Verdict(str, Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"


class ExtractionStatus(str, Enum):
    CLEAR = "CLEAR"
    AMBIGUOUS = "AMBIGUOUS"
    ABSENT = "ABSENT"


@dataclass(frozen=True)
class ExtractionResult:
    verdict: Optional[Verdict]
    status: ExtractionStatus
    matched_span: Optional[tuple[int, int]] = None  # (offset, length)

    def __post_init__(self) -> None:
        has_verdict = self.verdict is not None
        if (self.status is ExtractionStatus.CLEAR) != has_verdict:
            raise ValueError("status CLEAR iff a verdict is present")
        if has_verdict != (self.matched_span is not None):
            raise ValueError("matched_span present iff a verdict is present")


_LEADING = re.compile(r'^[\s\'"“”‘’().,:;!?\[\]-]*(true|false)\b', re.IGNORECASE)
_PHRASE = re.compile(
    r"hypothesis(?:\s*\(true\s+or\s+false\)\s+is|\s+is)\s+[\"'“‘]?(true|false)\b",
    re.IGNORECASE,
)
_YESNO = re.compile(r"\b(yes|no)\b", re.IGNORECASE)
_TOKEN = re.compile(r"\b(true|false)\b", re.IGNORECASE)

_WORD_TO_VERDICT = {
    "true": Verdict.TRUE,
    "false": Verdict.FALSE,
    "yes": Verdict.TRUE,
    "no": Verdict.FALSE,
}


def _clear(match: re.Match) -> ExtractionResult:
    verdict = _WORD_TO_VERDICT[match.group(1).lower()]
    start, end = match.span(1)
    return ExtractionResult(
        verdict=verdict,
        status=ExtractionStatus.CLEAR,
        matched_span=(start, end - start),
    )


def extract_verdict(completion: str) -> ExtractionResult:
    """Apply the rule cascade to a completion; never raises."""
    m = _LEADING.match(completion)
    if m:
        return _clear(m)

    for pattern in (_PHRASE, _YESNO):
        matches = list(pattern.finditer(completion))
        if matches:
            verdicts = {_WORD_TO_VERDICT[m.group(1).lower()] for m in matches}
            if len(verdicts) > 1:
                return ExtractionResult(
                    verdict=None, status=ExtractionStatus.AMBIGUOUS
                )
            return _clear(matches[0])

    tokens = list(_TOKEN.finditer(completion))
    if tokens:
        return _clear(tokens[-1])

    return ExtractionResult(verdict=None, status=ExtractionStatus.ABSENT)


def verdict_to_label(v: Verdict) -> GoldLabel:
    return GoldLabel.YES if v is Verdict.TRUE else GoldLabel.NO


def label_to_verdict(label: GoldLabel) -> Verdict:
    return Verdict.TRUE if label is GoldLabel.YES else Verdict.FALSE
