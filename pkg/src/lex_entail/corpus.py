"""Corpus and exemplar-bank loading.

Corpora arrive as XML files of ``<pair id label><t1>premise</t1>
<t2>hypothesis</t2></pair>`` elements; exemplar banks as JSON arrays of
question/answer records.  Everything parsed here is immutable and safe to
share across threads.
"""

from __future__ import annotations

import hashlib
import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterator, Optional, Union
from xml.sax.saxutils import escape, quoteattr


class GoldLabel(str, Enum):
    YES = "YES"
    NO = "NO"


class CorpusError(ValueError):
    """Raised for malformed corpus or exemplar input."""


# Accepted answer spellings in user-authored exemplar files.  Corpus files
# are a fixed external format and accept exactly "Y"/"N".
_EXEMPLAR_ANSWERS = {
    "y": GoldLabel.YES,
    "yes": GoldLabel.YES,
    "true": GoldLabel.YES,
    "n": GoldLabel.NO,
    "no": GoldLabel.NO,
    "false": GoldLabel.NO,
}


@dataclass(frozen=True)
class EntailmentCase:
    """One bar-exam question: premise articles, hypothesis, gold label."""

    id: str
    premise: str
    hypothesis: str
    label: GoldLabel

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("case id must be nonempty")
        if not self.premise:
            raise CorpusError(f"case {self.id!r}: premise must be nonempty")
        if not self.hypothesis:
            raise CorpusError(f"case {self.id!r}: hypothesis must be nonempty")
        if not isinstance(self.label, GoldLabel):
            raise CorpusError(f"case {self.id!r}: invalid label {self.label!r}")


@dataclass(frozen=True)
class Corpus:
    name: str
    cases: tuple[EntailmentCase, ...]
    year: Optional[int] = None

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for case in self.cases:
            if case.id in seen:
                raise CorpusError(f"duplicate case id {case.id!r}")
            seen.add(case.id)

    def __iter__(self) -> Iterator[EntailmentCase]:
        return iter(self.cases)

    def __len__(self) -> int:
        return len(self.cases)

    def digest(self) -> str:
        """Content digest over case ids, texts and labels (order-sensitive)."""
        h = hashlib.sha256()
        for case in self.cases:
            payload = json.dumps(
                [case.id, case.premise, case.hypothesis, case.label.value],
                ensure_ascii=False,
            )
            h.update(payload.encode("utf-8"))
            h.update(b"\x00")
        return h.hexdigest()


@dataclass(frozen=True)
class Exemplar:
    """A solved question used for few-shot prompting; carries no premise."""

    question: str
    answer: GoldLabel
    commentary: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.question:
            raise CorpusError("exemplar question must be nonempty")


@dataclass(frozen=True)
class ExemplarBank:
    exemplars: tuple[Exemplar, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.exemplars)

    def __iter__(self) -> Iterator[Exemplar]:
        return iter(self.exemplars)


def _read_utf8(source: Union[bytes, str, IO[bytes]]) -> str:
    if isinstance(source, str):
        return source
    data = source if isinstance(source, bytes) else source.read()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusError(f"input is not valid UTF-8: {exc}") from exc


def parse_corpus(
    source: Union[bytes, str, IO[bytes]],
    name: str,
    year: Optional[int] = None,
) -> Corpus:
    """Parse a pair-format XML corpus into an immutable :class:`Corpus`.

    Labels "Y"/"N" map to YES/NO.  Leading/trailing whitespace of the
    premise and hypothesis is trimmed; interior whitespace is preserved.
    """
    text = _read_utf8(source)
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise CorpusError(f"malformed XML: {exc}") from exc

    cases: list[EntailmentCase] = []
    seen: set[str] = set()
    for idx, pair in enumerate(root.iter("pair")):
        pair_id = pair.get("id")
        if not pair_id:
            raise CorpusError(f"pair #{idx}: missing id attribute")
        if pair_id in seen:
            raise CorpusError(f"duplicate case id {pair_id!r}")
        seen.add(pair_id)
        raw_label = pair.get("label")
        if raw_label == "Y":
            label = GoldLabel.YES
        elif raw_label == "N":
            label = GoldLabel.NO
        else:
            raise CorpusError(
                f"pair {pair_id!r}: label must be 'Y' or 'N', got {raw_label!r}"
            )
        t1 = pair.find("t1")
        t2 = pair.find("t2")
        if t1 is None or not (t1.text or "").strip():
            raise CorpusError(f"pair {pair_id!r}: missing or empty <t1>")
        if t2 is None or not (t2.text or "").strip():
            raise CorpusError(f"pair {pair_id!r}: missing or empty <t2>")
        cases.append(
            EntailmentCase(
                id=pair_id,
                premise=(t1.text or "").strip(),
                hypothesis=(t2.text or "").strip(),
                label=label,
            )
        )
    return Corpus(name=name, cases=tuple(cases), year=year)


def serialize_corpus(corpus: Corpus) -> bytes:
    """Emit a corpus back to the pair format; reparsing yields an equal one."""
    lines = ["<dataset>"]
    for case in corpus:
        label = "Y" if case.label is GoldLabel.YES else "N"
        lines.append(f"<pair id={quoteattr(case.id)} label=\"{label}\">")
        lines.append(f"<t1>{escape(case.premise)}</t1>")
        lines.append(f"<t2>{escape(case.hypothesis)}</t2>")
        lines.append("</pair>")
    lines.append("</dataset>")
    return "\n".join(lines).encode("utf-8")


def normalize_answer(raw: str) -> GoldLabel:
    """Map an exemplar answer spelling to a gold label."""
    label = _EXEMPLAR_ANSWERS.get(raw.strip().lower())
    if label is None:
        raise CorpusError(f"unrecognized answer {raw!r}")
    return label


def load_exemplars(source: Union[bytes, str, IO[bytes]]) -> ExemplarBank:
    """Load a JSON exemplar bank, normalizing answers to YES/NO."""
    text = _read_utf8(source)
    try:
        records = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"malformed exemplar JSON: {exc}") from exc
    if not isinstance(records, list):
        raise CorpusError("exemplar file must be a JSON array")
    if not records:
        raise CorpusError("empty exemplar bank")

    exemplars: list[Exemplar] = []
    for idx, rec in enumerate(records):
        if not isinstance(rec, dict):
            raise CorpusError(f"exemplar #{idx}: expected an object")
        question = rec.get("question")
        answer = rec.get("answer")
        if not question:
            raise CorpusError(f"exemplar #{idx}: missing question")
        if not answer:
            raise CorpusError(f"exemplar #{idx}: missing answer")
        exemplars.append(
            Exemplar(
                question=question,
                answer=normalize_answer(str(answer)),
                commentary=rec.get("commentary"),
            )
        )
    return ExemplarBank(exemplars=tuple(exemplars))
