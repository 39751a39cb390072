"""Pseudo-explanation selection.

Split a premise into sentences, embed each sentence and the hypothesis,
and pick the sentence with the highest cosine similarity.  The built-in
embedding backend is a deterministic hashed bag-of-words model so the
whole pipeline runs offline; a remote encoder can be slotted in through
the same interface.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np


class ExplainError(ValueError):
    """Raised for invalid segmentation or embedding input."""


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    offset: int


@dataclass(frozen=True)
class SentenceSet:
    sentences: tuple[Sentence, ...]

    def __len__(self) -> int:
        return len(self.sentences)

    def texts(self) -> list[str]:
        return [s.text for s in self.sentences]


@dataclass(frozen=True)
class PseudoExplanation:
    sentence: str
    index: int
    score: float


# Abbreviations that must not end a sentence.
_ABBREVIATIONS = ("Art.", "art.", "para.", "Para.", "No.", "no.")

# A terminator followed by whitespace and an uppercase letter, digit or
# opening paren opens a new sentence.
_BOUNDARY = re.compile(r"[.?!;](?=\s+[A-Z0-9(])")
# A statute paragraph marker "(n)" at the start of a line opens a new
# sentence even without a preceding terminator.
_PARAGRAPH = re.compile(r"\n\s*(?=\(\d+\)\s)")


def split_sentences(text: str) -> SentenceSet:
    """Deterministic rule-based segmentation with statute-aware rules.

    Texts with no admissible boundary come back as a single sentence.
    """
    if not text.strip():
        raise ExplainError("cannot split empty text")

    cut_points: set[int] = set()
    for m in _BOUNDARY.finditer(text):
        end = m.end()  # position just after the terminator
        if any(text[:end].endswith(abbr) for abbr in _ABBREVIATIONS):
            continue
        cut_points.add(end)
    for m in _PARAGRAPH.finditer(text):
        cut_points.add(m.end())

    starts = [0] + sorted(cut_points)
    sentences: list[Sentence] = []
    for i, start in enumerate(starts):
        end = starts[i + 1] if i + 1 < len(starts) else len(text)
        chunk = text[start:end]
        stripped = chunk.strip()
        if not stripped:
            continue
        offset = start + (len(chunk) - len(chunk.lstrip()))
        sentences.append(Sentence(index=len(sentences), text=stripped, offset=offset))
    return SentenceSet(sentences=tuple(sentences))


class EmbeddingBackend(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


class HashedBagOfWords:
    """Sparse lexical embeddings: lowercase word tokens hashed into a
    fixed-dimension space, term-frequency weighted, L2-normalized."""

    _TOKEN = re.compile(r"\w+")

    def __init__(self, dimension: int = 4096):
        self.dimension = dimension

    def _slot(self, token: str) -> int:
        digest = hashlib.sha1(token.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big") % self.dimension

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise ExplainError("cannot embed empty text")
        vec = np.zeros(self.dimension, dtype=np.float64)
        for token in self._TOKEN.findall(text.lower()):
            vec[self._slot(token)] += 1.0
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec


def embed(text: str, backend: EmbeddingBackend) -> np.ndarray:
    vec = np.asarray(backend.embed(text), dtype=np.float64)
    if not np.all(np.isfinite(vec)):
        raise ExplainError("embedding contains non-finite components")
    return vec


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """dot(u, v) / (|u| * |v|); requires equal dimensions, nonzero vectors."""
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.shape != b.shape:
        raise ExplainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ExplainError("cosine undefined for zero vectors")
    value = float(np.dot(a, b) / (na * nb))
    return max(-1.0, min(1.0, value))


# Score differences below this are treated as exact ties (index wins).
_TIE_EPS = 1e-12


def select_pseudo_explanation(
    premise: str,
    hypothesis: str,
    backend: EmbeddingBackend | None = None,
) -> PseudoExplanation:
    """Return the premise sentence most similar to the hypothesis.

    Ties are broken toward the lowest sentence index.
    """
    if backend is None:
        backend = HashedBagOfWords()
    sentences = split_sentences(premise)
    target = embed(hypothesis, backend)

    best: PseudoExplanation | None = None
    for sentence in sentences.sentences:
        try:
            score = cosine(embed(sentence.text, backend), target)
        except ExplainError:
            score = 0.0  # no shared mass with anything; neutral
        if best is None or score > best.score + _TIE_EPS:
            best = PseudoExplanation(
                sentence=sentence.text, index=sentence.index, score=score
            )
    assert best is not None
    return best
