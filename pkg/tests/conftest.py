from __future__ import annotations

import pytest

from lex_entail.corpus import (
    EntailmentCase,
    Exemplar,
    ExemplarBank,
    GoldLabel,
    parse_corpus,
)

ARTICLE_18 = (
    "Article 18 (1) If the grounds prescribed in the main clause of Article 15, "
    "paragraph (1) cease to exist, the family court must rescind the decision for "
    "commencement of assistance at the request of the person in question, that "
    "person's spouse, that person's relative within the fourth degree of kinship, "
    "the guardian of a minor, the supervisor of a minor's guardian, the assistant, "
    "the assistant's supervisor, or a public prosecutor.\n"
    "(2) At the request of a person as prescribed in the preceding paragraph, the "
    "family court may rescind all or part of the decision referred to in paragraph "
    "(1) of the preceding Article."
)


def make_corpus_xml(cases: list[tuple[str, str, str, str]]) -> str:
    """cases: list of (id, label, premise, hypothesis)."""
    pairs = "\n".join(
        f'<pair id="{cid}" label="{label}"><t1>{t1}</t1><t2>{t2}</t2></pair>'
        for cid, label, t1, t2 in cases
    )
    return f"<dataset>\n{pairs}\n</dataset>"


@pytest.fixture
def sample_case() -> EntailmentCase:
    return EntailmentCase(
        id="R02-1-U",
        premise=ARTICLE_18,
        hypothesis=(
            "If the grounds of commencement of assistance cease to exist, the "
            "family court may rescind the decision for commencement of assistance "
            "without any party's request."
        ),
        label=GoldLabel.NO,
    )


@pytest.fixture
def tiny_case() -> EntailmentCase:
    return EntailmentCase(id="X", premise="P.", hypothesis="H.", label=GoldLabel.YES)


@pytest.fixture
def bank8() -> ExemplarBank:
    return ExemplarBank(
        exemplars=tuple(
            Exemplar(
                question=f"Exemplar question {i}?",
                answer=GoldLabel.YES if i % 2 == 0 else GoldLabel.NO,
            )
            for i in range(8)
        )
    )


@pytest.fixture
def small_corpus():
    xml = make_corpus_xml(
        [
            ("C1", "Y", "Premise one.", "Hypothesis one."),
            ("C2", "N", "Premise two.", "Hypothesis two."),
            ("C3", "Y", "Premise three.", "Hypothesis three."),
            ("C4", "Y", "Premise four.", "Hypothesis four."),
        ]
    )
    return parse_corpus(xml, "small")
