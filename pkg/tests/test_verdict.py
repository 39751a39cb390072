import pytest
from hypothesis import given, strategies as st

from lex_entail.corpus import GoldLabel
from lex_entail.verdict import (
    ExtractionResult,
    ExtractionStatus,
    Verdict,
    extract_verdict,
    label_to_verdict,
    verdict_to_label,
)

# Real answer-and-explanation completions produced by a model under legal
# reasoning prompting, with the verdict each must extract.
APPENDIX_FIXTURES = {
    "R02-24-O": (
        "False. \nThe buyer may not make a claim for damages to the seller in "
        "good faith without giving a notice within a year from the time when the "
        "seller knows the fact that the rights belong to others, but the buyer "
        "may demand cure of the non-conformity of performance, demand a "
        "reduction of the price, claim compensation for loss or damage, or "
        "cancel the contract.",
        Verdict.FALSE,
    ),
    "R02-27-O": (
        "False. \nThe rule states that a partner may not seek the division of "
        "the partnership property before liquidation. \nThe application of the "
        "rule is that the consent of the majority of partners does not exist. "
        "\nTherefore, the conclusion is that a partner may not seek the division "
        "of the partnership property before liquidation.",
        Verdict.FALSE,
    ),
    "R02-12-A": (
        "False. \nThe mortgage is not extinguished by prescription unless the "
        "claim it secures is extinguished.",
        Verdict.FALSE,
    ),
    "R02-1-A": (
        "False. \nThe family court may only decide to commence an assistance in "
        "respect of a person whose capacity to appreciate their own situation is "
        "inadequate due to a mental disorder, not a person whose capacity to "
        "appreciate their own situation is extremely inadequate due to a mental "
        "disorder.",
        Verdict.FALSE,
    ),
    "R02-4-A": (
        "False. \nA is not liable for the performance of the contract or "
        "compensation for loss or damage, as chosen by A.",
        Verdict.FALSE,
    ),
    "R02-8-E": (
        "The hypothesis is true. \nA cannot obtain the ownership of the jewelry "
        "by good faith acquisition because B did not give A permission to take "
        "the jewelry and A did not have knowledge that the jewelry belonged to "
        "B.",
        Verdict.TRUE,
    ),
    "R02-25-E": (
        "False. \nThe lessor may assert the cancellation by agreement of the "
        "lease against the sublessee if the lessor has a right to cancel due to "
        "non-performance on the part of the lessee at the time of the "
        "cancellation.",
        Verdict.FALSE,
    ),
    "R02-1-U": (
        "False. The family court may rescind the decision for commencement of "
        "assistance only at the request of the person in question, that person's "
        "spouse, that person's relative within the fourth degree of kinship, the "
        "guardian of a minor, the supervisor of a minor's guardian, the "
        "assistant, the assistant's supervisor, or a public prosecutor.",
        Verdict.FALSE,
    ),
    "R02-26-I": (
        "False. \nThe provisions of Article 656 do apply mutatis mutandis to "
        "entrustments of business that do not constitute juridical acts.",
        Verdict.FALSE,
    ),
}


@pytest.mark.parametrize("fixture_id", sorted(APPENDIX_FIXTURES))
def test_appendix_fixture(fixture_id):
    completion, expected = APPENDIX_FIXTURES[fixture_id]
    result = extract_verdict(completion)
    assert result.status is ExtractionStatus.CLEAR
    assert result.verdict is expected


def test_answer_trigger_echo():
    result = extract_verdict("Therefore, the hypothesis (True or False) is True")
    assert result.verdict is Verdict.TRUE
    assert result.status is ExtractionStatus.CLEAR


def test_no_cue_absent():
    result = extract_verdict("It depends on the circumstances.")
    assert result.status is ExtractionStatus.ABSENT
    assert result.verdict is None
    assert result.matched_span is None


def test_leading_token_with_punctuation():
    for text, expected in [
        ('"True." the model said, before arguing it was false.', Verdict.TRUE),
        ("  false, because the statute says otherwise. True story.", Verdict.FALSE),
    ]:
        result = extract_verdict(text)
        assert result.verdict is expected


def test_prefix_dominance_over_later_text():
    result = extract_verdict("True. However the hypothesis is false on reflection.")
    assert result.verdict is Verdict.TRUE


def test_phrase_rule():
    assert extract_verdict("I believe the hypothesis is False here.").verdict is Verdict.FALSE
    assert (
        extract_verdict("and so the hypothesis (True or False) is false")
        .verdict
        is Verdict.FALSE
    )


def test_conflicting_phrases_ambiguous():
    result = extract_verdict(
        "Perhaps the hypothesis is true; yet arguably the hypothesis is false."
    )
    assert result.status is ExtractionStatus.AMBIGUOUS
    assert result.verdict is None


def test_yes_no_tokens():
    assert extract_verdict("The answer is Yes.").verdict is Verdict.TRUE
    assert extract_verdict("The answer: no.").verdict is Verdict.FALSE


def test_conflicting_yes_no_ambiguous():
    result = extract_verdict("Some say yes, others say no.")
    assert result.status is ExtractionStatus.AMBIGUOUS


def test_last_token_fallback():
    result = extract_verdict("After weighing everything, I would answer False")
    assert result.verdict is Verdict.FALSE


def test_matched_span_points_at_token():
    text = "The hypothesis is true."
    result = extract_verdict(text)
    offset, length = result.matched_span
    assert text[offset : offset + length].lower() == "true"


CANONICAL = {
    Verdict.TRUE: [
        "True",
        "The hypothesis is true.",
        "Therefore, the hypothesis (True or False) is True",
    ],
    Verdict.FALSE: [
        "False",
        "The hypothesis is false.",
        "Therefore, the hypothesis (True or False) is False",
    ],
}


@pytest.mark.parametrize(
    "verdict,text",
    [(v, t) for v, texts in CANONICAL.items() for t in texts],
)
def test_canonical_round_trip(verdict, text):
    assert extract_verdict(text).verdict is verdict


@given(st.text(alphabet=st.characters(min_codepoint=32, max_codepoint=126), max_size=300))
def test_case_folding_invariance(text):
    lower = extract_verdict(text.lower())
    upper = extract_verdict(text.upper())
    original = extract_verdict(text)
    assert lower.status == original.status == upper.status
    assert lower.verdict == original.verdict == upper.verdict


def test_label_mapping_bijection():
    assert verdict_to_label(Verdict.TRUE) is GoldLabel.YES
    assert verdict_to_label(Verdict.FALSE) is GoldLabel.NO
    for v in Verdict:
        assert label_to_verdict(verdict_to_label(v)) is v
    for label in GoldLabel:
        assert verdict_to_label(label_to_verdict(label)) is label


def test_extraction_result_invariants():
    with pytest.raises(ValueError):
        ExtractionResult(verdict=Verdict.TRUE, status=ExtractionStatus.ABSENT)
    with pytest.raises(ValueError):
        ExtractionResult(verdict=Verdict.TRUE, status=ExtractionStatus.CLEAR)
