from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from lex_entail.corpus import EntailmentCase, Exemplar, ExemplarBank, GoldLabel
from lex_entail.prompt import (
    ANSWER_TRIGGER,
    APPROACH_EXPANSIONS,
    COT_TRIGGER,
    TRUE_OR_FALSE,
    LayoutSpec,
    LegalApproach,
    PromptError,
    RenderedPrompt,
    Strategy,
    render_cot_stage1,
    render_cot_stage2,
    render_explain_request,
    render_fs,
    render_lr,
    render_zs,
    zs_prompt_text,
)

GOLDEN_DIR = Path(__file__).parent / "goldens"

GOLDEN_CASE = EntailmentCase(
    id="G-1",
    premise=(
        "Article 1 A person must act in good faith.\n"
        "(2) No abuse of rights is permitted."
    ),
    hypothesis="A person may abuse rights when acting in good faith.",
    label=GoldLabel.NO,
)

GOLDEN_BANK = ExemplarBank(
    exemplars=tuple(
        Exemplar(
            question=f"Golden exemplar question {i}.",
            answer=GoldLabel.YES if i % 2 == 0 else GoldLabel.NO,
        )
        for i in range(8)
    )
)


class TestZsPromptText:
    def test_prompt1(self):
        assert zs_prompt_text(1) == (
            "Please determine if the hypothesis is True or False based on the "
            "given premise."
        )

    def test_prompt2(self):
        assert zs_prompt_text(2) == (
            "Please determine if the following hypothesis is True or False based "
            "on the given premise."
        )

    def test_prompt3(self):
        assert zs_prompt_text(3) == (
            "Please determine if the following hypothesis is True or False based "
            "on the Japanese civil code statutes."
        )

    def test_out_of_range(self):
        for bad in (0, 4, -1):
            with pytest.raises(PromptError):
                zs_prompt_text(bad)


class TestRenderZs:
    def test_block_order(self, tiny_case):
        text = render_zs(tiny_case, 2).text
        i_prompt = text.index(zs_prompt_text(2))
        i_premise = text.index("P.")
        i_hyp = text.index("H.", i_premise + 1)
        assert i_prompt < i_premise < i_hyp
        assert text.endswith(TRUE_OR_FALSE)

    def test_default_layout_joins(self, tiny_case):
        text = render_zs(tiny_case, 2).text
        assert text == (
            f"{zs_prompt_text(2)}\nPremise: P.\nHypothesis: H.\n{TRUE_OR_FALSE}"
        )

    def test_single_trailing_question_even_with_collision(self):
        case = EntailmentCase(
            id="X",
            premise=f"The form asks {TRUE_OR_FALSE}",
            hypothesis="H.",
            label=GoldLabel.YES,
        )
        text = render_zs(case, 2).text
        # brute-force substring scan: one occurrence inside the premise,
        # exactly one appended at the end
        count = sum(
            1
            for i in range(len(text))
            if text.startswith(TRUE_OR_FALSE, i)
        )
        assert count == 2
        assert text.endswith(TRUE_OR_FALSE)


class TestRenderFs:
    def test_one_shot_block_precedes_target(self, tiny_case):
        bank = ExemplarBank(exemplars=(Exemplar("Q1", GoldLabel.YES),))
        text = render_fs(tiny_case, bank, 1).text
        assert text.index("Q1") < text.index("True") < text.index("P.")
        assert "Answer: True" in text

    def test_zero_shots_degenerates_to_zs(self, tiny_case, bank8):
        assert render_fs(tiny_case, bank8, 0).text == render_zs(tiny_case).text

    def test_three_of_eight_expected_string(self, tiny_case, bank8):
        # independently concatenated expectation
        layout = LayoutSpec()
        expected_blocks = []
        for e in bank8.exemplars[:3]:
            word = "True" if e.answer is GoldLabel.YES else "False"
            expected_blocks.append(f"Hypothesis: {e.question}\nAnswer: {word}")
        expected = "\n".join(expected_blocks) + "\n" + render_zs(tiny_case).text
        assert render_fs(tiny_case, bank8, 3, layout=layout).text == expected

    def test_answer_line_count_matches_shots(self, tiny_case, bank8):
        for shots in range(9):
            text = render_fs(tiny_case, bank8, shots).text
            assert text.count("Answer: ") == shots

    def test_shots_exceed_bank(self, tiny_case, bank8):
        with pytest.raises(PromptError, match="exceeds"):
            render_fs(tiny_case, bank8, 9)

    def test_leakage_rejected(self, tiny_case):
        bank = ExemplarBank(exemplars=(Exemplar("H.", GoldLabel.YES),))
        with pytest.raises(PromptError, match="hypothesis"):
            render_fs(tiny_case, bank, 1)


class TestCot:
    def test_stage1_ends_with_trigger(self, tiny_case):
        text = render_cot_stage1(tiny_case).text
        assert text.endswith(COT_TRIGGER)
        assert TRUE_OR_FALSE not in text

    def test_stage1_matches_zs_with_swapped_tail(self, tiny_case):
        zs = render_zs(tiny_case).text
        assert render_cot_stage1(tiny_case).text == zs[: -len(TRUE_OR_FALSE)] + COT_TRIGGER

    def test_stage1_deterministic(self, tiny_case):
        assert render_cot_stage1(tiny_case).text == render_cot_stage1(tiny_case).text

    def test_stage_fields(self, tiny_case):
        s1 = render_cot_stage1(tiny_case)
        assert s1.stage == "cot_stage1"
        s2 = render_cot_stage2(s1, "Reasoning X.")
        assert s2.stage == "cot_stage2"

    def test_stage2_composition(self, tiny_case):
        s1 = render_cot_stage1(tiny_case)
        s2 = render_cot_stage2(s1, "Reasoning X.")
        assert s2.text.startswith(s1.text)  # prefix property
        assert s2.text.index("Reasoning X.") < s2.text.index(ANSWER_TRIGGER)
        assert s2.text.endswith(ANSWER_TRIGGER)

    def test_empty_reasoning_rejected(self, tiny_case):
        with pytest.raises(PromptError, match="reasoning"):
            render_cot_stage2(render_cot_stage1(tiny_case), "")

    def test_wrong_stage_rejected(self, tiny_case):
        single = render_zs(tiny_case)
        with pytest.raises(PromptError, match="stage"):
            render_cot_stage2(single, "Reasoning X.")


class TestRenderLr:
    def test_irac_expansion_present(self, tiny_case):
        text = render_lr(tiny_case, LegalApproach.IRAC).text
        assert "Issue, rule, application, conclusion" in text

    def test_trrac_expansion_present(self, tiny_case):
        text = render_lr(tiny_case, LegalApproach.TRRAC).text
        assert "Thesis, rule, rule, application, conclusion" in text

    def test_block_order(self, tiny_case):
        text = render_lr(tiny_case, LegalApproach.CLEO).text
        i_instr = text.index("Please analyze if the hypothesis is True or False")
        i_app = text.index("CLEO")
        i_prem = text.index("P.")
        i_hyp = text.index("H.", i_prem + 1)
        assert i_instr < i_app < i_prem < i_hyp
        assert text.endswith(TRUE_OR_FALSE)

    def test_unknown_acronym(self, tiny_case):
        with pytest.raises(PromptError, match="XYZ"):
            render_lr(tiny_case, "XYZ")

    def test_all_nine_expansions(self):
        assert {a.value for a in LegalApproach} == {
            "TRRAC", "CLEO", "ILAC", "IRAACP", "IRREAC", "IGPAC", "IPAAC",
            "IRRAC", "IRAC",
        }
        assert APPROACH_EXPANSIONS[LegalApproach.IRREAC] == (
            "Issue, rule, rule, application, conclusion"
        )
        assert APPROACH_EXPANSIONS[LegalApproach.IRRAC] == (
            "Issue, rule, reasoning, application, conclusion"
        )


class TestExplainRequest:
    def test_yes_label(self, tiny_case):
        text = render_explain_request(tiny_case, GoldLabel.YES).text
        assert text.startswith(
            "Please explain why the following hypothesis is True based on the "
            "given premise."
        )

    def test_no_label(self, tiny_case):
        text = render_explain_request(tiny_case, GoldLabel.NO).text
        assert "is False based on" in text

    def test_case_texts_follow_instruction(self, tiny_case):
        text = render_explain_request(tiny_case, GoldLabel.YES).text
        assert text.index("given premise.") < text.index("P.") < text.index("H.", text.index("P.") + 1)


@given(
    premise=st.text(min_size=1).filter(lambda s: s.strip()),
    hypothesis=st.text(min_size=1).filter(lambda s: s.strip()),
    prompt_id=st.sampled_from([1, 2, 3]),
)
def test_substring_preservation(premise, hypothesis, prompt_id):
    case = EntailmentCase(id="X", premise=premise, hypothesis=hypothesis, label=GoldLabel.YES)
    for rendered in (
        render_zs(case, prompt_id),
        render_cot_stage1(case, prompt_id),
        render_lr(case, LegalApproach.IRAC),
        render_explain_request(case, GoldLabel.NO),
    ):
        assert premise in rendered.text
        assert hypothesis in rendered.text


def test_strategy_validation():
    with pytest.raises(PromptError):
        Strategy(kind="nope")
    with pytest.raises(PromptError):
        Strategy(kind="zs", prompt_id=7)
    with pytest.raises(PromptError):
        Strategy(kind="lr")
    assert Strategy(kind="fs", shots=3).describe() == "fs-3shot-prompt2"


def test_rendered_prompt_invariants(tiny_case):
    with pytest.raises(PromptError):
        RenderedPrompt(text="", strategy="zs", case_id="X")
    with pytest.raises(PromptError):
        RenderedPrompt(text="t", strategy="zs", case_id="X", stage="bogus")


GOLDEN_RENDERS = {
    "zs_prompt1": lambda: render_zs(GOLDEN_CASE, 1),
    "zs_prompt2": lambda: render_zs(GOLDEN_CASE, 2),
    "zs_prompt3": lambda: render_zs(GOLDEN_CASE, 3),
    "fs_0shot": lambda: render_fs(GOLDEN_CASE, GOLDEN_BANK, 0),
    "fs_1shot": lambda: render_fs(GOLDEN_CASE, GOLDEN_BANK, 1),
    "fs_3shot": lambda: render_fs(GOLDEN_CASE, GOLDEN_BANK, 3),
    "fs_8shot": lambda: render_fs(GOLDEN_CASE, GOLDEN_BANK, 8),
    "cot_stage1": lambda: render_cot_stage1(GOLDEN_CASE),
    "cot_stage2": lambda: render_cot_stage2(
        render_cot_stage1(GOLDEN_CASE), "The statute forbids abuse of rights."
    ),
    "explain_request": lambda: render_explain_request(GOLDEN_CASE, GOLDEN_CASE.label),
    **{
        f"lr_{a.value}": (lambda a=a: render_lr(GOLDEN_CASE, a))
        for a in LegalApproach
    },
}


@pytest.mark.parametrize("name", sorted(GOLDEN_RENDERS))
def test_golden(name):
    expected = (GOLDEN_DIR / f"{name}.txt").read_text(encoding="utf-8")
    assert GOLDEN_RENDERS[name]().text == expected
