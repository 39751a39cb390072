import io

import pytest
from hypothesis import given, strategies as st

from lex_entail.corpus import (
    Corpus,
    CorpusError,
    EntailmentCase,
    GoldLabel,
    load_exemplars,
    normalize_answer,
    parse_corpus,
    serialize_corpus,
)
from conftest import make_corpus_xml


def test_single_pair():
    corpus = parse_corpus(
        '<d><pair id="X" label="Y"><t1>A</t1><t2>B</t2></pair></d>', "t"
    )
    assert len(corpus) == 1
    case = corpus.cases[0]
    assert (case.id, case.premise, case.hypothesis) == ("X", "A", "B")
    assert case.label is GoldLabel.YES


def test_duplicate_id_names_offender():
    xml = make_corpus_xml([("X", "Y", "A", "B"), ("X", "N", "C", "D")])
    with pytest.raises(CorpusError, match="X"):
        parse_corpus(xml, "t")


def test_label_outside_yn():
    xml = '<d><pair id="X" label="Maybe"><t1>A</t1><t2>B</t2></pair></d>'
    with pytest.raises(CorpusError, match="label"):
        parse_corpus(xml, "t")


def test_missing_fields():
    with pytest.raises(CorpusError, match="id"):
        parse_corpus('<d><pair label="Y"><t1>A</t1><t2>B</t2></pair></d>', "t")
    with pytest.raises(CorpusError, match="t1"):
        parse_corpus('<d><pair id="X" label="Y"><t2>B</t2></pair></d>', "t")
    with pytest.raises(CorpusError, match="t2"):
        parse_corpus('<d><pair id="X" label="Y"><t1>A</t1></pair></d>', "t")


def test_malformed_xml():
    with pytest.raises(CorpusError, match="malformed"):
        parse_corpus("<d><pair id=", "t")


def test_whitespace_trimmed_interior_preserved():
    xml = '<d><pair id="X" label="N"><t1>  A  B\nC  </t1><t2> H </t2></pair></d>'
    case = parse_corpus(xml, "t").cases[0]
    assert case.premise == "A  B\nC"
    assert case.hypothesis == "H"


def test_non_utf8_rejected():
    with pytest.raises(CorpusError, match="UTF-8"):
        parse_corpus("premise é".encode("latin-1"), "t")


def test_bytes_and_stream_inputs_equal():
    xml = make_corpus_xml([("X", "Y", "A", "B")]).encode("utf-8")
    assert parse_corpus(xml, "t") == parse_corpus(io.BytesIO(xml), "t")


def test_deterministic():
    xml = make_corpus_xml([("A", "Y", "P", "H"), ("B", "N", "P2", "H2")])
    assert parse_corpus(xml, "t") == parse_corpus(xml, "t")
    assert parse_corpus(xml, "t").digest() == parse_corpus(xml, "t").digest()


def test_document_order_preserved():
    ids = [f"C{i}" for i in range(10)]
    xml = make_corpus_xml([(i, "Y", "P", "H") for i in ids])
    assert [c.id for c in parse_corpus(xml, "t")] == ids


@given(
    st.lists(
        st.tuples(
            st.text(
                alphabet=st.characters(whitelist_categories=("L", "N")), min_size=1
            ),
            st.sampled_from(["Y", "N"]),
            # XML 1.0 cannot represent control characters
            st.text(
                alphabet=st.characters(blacklist_categories=("Cc", "Cs")), min_size=1
            ).filter(lambda s: s.strip()),
            st.text(
                alphabet=st.characters(blacklist_categories=("Cc", "Cs")), min_size=1
            ).filter(lambda s: s.strip()),
        ),
        min_size=1,
        max_size=6,
        unique_by=lambda t: t[0],
    )
)
def test_round_trip(rows):
    cases = tuple(
        EntailmentCase(
            id=cid,
            premise=t1.strip(),
            hypothesis=t2.strip(),
            label=GoldLabel.YES if lab == "Y" else GoldLabel.NO,
        )
        for cid, lab, t1, t2 in rows
    )
    corpus = Corpus(name="t", cases=cases)
    assert parse_corpus(serialize_corpus(corpus), "t") == corpus


def test_case_invariants_enforced():
    with pytest.raises(CorpusError):
        EntailmentCase(id="", premise="P", hypothesis="H", label=GoldLabel.YES)
    with pytest.raises(CorpusError):
        EntailmentCase(id="X", premise="", hypothesis="H", label=GoldLabel.YES)
    with pytest.raises(CorpusError):
        EntailmentCase(id="X", premise="P", hypothesis="", label=GoldLabel.YES)


def test_load_exemplars_order_and_size():
    records = [{"question": f"Q{i}", "answer": "Y"} for i in range(8)]
    import json

    bank = load_exemplars(json.dumps(records))
    assert len(bank) == 8
    assert [e.question for e in bank] == [f"Q{i}" for i in range(8)]


def test_exemplar_answer_synonyms():
    import json

    bank = load_exemplars(
        json.dumps(
            [
                {"question": "Q1", "answer": "True"},
                {"question": "Q2", "answer": "FALSE"},
                {"question": "Q3", "answer": "yes", "commentary": "c"},
            ]
        )
    )
    assert bank.exemplars[0].answer is GoldLabel.YES
    assert bank.exemplars[1].answer is GoldLabel.NO
    assert bank.exemplars[2].answer is GoldLabel.YES
    assert bank.exemplars[2].commentary == "c"


def test_empty_exemplar_bank():
    with pytest.raises(CorpusError, match="empty exemplar bank"):
        load_exemplars("[]")


def test_exemplar_missing_fields():
    with pytest.raises(CorpusError, match="question"):
        load_exemplars('[{"answer": "Y"}]')
    with pytest.raises(CorpusError, match="answer"):
        load_exemplars('[{"question": "Q"}]')


def test_normalize_answer_rejects_unknown():
    with pytest.raises(CorpusError):
        normalize_answer("maybe")
