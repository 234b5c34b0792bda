"""Tokenization and per-record document construction."""

from __future__ import annotations

import pytest

from collabel.errors import EmptyDocument
from collabel.records import ThesisRecord
from collabel.text import build_document, load_stopwords, normalize_title, tokenize


def test_tokenize_strips_punctuation_and_stopwords():
    assert tokenize("Deep Learning, for Robots!", frozenset({"for"})) == [
        "deep",
        "learning",
        "robots",
    ]


def test_tokenize_empty_string():
    assert tokenize("") == []


def test_tokenize_stopwords_case_insensitive():
    assert tokenize("The THE the", frozenset({"the"})) == []


def test_tokenize_splits_on_every_non_alnum():
    assert tokenize("state-of-the-art (2024)") == ["state", "of", "the", "art", "2024"]


def test_tokenize_keeps_digits():
    assert tokenize("5G networks") == ["5g", "networks"]


def test_normalize_title_is_tokenize():
    stop = frozenset({"a"})
    assert normalize_title("A Graph", stop) == tokenize("A Graph", stop)


def test_load_stopwords_packaged(stopwords):
    assert "the" in stopwords
    assert "of" in stopwords
    assert all(w == w.lower() for w in stopwords)
    assert len(stopwords) > 100


def test_load_stopwords_custom_file(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("Foo\n\nbar\n", encoding="utf-8")
    assert load_stopwords(path) == frozenset({"foo", "bar"})


def test_build_document_concatenation_no_stemming():
    rec = ThesisRecord(id="t1", title="Graph Mining", keywords=("graphs", "mining"))
    doc = build_document(rec)
    assert doc.tokens == ("graph", "mining", "graphs", "mining")
    assert doc.record_id == "t1"


def test_build_document_title_terms_separate_keywords_intact(stopwords):
    rec = ThesisRecord(
        id="t1",
        title="Deep Learning for Mobile Robots",
        keywords=("deep learning", "mobile robots"),
    )
    doc = build_document(rec, stopwords)
    assert doc.rendered == "deep, learning, mobile, robots, deep learning, mobile robots"
    assert doc.tokens == (
        "deep", "learning", "mobile", "robots", "deep", "learning", "mobile", "robots",
    )


def test_build_document_all_stopwords_raises():
    rec = ThesisRecord(id="t9", title="The And Of", keywords=())
    with pytest.raises(EmptyDocument) as exc:
        build_document(rec, frozenset({"the", "and", "of"}))
    assert exc.value.record_id == "t9"


def test_build_document_empty_keyword_segments_dropped(stopwords):
    rec = ThesisRecord(id="t1", title="Graphs", keywords=("of the", "mining"))
    doc = build_document(rec, stopwords)
    assert doc.rendered == "graphs, mining"


def test_build_document_pure():
    rec = ThesisRecord(id="t1", title="Graph Mining", keywords=("spectra",))
    assert build_document(rec) == build_document(rec)


def test_rendered_round_trips_to_tokens(stopwords):
    # hand-picked records with multi-word keywords, digits, punctuation
    records = [
        ThesisRecord(id="a", title="Quantum Wells!", keywords=("band gaps",)),
        ThesisRecord(id="b", title="Auction Design", keywords=("market design", "ads")),
        ThesisRecord(id="c", title="5G Beamforming", keywords=()),
        ThesisRecord(id="d", title="Art, after 1990", keywords=("video art",)),
        ThesisRecord(id="e", title="On Stopwords", keywords=("the of", "grammar")),
    ]
    for rec in records:
        doc = build_document(rec, stopwords)
        resplit = tuple(tok for seg in doc.rendered.split(", ") for tok in seg.split(" "))
        assert resplit == doc.tokens


def test_hand_tokenization_of_fixture_records(stopwords):
    # independent hand tokenization of five records
    cases = [
        (ThesisRecord(id="1", title="Serial Fiction and the Victorian Reading Public"),
         ("serial", "fiction", "victorian", "reading", "public")),
        (ThesisRecord(id="2", title="Dark Matter Constraints from Stellar Streams"),
         ("dark", "matter", "constraints", "stellar", "streams")),
        (ThesisRecord(id="3", title="Low-Temperature Ammonia Synthesis", keywords=("catalysis",)),
         ("low", "temperature", "ammonia", "synthesis", "catalysis")),
        (ThesisRecord(id="4", title="Pricing with Strategic Consumers"),
         ("pricing", "strategic", "consumers")),
        (ThesisRecord(id="5", title="A Study of Microtonal Counterpoint"),
         ("study", "microtonal", "counterpoint")),
    ]
    for rec, expected in cases:
        assert build_document(rec, stopwords).tokens == expected


def test_token_invariants_over_demo_corpus(stopwords, demo_records_path):
    from collabel.records import load_dataset

    for rec in load_dataset(demo_records_path):
        doc = build_document(rec, stopwords)
        for tok in doc.tokens:
            assert tok, "empty token"
            assert tok == tok.lower()
            assert all(ch.isalnum() for ch in tok)
            assert tok not in stopwords
