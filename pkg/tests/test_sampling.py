"""Batch sampling: per-college draws, shuffling, persistence."""

from __future__ import annotations

import collections
import json

import pytest

from collabel.errors import EmptyCollege, ParseError
from collabel.llm.sampling import draw_samples, load_batches, save_batches
from collabel.records import CollegeMapping, assign_colleges, load_dataset

from conftest import labeled_dataset


@pytest.fixture(scope="module")
def demo_labeled(demo_records_path, demo_mapping):
    return assign_colleges(load_dataset(demo_records_path), demo_mapping)


@pytest.fixture(scope="module")
def demo_batches(demo_labeled, demo_mapping, stopwords):
    return draw_samples(demo_labeled, demo_mapping, per_college=10, n_samples=5, seed=11,
                        stopwords=stopwords)


def test_batch_shape(demo_batches, demo_mapping):
    assert [b.sample_id for b in demo_batches] == [1, 2, 3, 4, 5]
    for batch in demo_batches:
        assert len(batch) == 70
        counts = collections.Counter(doc.true_label for doc in batch.documents)
        assert counts == {college: 10 for college in demo_mapping.colleges}


def test_batch_order_is_shuffled(demo_batches, demo_mapping):
    # documents are drawn college by college, then permuted; the raw
    # college-block ordering should not survive the shuffle
    for batch in demo_batches:
        labels = [doc.true_label for doc in batch.documents]
        blocked = sorted(labels, key=list(demo_mapping.colleges).index)
        assert labels != blocked


def test_documents_carry_rendered_text(demo_batches):
    for batch in demo_batches:
        for doc in batch.documents:
            assert doc.record_id
            assert doc.text.rendered
            # re-splitting the rendered line reproduces the token stream
            resplit = tuple(
                tok for seg in doc.text.rendered.split(", ") for tok in seg.split(" ")
            )
            assert resplit == doc.text.tokens


def test_sampling_deterministic(demo_labeled, demo_mapping, stopwords):
    a = draw_samples(demo_labeled, demo_mapping, per_college=3, n_samples=2, seed=5,
                     stopwords=stopwords)
    b = draw_samples(demo_labeled, demo_mapping, per_college=3, n_samples=2, seed=5,
                     stopwords=stopwords)
    assert a == b
    c = draw_samples(demo_labeled, demo_mapping, per_college=3, n_samples=2, seed=6,
                     stopwords=stopwords)
    assert a != c


def test_singleton_college_repeats():
    dataset = labeled_dataset({"Arts": 1, "Science": 3})
    mapping = CollegeMapping({"Arts": ("Painting",), "Science": ("Physics",)})
    batches = draw_samples(dataset, mapping, per_college=4, n_samples=1, seed=0)
    arts_ids = {d.record_id for d in batches[0].documents if d.true_label == "Arts"}
    assert arts_ids == {"arts-0"}
    assert sum(d.true_label == "Arts" for d in batches[0].documents) == 4


def test_college_without_records_rejected():
    dataset = labeled_dataset({"Arts": 2})
    mapping = CollegeMapping({"Arts": ("Painting",), "Science": ("Physics",)})
    with pytest.raises(EmptyCollege) as excinfo:
        draw_samples(dataset, mapping, per_college=1, n_samples=1, seed=0)
    assert "Science" in str(excinfo.value)


def test_draws_are_uniform_with_replacement():
    dataset = labeled_dataset({"Arts": 4})
    mapping = CollegeMapping({"Arts": ("Painting",)})
    batches = draw_samples(dataset, mapping, per_college=10, n_samples=1000, seed=123)
    counts = collections.Counter(
        doc.record_id for batch in batches for doc in batch.documents
    )
    total = sum(counts.values())
    assert total == 10_000
    # each of 4 records expects 2500 draws; 3 sigma for Binomial(10000, 1/4) ~ 130
    for record_id in ("arts-0", "arts-1", "arts-2", "arts-3"):
        assert abs(counts[record_id] - 2500) < 130


def test_save_load_round_trip(tmp_path, demo_batches):
    path = tmp_path / "batches.json"
    save_batches(demo_batches, path, seed=11)
    loaded = load_batches(path)
    assert len(loaded) == len(demo_batches)
    for orig, back in zip(demo_batches, loaded):
        assert back.sample_id == orig.sample_id
        for d_orig, d_back in zip(orig.documents, back.documents):
            assert d_back.record_id == d_orig.record_id
            assert d_back.true_label == d_orig.true_label
            assert d_back.text.rendered == d_orig.text.rendered
    payload = json.loads(path.read_text())
    assert payload["seed"] == 11


def test_load_recovers_tokens_exactly(tmp_path):
    dataset = labeled_dataset({"Arts": 2})
    mapping = CollegeMapping({"Arts": ("Painting",)})
    batches = draw_samples(dataset, mapping, per_college=2, n_samples=1, seed=0)
    path = tmp_path / "batches.json"
    save_batches(batches, path)
    loaded = load_batches(path)
    for d_orig, d_back in zip(batches[0].documents, loaded[0].documents):
        assert d_back.text.rendered == d_orig.text.rendered
        assert d_back.text.tokens == d_orig.text.tokens


def test_load_rejects_foreign_document(tmp_path):
    path = tmp_path / "other.json"
    path.write_text(json.dumps({"format": "something-else", "version": 1, "batches": []}))
    with pytest.raises(ParseError):
        load_batches(path)
    path.write_text(json.dumps({"format": "collabel-batches", "version": 99, "batches": []}))
    with pytest.raises(ParseError):
        load_batches(path)
