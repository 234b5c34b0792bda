"""Draw the document batches submitted to chat endpoints.

Each batch holds a fixed number of documents per college, drawn
uniformly with replacement from that college's labeled records, then
shuffled so colleges are interleaved in submission order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import EmptyCollege, ParseError
from ..records import CollegeMapping, Dataset
from ..text import DocumentText, build_document

BATCHES_FORMAT = "collabel-batches"
BATCHES_VERSION = 1


@dataclass(frozen=True)
class SampledDocument:
    record_id: str
    text: DocumentText
    true_label: str


@dataclass(frozen=True)
class SampleBatch:
    """One submission unit: sample id plus documents in submission order."""

    sample_id: int
    documents: tuple[SampledDocument, ...]

    def __len__(self) -> int:
        return len(self.documents)


def draw_samples(
    dataset: Dataset,
    mapping: CollegeMapping,
    per_college: int = 10,
    n_samples: int = 5,
    seed: int = 0,
    stopwords: frozenset[str] = frozenset(),
) -> list[SampleBatch]:
    """Sample n_samples batches of per_college documents per college.

    Draws are with replacement, so a college with a single record
    contributes that record repeatedly. Every college in the mapping
    must have at least one labeled record. Deterministic given seed.
    """
    pools = dataset.by_college()
    for college in mapping.colleges:
        if not pools.get(college):
            raise EmptyCollege(college)
    rng = np.random.default_rng(seed)
    batches = []
    for sample_id in range(1, n_samples + 1):
        docs: list[SampledDocument] = []
        for college in mapping.colleges:
            pool = pools[college]
            picks = rng.integers(0, len(pool), size=per_college)
            for p in picks:
                rec = pool[int(p)]
                docs.append(
                    SampledDocument(
                        record_id=rec.id,
                        text=build_document(rec, stopwords),
                        true_label=college,
                    )
                )
        order = rng.permutation(len(docs))
        batches.append(SampleBatch(sample_id=sample_id, documents=tuple(docs[i] for i in order)))
    return batches


def save_batches(batches: list[SampleBatch], path: str | Path, seed: int | None = None) -> None:
    """Persist drawn batches as a versioned JSON document."""
    doc = {
        "format": BATCHES_FORMAT,
        "version": BATCHES_VERSION,
        "seed": seed,
        "batches": [
            {
                "sample_id": batch.sample_id,
                "documents": [
                    {
                        "record_id": doc_.record_id,
                        "rendered": doc_.text.rendered,
                        "true_label": doc_.true_label,
                    }
                    for doc_ in batch.documents
                ],
            }
            for batch in batches
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def load_batches(path: str | Path) -> list[SampleBatch]:
    """Read batches back; tokens are recovered by re-splitting the rendering."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != BATCHES_FORMAT or doc.get("version") != BATCHES_VERSION:
        raise ParseError(str(path), 1, f"not a {BATCHES_FORMAT} v{BATCHES_VERSION} document")
    batches = []
    for raw_batch in doc["batches"]:
        documents = []
        for raw_doc in raw_batch["documents"]:
            rendered = raw_doc["rendered"]
            tokens = tuple(tok for seg in rendered.split(", ") for tok in seg.split(" "))
            documents.append(
                SampledDocument(
                    record_id=raw_doc["record_id"],
                    text=DocumentText(
                        record_id=raw_doc["record_id"], tokens=tokens, rendered=rendered
                    ),
                    true_label=raw_doc["true_label"],
                )
            )
        batches.append(
            SampleBatch(sample_id=int(raw_batch["sample_id"]), documents=tuple(documents))
        )
    return batches
