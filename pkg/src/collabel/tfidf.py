"""Sparse TF-IDF features over normalized documents.

Weights are term frequency times inverse document frequency, where tf
is the within-document relative frequency and idf is the natural log of
corpus size over document frequency. No smoothing terms: vocabulary
terms always occur in at least one document, so idf is well defined.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from .errors import EmptyCorpus, UnknownTerm
from .text import DocumentText


@dataclass(frozen=True)
class Vocabulary:
    """Fitted term table: column index and document frequency per term."""

    index: dict[str, int]
    doc_frequency: tuple[int, ...]
    n_docs: int

    def __post_init__(self):
        if len(self.index) != len(self.doc_frequency):
            raise ValueError("index and doc_frequency disagree on term count")
        if sorted(self.index.values()) != list(range(len(self.index))):
            raise ValueError("column indices must be 0..V-1 with no gaps")
        for df in self.doc_frequency:
            if not 1 <= df <= self.n_docs:
                raise ValueError(f"document frequency {df} outside [1, {self.n_docs}]")

    def __len__(self) -> int:
        return len(self.index)

    @property
    def terms(self) -> tuple[str, ...]:
        """Terms ordered by column index."""
        ordered = [""] * len(self.index)
        for term, col in self.index.items():
            ordered[col] = term
        return tuple(ordered)

    def column_of(self, term: str) -> int:
        try:
            return self.index[term]
        except KeyError:
            raise UnknownTerm(term) from None


@dataclass(frozen=True)
class TfidfMatrix:
    """Feature matrix with row-aligned record ids.

    Stored entries are finite and strictly positive; structural zeros
    are never materialized. Rows whose documents contributed no known
    terms are present but empty.
    """

    record_ids: tuple[str, ...]
    matrix: scipy.sparse.csr_matrix

    def __post_init__(self):
        if self.matrix.shape[0] != len(self.record_ids):
            raise ValueError("row count does not match record id count")
        data = self.matrix.data
        if data.size and (not np.all(np.isfinite(data)) or np.any(data <= 0)):
            raise ValueError("stored weights must be finite and positive")

    @property
    def n_features(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.record_ids)


def fit(documents: list[DocumentText]) -> Vocabulary:
    """Build the vocabulary of a training corpus.

    Document frequency counts documents containing a term, not
    occurrences. Columns are assigned in sorted term order.
    """
    if not any(doc.tokens for doc in documents):
        raise EmptyCorpus()
    df_counter: Counter[str] = Counter()
    for doc in documents:
        df_counter.update(set(doc.tokens))
    terms = sorted(df_counter)
    index = {term: col for col, term in enumerate(terms)}
    doc_frequency = tuple(df_counter[term] for term in terms)
    return Vocabulary(index=index, doc_frequency=doc_frequency, n_docs=len(documents))


def term_frequency(term: str, document: DocumentText) -> float:
    """Relative frequency of the term within the document; absent term is 0."""
    if not document.tokens:
        raise ValueError(f"document {document.record_id!r} has no tokens")
    return document.tokens.count(term) / len(document.tokens)


def inverse_document_frequency(term: str, vocab: Vocabulary) -> float:
    """ln(corpus size / document frequency); 0 iff the term is in every document."""
    col = vocab.column_of(term)
    return math.log(vocab.n_docs / vocab.doc_frequency[col])


def transform(documents: list[DocumentText], vocab: Vocabulary) -> TfidfMatrix:
    """TF-IDF matrix of the documents under a fitted vocabulary.

    Terms outside the vocabulary are dropped (test-time behavior), and
    weights that come out exactly 0 are not stored.
    """
    n_terms = len(vocab)
    idf = np.array(
        [math.log(vocab.n_docs / df) for df in vocab.doc_frequency], dtype=np.float64
    )
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for doc in documents:
        counts = Counter(doc.tokens)
        total = len(doc.tokens)
        row: list[tuple[int, float]] = []
        for term, count in counts.items():
            col = vocab.index.get(term)
            if col is None:
                continue
            weight = (count / total) * idf[col]
            if weight != 0.0:
                row.append((col, weight))
        row.sort()
        indices.extend(col for col, _ in row)
        data.extend(w for _, w in row)
        indptr.append(len(indices))
    matrix = scipy.sparse.csr_matrix(
        (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int32), np.array(indptr)),
        shape=(len(documents), n_terms),
    )
    return TfidfMatrix(record_ids=tuple(d.record_id for d in documents), matrix=matrix)


# ---------------------------------------------------------------------------
# file interchange


def save_matrix(tfidf: TfidfMatrix, vocab: Vocabulary, path: str | Path) -> None:
    """Write the matrix plus sidecars.

    ``path`` gets the coordinate-format text matrix; ``path.vocab.tsv``
    the (term, index, df) table; ``path.rows.txt`` the record id per row.
    """
    path = Path(path)
    # write through a file object so scipy cannot append its own extension
    with open(path, "wb") as fh:
        scipy.io.mmwrite(fh, tfidf.matrix.tocoo(), precision=17, symmetry="general")
    with open(_vocab_sidecar(path), "w", encoding="utf-8") as fh:
        fh.write(f"# n_docs={vocab.n_docs}\n")
        for col, term in enumerate(vocab.terms):
            fh.write(f"{term}\t{col}\t{vocab.doc_frequency[col]}\n")
    with open(_rows_sidecar(path), "w", encoding="utf-8") as fh:
        for rec_id in tfidf.record_ids:
            fh.write(rec_id + "\n")


def load_matrix(path: str | Path) -> tuple[TfidfMatrix, Vocabulary]:
    path = Path(path)
    with open(path, "rb") as fh:
        matrix = scipy.sparse.csr_matrix(scipy.io.mmread(fh))
    record_ids = tuple(_rows_sidecar(path).read_text("utf-8").splitlines())
    index: dict[str, int] = {}
    dfs: list[int] = []
    n_docs = len(record_ids)
    for line in _vocab_sidecar(path).read_text("utf-8").splitlines():
        if line.startswith("#"):
            n_docs = int(line.split("=", 1)[1])
            continue
        term, col, df = line.split("\t")
        index[term] = int(col)
        dfs.append(int(df))
    vocab = Vocabulary(index=index, doc_frequency=tuple(dfs), n_docs=n_docs)
    return TfidfMatrix(record_ids=record_ids, matrix=matrix), vocab


def _vocab_sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".vocab.tsv")


def _rows_sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".rows.txt")
