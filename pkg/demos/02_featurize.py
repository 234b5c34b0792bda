"""Turn titles and keywords into a sparse TF-IDF matrix and poke at it."""

import numpy as np

from pathlib import Path

from collabel import tfidf
from collabel.records import CollegeMapping, assign_colleges, load_dataset
from collabel.text import build_document, load_stopwords

HERE = Path(__file__).parent
OUT = HERE / "output"


def main():
    OUT.mkdir(exist_ok=True)
    dataset = load_dataset(HERE / "data" / "theses.jsonl")
    mapping = CollegeMapping.from_file(HERE / "data" / "colleges.json")
    labeled = assign_colleges(dataset, mapping)
    stopwords = load_stopwords()

    documents = [build_document(rec, stopwords) for rec in labeled]
    sample = documents[0]
    print(f"document for {sample.record_id}:")
    print(f"  rendered: {sample.rendered}")
    print(f"  tokens:   {sample.tokens}")

    vocab = tfidf.fit(documents)
    matrix = tfidf.transform(documents, vocab)
    print(f"\nvocabulary: {len(vocab)} terms over {vocab.n_docs} documents")
    print(f"matrix: {matrix.matrix.shape}, {matrix.matrix.nnz} stored entries")

    # terms seen in exactly one document carry the highest idf
    df = np.asarray(vocab.doc_frequency)
    rare = [vocab.terms[i] for i in np.flatnonzero(df == 1)[:8]]
    common = [vocab.terms[i] for i in np.argsort(df)[-5:]]
    print(f"\nsample of df=1 terms (idf = ln({vocab.n_docs})): {rare}")
    print(f"most common terms: {common}")

    everywhere = int((df == vocab.n_docs).sum())
    print(f"terms appearing in every document (idf exactly 0): {everywhere}")

    tfidf.save_matrix(matrix, vocab, OUT / "features.mtx")
    print(f"\nwrote features.mtx (+ .vocab.tsv, .rows.txt sidecars) -> {OUT}")


if __name__ == "__main__":
    main()
