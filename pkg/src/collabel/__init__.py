"""collabel: label thesis metadata with colleges and compare classifiers.

Batch toolkit covering the full workflow: ingest records, assign
college labels from a department mapping, featurize with TF-IDF, train
boosted trees, run zero-shot chat-endpoint classification, and score
everything into a common per-class report.
"""

__version__ = "0.1.0"

from .errors import CollabelError
from .records import (
    MISSING,
    CollegeMapping,
    Dataset,
    SplitSpec,
    ThesisRecord,
    assign_colleges,
    class_distribution,
    load_dataset,
    split,
)
from .text import DocumentText, build_document, load_stopwords, normalize_title, tokenize

__all__ = [
    "__version__",
    "CollabelError",
    "MISSING",
    "ThesisRecord",
    "CollegeMapping",
    "Dataset",
    "SplitSpec",
    "load_dataset",
    "assign_colleges",
    "class_distribution",
    "split",
    "DocumentText",
    "normalize_title",
    "tokenize",
    "build_document",
    "load_stopwords",
]
