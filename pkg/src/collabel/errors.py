"""Exception types raised across the toolkit.

Everything user-facing derives from CollabelError so the CLI can map
domain failures to a single exit code.
"""

from __future__ import annotations


class CollabelError(Exception):
    """Base class for all toolkit errors."""


# ---------------------------------------------------------------------------
# record loading / labeling


class ParseError(CollabelError):
    """A row of an input file could not be parsed."""

    def __init__(self, path: str, row: int, message: str):
        super().__init__(f"{path}:{row}: {message}")
        self.path = str(path)
        self.row = row
        self.message = message


class DuplicateId(CollabelError):
    """Two records share the same id."""

    def __init__(self, record_id: str):
        super().__init__(f"duplicate record id {record_id!r}")
        self.record_id = record_id


class EmptyClass(CollabelError):
    """A stratified operation needs records of a class that has none (or too few)."""

    def __init__(self, label: str, message: str | None = None):
        super().__init__(message or f"class {label!r} has too few records for a stratified split")
        self.label = label


# ---------------------------------------------------------------------------
# text preparation / featurization


class EmptyDocument(CollabelError):
    """A record yields zero tokens after normalization and cannot be featurized."""

    def __init__(self, record_id: str):
        super().__init__(f"record {record_id!r} has no tokens after normalization")
        self.record_id = record_id


class EmptyCorpus(CollabelError):
    """A vocabulary cannot be fitted on an empty document collection."""


class UnknownTerm(CollabelError):
    def __init__(self, term: str):
        super().__init__(f"term {term!r} is not in the fitted vocabulary")
        self.term = term


# ---------------------------------------------------------------------------
# boosted-tree training


class SingleClass(CollabelError):
    """Training data contains fewer than two distinct labels."""


class DimensionMismatch(CollabelError):
    def __init__(self, expected: int, got: int, what: str = "feature count"):
        super().__init__(f"{what} mismatch: expected {expected}, got {got}")
        self.expected = expected
        self.got = got


class EmptyGrid(CollabelError):
    """A grid search was requested over zero configurations."""


# ---------------------------------------------------------------------------
# chat endpoint transport


class TransportError(CollabelError):
    """The endpoint could not be reached or answered abnormally (after retries)."""


class Timeout(TransportError):
    """The endpoint did not answer within the configured timeout (after retries)."""


class AuthError(CollabelError):
    """Credentials are missing or were rejected. Never retried."""


# ---------------------------------------------------------------------------
# response parsing — these are the experiment's signal, never retried


class ParseFailure(CollabelError):
    """Base class for label-extraction failures."""


class CountMismatch(ParseFailure):
    """The response contains a different number of labels than documents sent."""

    def __init__(self, got: int, expected: int):
        super().__init__(f"expected {expected} labels, got {got}")
        self.got = got
        self.expected = expected


class UnknownLabel(ParseFailure):
    def __init__(self, line: int, text: str):
        super().__init__(f"line {line}: {text!r} is not a known college or alias")
        self.line = line
        self.text = text


class MalformedPair(ParseFailure):
    """A bracketed-variant line is missing its document echo."""

    def __init__(self, line: int, text: str):
        super().__init__(f"line {line}: missing ' - ' separator in {text!r}")
        self.line = line
        self.text = text


# ---------------------------------------------------------------------------
# sampling / reporting


class EmptyCollege(CollabelError):
    def __init__(self, college: str):
        super().__init__(f"college {college!r} has no labeled records to sample from")
        self.college = college


class EmptyPredictions(CollabelError):
    """A scoring operation received zero prediction rows."""


class UnsupportedFormat(CollabelError):
    def __init__(self, fmt: str):
        super().__init__(f"unsupported output format {fmt!r}")
        self.format = fmt
