"""Text normalization: title and keyword strings to token streams.

Normalization is deliberately blunt: lowercase, split on anything that
is not a letter or digit, drop stopwords. No stemming, so "networks"
and "network" stay distinct terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import EmptyDocument
from .records import ThesisRecord


@dataclass(frozen=True)
class DocumentText:
    """A record reduced to its token stream plus a one-line rendering.

    ``tokens`` drive feature extraction; ``rendered`` is the exact line
    shown to a chat endpoint. The two agree: splitting ``rendered`` on
    ", " and then on whitespace reproduces ``tokens``.
    """

    record_id: str
    tokens: tuple[str, ...]
    rendered: str


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Stopword set from a one-term-per-line UTF-8 file.

    With no path, the packaged default list is used. Terms are folded to
    lowercase; blank lines are ignored.
    """
    if path is None:
        text = resources.files("collabel.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(word.strip().lower() for word in text.splitlines() if word.strip())


def tokenize(text: str, stopwords: frozenset[str] = frozenset()) -> list[str]:
    """Lowercased tokens with punctuation stripped and stopwords removed."""
    lowered = text.lower()
    out = []
    word: list[str] = []
    for ch in lowered:
        if ch.isalnum():
            word.append(ch)
        elif word:
            out.append("".join(word))
            word = []
    if word:
        out.append("".join(word))
    return [tok for tok in out if tok not in stopwords]


def normalize_title(title: str, stopwords: frozenset[str] = frozenset()) -> list[str]:
    """Token stream of a title. Alias of tokenize, named for its main use."""
    return tokenize(title, stopwords)


def build_document(record: ThesisRecord, stopwords: frozenset[str] = frozenset()) -> DocumentText:
    """Fuse a record's title and keywords into one DocumentText.

    Token order is title first, then each keyword in record order;
    duplicates across segments are kept. In the rendering, each title
    token is its own comma-separated term while a multi-word keyword
    stays intact as one term. A record whose segments all normalize to
    nothing raises EmptyDocument.
    """
    segments: list[list[str]] = []
    for token in tokenize(record.title, stopwords):
        segments.append([token])
    for keyword in record.keywords:
        kw_tokens = tokenize(keyword, stopwords)
        if kw_tokens:
            segments.append(kw_tokens)
    if not segments:
        raise EmptyDocument(record.id)
    tokens = tuple(tok for seg in segments for tok in seg)
    rendered = ", ".join(" ".join(seg) for seg in segments)
    return DocumentText(record_id=record.id, tokens=tokens, rendered=rendered)
