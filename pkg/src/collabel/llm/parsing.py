"""Extraction and validation of college labels from completion text.

The count check runs first: answers with the wrong number of labels are
rejected wholesale, before any label-level validation, because a
miscounted list cannot be aligned with the submitted documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import CountMismatch, MalformedPair, UnknownLabel
from ..records import CollegeMapping


@dataclass(frozen=True)
class ParsedLabels:
    """Labels in response order; bracketed answers also keep the echoes."""

    labels: tuple[str, ...]
    pairs: tuple[tuple[str, str], ...] | None = None


def load_aliases(path: str | Path | None = None) -> dict[str, tuple[str, ...]]:
    """College name -> accepted surface forms. Defaults to the packaged table."""
    if path is None:
        text = resources.files("collabel.data").joinpath("college_aliases.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    raw = json.loads(text)
    return {college: tuple(forms) for college, forms in raw.items()}


def label_lookup(
    mapping: CollegeMapping, aliases: dict[str, tuple[str, ...]] | None = None
) -> dict[str, str]:
    """Folded surface form -> canonical college name."""
    if aliases is None:
        aliases = load_aliases()
    lookup: dict[str, str] = {}
    for college in mapping.colleges:
        lookup[_fold(college)] = college
    for college, forms in aliases.items():
        if college not in mapping.entries:
            continue
        for form in forms:
            lookup.setdefault(_fold(form), college)
    return lookup


def _fold(text: str) -> str:
    return text.strip().casefold()


def parse_labels(
    raw: str,
    expected: int,
    mapping: CollegeMapping,
    variant: str = "plain",
    aliases: dict[str, tuple[str, ...]] | None = None,
) -> ParsedLabels:
    """Extract one label per document from a completion.

    Blank lines are dropped first (line numbers in errors refer to the
    raw text). Then the label count must equal ``expected``, and every
    label must normalize to a college name via the alias table.
    """
    lines = [
        (lineno, line.strip())
        for lineno, line in enumerate(raw.splitlines(), start=1)
        if line.strip()
    ]
    if len(lines) != expected:
        raise CountMismatch(got=len(lines), expected=expected)
    lookup = label_lookup(mapping, aliases)
    labels: list[str] = []
    pairs: list[tuple[str, str]] = []
    for lineno, line in lines:
        if variant == "bracketed":
            if " - " not in line:
                raise MalformedPair(lineno, line)
            echo, label_text = line.rsplit(" - ", 1)
            echo = echo.strip()
            if echo.startswith("{") and echo.endswith("}"):
                echo = echo[1:-1]
            pairs.append((echo, label_text.strip()))
        else:
            label_text = line
        college = lookup.get(_fold(label_text))
        if college is None:
            raise UnknownLabel(lineno, label_text.strip())
        labels.append(college)
        if variant == "bracketed":
            pairs[-1] = (pairs[-1][0], college)
    return ParsedLabels(
        labels=tuple(labels), pairs=tuple(pairs) if variant == "bracketed" else None
    )
