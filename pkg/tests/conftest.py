"""Shared fixtures: small mappings, corpora, and repo paths."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from collabel.records import CollegeMapping, Dataset, ThesisRecord
from collabel.text import DocumentText, load_stopwords

REPO_ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = Path(__file__).resolve().parent / "data"
DEMO_DATA = REPO_ROOT / "demos" / "data"


def make_doc(record_id: str, tokens: list[str]) -> DocumentText:
    """DocumentText from bare tokens, each token its own rendered term."""
    return DocumentText(record_id=record_id, tokens=tuple(tokens), rendered=", ".join(tokens))


@pytest.fixture(scope="session")
def stopwords() -> frozenset[str]:
    return load_stopwords()


@pytest.fixture
def two_college_mapping() -> CollegeMapping:
    return CollegeMapping(
        {"Arts": ("Painting", "Sculpture"), "Science": ("Physics", "Chemistry")}
    )


@pytest.fixture(scope="session")
def demo_mapping() -> CollegeMapping:
    return CollegeMapping.from_file(DEMO_DATA / "colleges.json")


@pytest.fixture(scope="session")
def demo_mapping_path() -> Path:
    return DEMO_DATA / "colleges.json"


@pytest.fixture(scope="session")
def demo_records_path() -> Path:
    return DEMO_DATA / "theses.jsonl"


def write_jsonl(path: Path, rows: list[dict]) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return path


def labeled_dataset(spec: dict[str, int]) -> Dataset:
    """A dataset with ``count`` records labeled ``college`` per entry."""
    records = []
    for college, count in spec.items():
        for i in range(count):
            records.append(
                ThesisRecord(
                    id=f"{college.lower()}-{i}",
                    title=f"Study {i} of {college}",
                    keywords=(f"topic {i}",),
                    department=None,
                    college=college,
                )
            )
    return Dataset(tuple(records))
