"""Metadata records, the college-department mapping, and labeling.

A record's ``college`` is either a key of the active mapping or the
sentinel ``"missing"``. ``assign_colleges`` populates it from the
record's department; everything downstream treats the result as ground
truth.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import DuplicateId, EmptyClass, ParseError

log = logging.getLogger(__name__)

MISSING = "missing"


@dataclass(frozen=True)
class ThesisRecord:
    """One metadata record: a thesis identified by id with title and keywords."""

    id: str
    title: str
    keywords: tuple[str, ...] = ()
    department: str | None = None
    college: str | None = None

    def is_labeled(self) -> bool:
        return self.college is not None and self.college != MISSING


@dataclass(frozen=True)
class CollegeMapping:
    """Controlled vocabulary: college name -> owned department names."""

    entries: dict[str, tuple[str, ...]]

    def __post_init__(self):
        seen: dict[str, str] = {}
        for college, departments in self.entries.items():
            if not college:
                raise ValueError("college names must be non-empty")
            if not departments:
                raise ValueError(f"college {college!r} has an empty department list")
            for dept in departments:
                key = _fold(dept)
                if key in seen and seen[key] != college:
                    raise ValueError(
                        f"department {dept!r} appears under both {seen[key]!r} and {college!r}"
                    )
                seen[key] = college
        object.__setattr__(self, "_dept_to_college", seen)

    @property
    def colleges(self) -> tuple[str, ...]:
        return tuple(self.entries)

    def owner_of(self, department: str) -> str | None:
        """College owning the department, matched exactly after trim + casefold."""
        return self._dept_to_college.get(_fold(department))

    @classmethod
    def from_file(cls, path: str | Path) -> "CollegeMapping":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ParseError(str(path), 1, "mapping file must be a JSON object")
        return cls({college: tuple(depts) for college, depts in raw.items()})


def _fold(text: str) -> str:
    return text.strip().casefold()


@dataclass(frozen=True)
class Provenance:
    source: str
    loaded_at: str  # ISO-8601, UTC


@dataclass(frozen=True)
class Dataset:
    """An immutable collection of records with unique ids."""

    records: tuple[ThesisRecord, ...]
    provenance: Provenance | None = None

    def __post_init__(self):
        seen: set[str] = set()
        for rec in self.records:
            if rec.id in seen:
                raise DuplicateId(rec.id)
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def labeled(self) -> tuple[ThesisRecord, ...]:
        """Records carrying a real college label (not None, not the sentinel)."""
        return tuple(r for r in self.records if r.is_labeled())

    def by_college(self) -> dict[str, list[ThesisRecord]]:
        groups: dict[str, list[ThesisRecord]] = {}
        for rec in self.labeled():
            groups.setdefault(rec.college, []).append(rec)
        return groups


@dataclass(frozen=True)
class SplitSpec:
    """Train/test split parameters. The seed is always explicit."""

    seed: int
    train_fraction: float = 0.8
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


# ---------------------------------------------------------------------------
# loading


def load_dataset(path: str | Path, fmt: str | None = None) -> Dataset:
    """Load records from a JSONL or CSV file, validating as we go.

    Rows missing id or title are rejected with their row number; a
    repeated id raises DuplicateId. ``fmt`` defaults to the file suffix.
    """
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if fmt == "jsonl":
        records = _load_jsonl(path)
    elif fmt == "csv":
        records = _load_csv(path)
    else:
        raise ValueError(f"unknown dataset format {fmt!r} (expected jsonl or csv)")
    provenance = Provenance(source=str(path), loaded_at=datetime.now(timezone.utc).isoformat())
    return Dataset(tuple(records), provenance)


def _load_jsonl(path: Path) -> list[ThesisRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(str(path), lineno, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise ParseError(str(path), lineno, "row is not a JSON object")
            records.append(_record_from_fields(obj, path, lineno))
    return records


def _load_csv(path: Path) -> list[ThesisRecord]:
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        # header occupies row 1; data rows start at 2
        for rowno, row in enumerate(reader, start=2):
            fields = {k: v for k, v in row.items() if k is not None}
            if "keywords" in fields:
                raw = fields["keywords"] or ""
                fields["keywords"] = [k.strip() for k in raw.split(";") if k.strip()]
            records.append(_record_from_fields(fields, path, rowno))
    return records


def _record_from_fields(fields: dict, path: Path, row: int) -> ThesisRecord:
    rec_id = fields.get("id")
    if not rec_id or not str(rec_id).strip():
        raise ParseError(str(path), row, "missing or empty id")
    title = fields.get("title")
    if title is None or not str(title).strip():
        raise ParseError(str(path), row, "missing or empty title")
    keywords = fields.get("keywords") or []
    if isinstance(keywords, str):
        raise ParseError(str(path), row, "keywords must be an array of strings")
    department = fields.get("department") or None
    college = fields.get("college") or None
    return ThesisRecord(
        id=str(rec_id),
        title=str(title),
        keywords=tuple(str(k) for k in keywords),
        department=str(department) if department else None,
        college=str(college) if college else None,
    )


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write records as canonical JSONL (optional fields omitted when absent)."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in dataset:
            obj: dict = {"id": rec.id, "title": rec.title, "keywords": list(rec.keywords)}
            if rec.department is not None:
                obj["department"] = rec.department
            if rec.college is not None:
                obj["college"] = rec.college
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# labeling and splitting


def assign_colleges(dataset: Dataset, mapping: CollegeMapping) -> Dataset:
    """Populate every record's college from its department.

    A department owned by a college gets that college; anything else
    (absent or unmapped department) gets the "missing" sentinel. Existing
    college values are overwritten — the mapping is ground truth — and
    each overwrite is logged.
    """
    updated = []
    for rec in dataset:
        college = mapping.owner_of(rec.department) if rec.department else None
        if college is None:
            college = MISSING
        if rec.college is not None and rec.college != college:
            log.info("record %s: college %r overwritten with %r", rec.id, rec.college, college)
        updated.append(replace(rec, college=college))
    return Dataset(tuple(updated), dataset.provenance)


def class_distribution(dataset: Dataset) -> dict[str, int]:
    """Record counts per college label, the sentinel included."""
    counts: dict[str, int] = {}
    for rec in dataset:
        label = rec.college if rec.college is not None else MISSING
        counts[label] = counts.get(label, 0) + 1
    return counts


def split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Split the labeled records into disjoint train/test datasets.

    Deterministic for a given seed. Stratified splits keep each class's
    train share within one record of ``train_fraction`` and require at
    least two records per class so both sides see every class.
    """
    labeled = dataset.labeled()
    rng = np.random.default_rng(spec.seed)
    n = len(labeled)
    if spec.stratified:
        groups: dict[str, list[int]] = {}
        for i, rec in enumerate(labeled):
            groups.setdefault(rec.college, []).append(i)
        train_idx: list[int] = []
        for label, idx in groups.items():
            if len(idx) < 2:
                raise EmptyClass(label)
            perm = rng.permutation(len(idx))
            n_train = int(len(idx) * spec.train_fraction + 0.5)
            n_train = min(max(n_train, 1), len(idx) - 1)
            train_idx.extend(idx[j] for j in perm[:n_train])
        chosen = set(train_idx)
    else:
        perm = rng.permutation(n)
        n_train = int(n * spec.train_fraction + 0.5)
        chosen = set(int(i) for i in perm[:n_train])
    train = tuple(rec for i, rec in enumerate(labeled) if i in chosen)
    test = tuple(rec for i, rec in enumerate(labeled) if i not in chosen)
    return (
        Dataset(train, dataset.provenance),
        Dataset(test, dataset.provenance),
    )
