"""Scoring of prediction sets: per-class accuracy, sample spread, confusion.

Per-class accuracy is the recall of that class: correct rows among rows
whose true label is the class. The spread across samples uses the
population standard deviation, treating the drawn samples as the whole
population of runs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyPredictions, ParseError, UnsupportedFormat
from .records import CollegeMapping

PREDICTION_HEADER = ("record_id", "true_label", "predicted_label", "model", "sample_id")


@dataclass(frozen=True)
class PredictionRow:
    record_id: str
    true_label: str
    predicted_label: str
    model: str
    sample_id: int

    def __post_init__(self):
        if self.sample_id < 1:
            raise ValueError("sample_id must be >= 1")


@dataclass(frozen=True)
class PredictionSet:
    """Scored rows for one or more models."""

    rows: tuple[PredictionRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def models(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for row in self.rows:
            seen.setdefault(row.model, None)
        return tuple(seen)

    def for_model(self, model: str) -> "PredictionSet":
        return PredictionSet(tuple(r for r in self.rows if r.model == model))

    def validate(self, mapping: CollegeMapping) -> None:
        """Check every label against the mapping's college names."""
        colleges = set(mapping.colleges)
        for row in self.rows:
            if row.true_label not in colleges:
                raise ValueError(
                    f"record {row.record_id}: true label {row.true_label!r} is not a college"
                )
            if row.predicted_label not in colleges:
                raise ValueError(
                    f"record {row.record_id}: predicted label {row.predicted_label!r} is not a college"
                )


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple[str, ...]
    counts: np.ndarray  # counts[true][predicted]

    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class ModelReport:
    """Everything the report emitters need for one model."""

    model: str
    per_class: dict[str, tuple[float, int]]  # label -> (accuracy, support)
    overall: float
    per_sample: tuple[float, ...]  # indexed by ascending sample id
    mean_accuracy: float
    std_accuracy: float
    single_sample: bool


# ---------------------------------------------------------------------------
# scoring


def per_class_accuracy(preds: PredictionSet) -> dict[str, tuple[float, int]]:
    """Accuracy and support per true label, labels sorted. Empty classes absent."""
    if not preds.rows:
        raise EmptyPredictions("prediction set is empty")
    correct: dict[str, int] = {}
    support: dict[str, int] = {}
    for row in preds:
        support[row.true_label] = support.get(row.true_label, 0) + 1
        if row.predicted_label == row.true_label:
            correct[row.true_label] = correct.get(row.true_label, 0) + 1
    return {
        label: (correct.get(label, 0) / support[label], support[label])
        for label in sorted(support)
    }


def overall_accuracy(preds: PredictionSet) -> float:
    if not preds.rows:
        raise EmptyPredictions("prediction set is empty")
    hits = sum(1 for r in preds if r.predicted_label == r.true_label)
    return hits / len(preds)


def sample_summary(preds: PredictionSet) -> ModelReport:
    """Per-sample accuracies plus their mean and population spread.

    A single-sample set reports a standard deviation of 0 and sets the
    single_sample flag instead of failing.
    """
    models = preds.models()
    if len(models) != 1:
        raise ValueError(f"expected rows for exactly one model, got {models!r}")
    by_sample: dict[int, list[PredictionRow]] = {}
    for row in preds:
        by_sample.setdefault(row.sample_id, []).append(row)
    per_sample = tuple(
        overall_accuracy(PredictionSet(tuple(by_sample[sid]))) for sid in sorted(by_sample)
    )
    return ModelReport(
        model=models[0],
        per_class=per_class_accuracy(preds),
        overall=overall_accuracy(preds),
        per_sample=per_sample,
        mean_accuracy=float(np.mean(per_sample)),
        std_accuracy=float(np.std(per_sample, ddof=0)),
        single_sample=len(per_sample) == 1,
    )


def confusion(preds: PredictionSet) -> ConfusionMatrix:
    """counts[t][p] over the sorted union of true and predicted labels."""
    if not preds.rows:
        raise EmptyPredictions("prediction set is empty")
    labels = sorted({r.true_label for r in preds} | {r.predicted_label for r in preds})
    index = {lab: i for i, lab in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for row in preds:
        counts[index[row.true_label], index[row.predicted_label]] += 1
    return ConfusionMatrix(labels=tuple(labels), counts=counts)


# ---------------------------------------------------------------------------
# file interchange


def write_predictions(preds: PredictionSet, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PREDICTION_HEADER)
        for row in preds:
            writer.writerow(
                [row.record_id, row.true_label, row.predicted_label, row.model, row.sample_id]
            )


def read_predictions(path: str | Path, mapping: CollegeMapping | None = None) -> PredictionSet:
    """Load a prediction CSV, optionally checking labels against a mapping.

    Schema errors and, when a mapping is given, unknown labels are
    reported with the offending row number.
    """
    path = Path(path)
    colleges = set(mapping.colleges) if mapping is not None else None
    rows: list[PredictionRow] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != PREDICTION_HEADER:
            raise ParseError(str(path), 1, f"header must be {','.join(PREDICTION_HEADER)}")
        for rowno, raw in enumerate(reader, start=2):
            if not raw:
                continue
            if len(raw) != len(PREDICTION_HEADER):
                raise ParseError(str(path), rowno, f"expected {len(PREDICTION_HEADER)} fields")
            record_id, true_label, predicted_label, model, sample_text = raw
            try:
                sample_id = int(sample_text)
            except ValueError:
                raise ParseError(str(path), rowno, f"sample_id {sample_text!r} is not an integer") from None
            if sample_id < 1:
                raise ParseError(str(path), rowno, "sample_id must be >= 1")
            if colleges is not None:
                for kind, label in (("true", true_label), ("predicted", predicted_label)):
                    if label not in colleges:
                        raise ParseError(str(path), rowno, f"{kind} label {label!r} is not a college")
            rows.append(PredictionRow(record_id, true_label, predicted_label, model, sample_id))
    return PredictionSet(tuple(rows))


def report_to_dict(report: ModelReport) -> dict:
    return {
        "model": report.model,
        "per_class": {label: list(pair) for label, pair in report.per_class.items()},
        "overall": report.overall,
        "per_sample": list(report.per_sample),
        "mean_accuracy": report.mean_accuracy,
        "std_accuracy": report.std_accuracy,
        "single_sample": report.single_sample,
    }


def report_from_dict(obj: dict) -> ModelReport:
    return ModelReport(
        model=obj["model"],
        per_class={label: (float(a), int(s)) for label, (a, s) in obj["per_class"].items()},
        overall=float(obj["overall"]),
        per_sample=tuple(float(v) for v in obj["per_sample"]),
        mean_accuracy=float(obj["mean_accuracy"]),
        std_accuracy=float(obj["std_accuracy"]),
        single_sample=bool(obj["single_sample"]),
    )


def confusion_to_dict(matrix: ConfusionMatrix) -> dict:
    return {"labels": list(matrix.labels), "counts": matrix.counts.tolist()}


# ---------------------------------------------------------------------------
# report emission


def emit_report(reports: list[ModelReport], fmt: str, out: str | Path) -> list[Path]:
    """Write the requested report shape; returns the written paths.

    markdown: models as rows, class columns plus Overall. csv: long
    format, one row per (model, class) plus an Overall row. plotdata:
    (model, mean, std) triples for external plotting.
    """
    if not reports:
        raise ValueError("at least one report is required")
    out = Path(out)
    if fmt == "markdown":
        text = render_markdown(reports)
        out.write_text(text, encoding="utf-8")
        return [out]
    if fmt == "csv":
        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model", "label", "accuracy", "support"])
            for report in reports:
                for label in sorted(report.per_class):
                    acc, sup = report.per_class[label]
                    writer.writerow([report.model, label, repr(acc), sup])
                total = sum(s for _, s in report.per_class.values())
                writer.writerow([report.model, "Overall", repr(report.overall), total])
        return [out]
    if fmt == "plotdata":
        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model", "mean", "std"])
            for report in reports:
                writer.writerow([report.model, repr(report.mean_accuracy), repr(report.std_accuracy)])
        return [out]
    raise UnsupportedFormat(fmt)


def render_markdown(reports: list[ModelReport]) -> str:
    labels = sorted({lab for report in reports for lab in report.per_class})
    header = ["Model"] + labels + ["Overall"]
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    for report in reports:
        cells = [report.model]
        for label in labels:
            if label in report.per_class:
                cells.append(f"{report.per_class[label][0]:.3f}")
            else:
                cells.append("-")
        cells.append(f"{report.overall:.3f}")
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
