"""End-to-end batch submission: render, submit, parse, collect.

One failed batch never aborts the run. Batches whose answers cannot be
parsed are excluded wholesale — a miscounted label list contributes no
rows — and the failure itself is kept as experimental signal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from ..errors import AuthError, CollabelError, ParseFailure, TransportError
from ..evalreport import PredictionRow, PredictionSet
from ..records import CollegeMapping
from .parsing import parse_labels
from .prompts import PromptTemplate, render_prompt
from .sampling import SampleBatch

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BatchFailure:
    sample_id: int
    error: CollabelError

    def describe(self) -> str:
        return f"sample {self.sample_id}: {type(self.error).__name__}: {self.error}"


def run_experiment(
    batches: list[SampleBatch],
    template: PromptTemplate,
    endpoint,
    mapping: CollegeMapping,
    model_name: str,
    run_dir: str | Path | None = None,
    aliases: dict[str, tuple[str, ...]] | None = None,
    repair: bool = False,
) -> tuple[PredictionSet, list[BatchFailure]]:
    """Submit every batch and assemble per-document prediction rows.

    ``endpoint`` is anything with submit(prompt) -> ChatExchange. When
    ``run_dir`` is given, each batch's prompt and raw response are
    archived there as plain text. ``repair`` resubmits a batch once
    after a parse failure; it is off by default because those failures
    are usually the measurement, not an accident.
    """
    if run_dir is not None:
        run_dir = Path(run_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
    rows: list[PredictionRow] = []
    failures: list[BatchFailure] = []
    for batch in batches:
        prompt = render_prompt(template, batch, mapping)
        _archive(run_dir, batch.sample_id, "prompt", prompt)
        try:
            parsed = _submit_and_parse(batch, prompt, template, endpoint, mapping, aliases, run_dir)
        except ParseFailure as exc:
            if repair:
                log.warning("sample %d: %s; resubmitting once", batch.sample_id, exc)
                try:
                    parsed = _submit_and_parse(
                        batch, prompt, template, endpoint, mapping, aliases, run_dir
                    )
                except (ParseFailure, TransportError, AuthError) as exc2:
                    failures.append(BatchFailure(batch.sample_id, exc2))
                    log.error("sample %d failed after repair: %s", batch.sample_id, exc2)
                    continue
            else:
                failures.append(BatchFailure(batch.sample_id, exc))
                log.error("sample %d excluded: %s", batch.sample_id, exc)
                continue
        except (TransportError, AuthError) as exc:
            failures.append(BatchFailure(batch.sample_id, exc))
            log.error("sample %d not submitted: %s", batch.sample_id, exc)
            continue
        for doc, label in zip(batch.documents, parsed.labels):
            rows.append(
                PredictionRow(
                    record_id=doc.record_id,
                    true_label=doc.true_label,
                    predicted_label=label,
                    model=model_name,
                    sample_id=batch.sample_id,
                )
            )
    return PredictionSet(tuple(rows)), failures


def _submit_and_parse(batch, prompt, template, endpoint, mapping, aliases, run_dir):
    exchange = endpoint.submit(prompt)
    _archive(run_dir, batch.sample_id, "response", exchange.raw_response)
    return parse_labels(
        exchange.raw_response, len(batch), mapping, template.variant, aliases
    )


def _archive(run_dir: Path | None, sample_id: int, kind: str, text: str) -> None:
    if run_dir is None:
        return
    (run_dir / f"sample_{sample_id:02d}.{kind}.txt").write_text(text, encoding="utf-8")
