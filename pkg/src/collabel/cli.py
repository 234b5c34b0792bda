"""Command-line entry point: file-based pipeline over all toolkit stages.

Every subcommand reads and writes plain files, records a run manifest
before producing outputs, and takes its randomness from explicit seed
flags. Usage mistakes exit with code 2; bad data exits with code 1 and
a diagnostic naming the file (and row where known).
"""

from __future__ import annotations

import functools
import json
import logging
from pathlib import Path

import click

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__, evalreport, tfidf
from .errors import CollabelError
from .gbt import BoostedEnsemble, TrainConfig, grid_search, predict_labels, save_cv_table, train
from .llm import (
    EndpointConfig,
    MockChatEndpoint,
    PromptTemplate,
    RemoteEndpoint,
    draw_samples,
    load_aliases,
    parse_mock_spec,
    render_prompt,
    run_experiment,
)
from .llm.sampling import load_batches, save_batches
from .manifest import write_manifest
from .records import (
    MISSING,
    CollegeMapping,
    SplitSpec,
    assign_colleges,
    class_distribution,
    load_dataset,
    save_dataset,
    split,
)
from .text import build_document, load_stopwords

log = logging.getLogger(__name__)

MODEL_FILE_FORMAT = "collabel-model"
MODEL_FILE_VERSION = 1

_in_opt = click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Input file.")
_out_opt = click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Output file.")
_mapping_opt = click.option("--mapping", "mapping_path", required=True, type=click.Path(exists=True, dir_okay=False), help="College-to-departments JSON file.")
_seed_opt = click.option("--seed", type=int, default=None, help="Random seed (overrides config).")
_stopwords_opt = click.option("--stopwords", "stopwords_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Stopword file, one term per line (default: packaged list).")
_config_opt = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="TOML config file.")


def _domain_errors(fn):
    """Map toolkit errors to exit code 1 with their diagnostic text."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CollabelError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _load_toml(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _section(config: dict, name: str) -> dict:
    value = config.get(name)
    return dict(value) if isinstance(value, dict) else {}


@click.group()
@click.version_option(__version__, prog_name="collabel")
@click.option("-v", "--verbose", is_flag=True, help="Log progress details.")
def main(verbose: bool):
    """Label thesis metadata with colleges and compare classifiers."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


# ---------------------------------------------------------------------------
# record handling


@main.command()
@_in_opt
@_out_opt
@click.option("--format", "fmt", type=click.Choice(["jsonl", "csv"]), default=None, help="Input format (default: by file suffix).")
@_domain_errors
def ingest(in_path: str, out_path: str, fmt: str | None):
    """Validate records and write them as canonical JSONL."""
    dataset = load_dataset(in_path, fmt)
    write_manifest("ingest", out_path, inputs=[in_path], outputs=[out_path],
                   config={"format": fmt or "auto", "records": len(dataset)})
    save_dataset(dataset, out_path)
    click.echo(f"ingested {len(dataset)} records -> {out_path}")


@main.command()
@_in_opt
@_mapping_opt
@_out_opt
@_domain_errors
def label(in_path: str, mapping_path: str, out_path: str):
    """Assign a college to every record from its department."""
    dataset = load_dataset(in_path)
    mapping = CollegeMapping.from_file(mapping_path)
    labeled = assign_colleges(dataset, mapping)
    distribution = class_distribution(labeled)
    write_manifest("label", out_path, inputs=[in_path, mapping_path], outputs=[out_path],
                   config={"class_distribution": distribution})
    save_dataset(labeled, out_path)
    click.echo(json.dumps(distribution, sort_keys=True))


# ---------------------------------------------------------------------------
# features and trees


@main.command()
@_in_opt
@_out_opt
@_stopwords_opt
@_domain_errors
def featurize(in_path: str, out_path: str, stopwords_path: str | None):
    """Fit a vocabulary and write the TF-IDF matrix with its sidecars."""
    dataset = load_dataset(in_path)
    stopwords = load_stopwords(stopwords_path)
    documents = [build_document(rec, stopwords) for rec in dataset]
    vocab = tfidf.fit(documents)
    matrix = tfidf.transform(documents, vocab)
    out = Path(out_path)
    sidecars = [out.with_name(out.name + ".vocab.tsv"), out.with_name(out.name + ".rows.txt")]
    write_manifest("featurize", out_path, inputs=[in_path, stopwords_path or "<packaged stopwords>"],
                   outputs=[out, *sidecars],
                   config={"documents": len(documents), "terms": len(vocab)})
    tfidf.save_matrix(matrix, vocab, out)
    click.echo(f"{len(documents)} documents x {len(vocab)} terms -> {out_path}")


def _labeled_documents(dataset, stopwords):
    """(documents, labels) for records carrying a real college label."""
    docs, labels = [], []
    skipped = 0
    for rec in dataset:
        if rec.is_labeled():
            docs.append(build_document(rec, stopwords))
            labels.append(rec.college)
        else:
            skipped += 1
    if skipped:
        log.info("skipped %d records without a college label", skipped)
    return docs, labels


def _save_model(path, ensemble: BoostedEnsemble, vocab: tfidf.Vocabulary, stopwords) -> None:
    doc = {
        "format": MODEL_FILE_FORMAT,
        "version": MODEL_FILE_VERSION,
        "ensemble": ensemble.to_dict(),
        "vocabulary": {
            "terms": list(vocab.terms),
            "df": list(vocab.doc_frequency),
            "n_docs": vocab.n_docs,
        },
        "stopwords": sorted(stopwords),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def _load_model(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FILE_FORMAT or doc.get("version") != MODEL_FILE_VERSION:
        raise click.ClickException(f"{path}: not a {MODEL_FILE_FORMAT} v{MODEL_FILE_VERSION} file")
    ensemble = BoostedEnsemble.from_dict(doc["ensemble"])
    raw_vocab = doc["vocabulary"]
    vocab = tfidf.Vocabulary(
        index={term: i for i, term in enumerate(raw_vocab["terms"])},
        doc_frequency=tuple(raw_vocab["df"]),
        n_docs=int(raw_vocab["n_docs"]),
    )
    return ensemble, vocab, frozenset(doc["stopwords"])


@main.command(name="train")
@_in_opt
@_out_opt
@_config_opt
@_seed_opt
@_stopwords_opt
@_domain_errors
def train_cmd(in_path: str, out_path: str, config_path: str | None, seed: int | None, stopwords_path: str | None):
    """Train the boosted-tree model on labeled records.

    The TOML config may carry a [train] table of hyperparameters and an
    optional [split] table; with [split] present a holdout file is
    written next to the model and excluded from training.
    """
    raw = _load_toml(config_path)
    train_params = _section(raw, "train") or {
        k: v for k, v in raw.items() if not isinstance(v, dict)
    }
    if seed is not None:
        train_params["seed"] = seed
    config = TrainConfig.from_mapping(train_params)

    dataset = load_dataset(in_path)
    stopwords = load_stopwords(stopwords_path)
    outputs = [out_path]
    holdout_path = None
    split_cfg = _section(raw, "split")
    if split_cfg:
        spec = SplitSpec(
            seed=int(split_cfg.get("seed", config.seed)),
            train_fraction=float(split_cfg.get("train_fraction", 0.8)),
            stratified=bool(split_cfg.get("stratified", True)),
        )
        train_set, holdout = split(dataset, spec)
        holdout_path = Path(split_cfg.get("holdout", out_path + ".holdout.jsonl"))
        outputs.append(holdout_path)
    else:
        spec = None
        train_set, holdout = dataset, None

    docs, labels = _labeled_documents(train_set, stopwords)
    vocab = tfidf.fit(docs)
    matrix = tfidf.transform(docs, vocab)
    ensemble = train(matrix, labels, config)

    resolved = {"train": config.to_mapping()}
    if spec is not None:
        resolved["split"] = {
            "seed": spec.seed, "train_fraction": spec.train_fraction,
            "stratified": spec.stratified, "holdout": str(holdout_path),
        }
    write_manifest("train", out_path, inputs=[in_path, config_path or "<defaults>"],
                   outputs=outputs, config=resolved, seeds={"seed": config.seed})
    if holdout is not None:
        save_dataset(holdout, holdout_path)
    _save_model(out_path, ensemble, vocab, stopwords)
    click.echo(
        f"trained {config.num_round} rounds x {len(ensemble.class_labels)} classes; "
        f"final log-loss {ensemble.train_loss[-1]:.4f} -> {out_path}"
    )


@main.command()
@_in_opt
@_out_opt
@_config_opt
@_seed_opt
@_stopwords_opt
@click.option("--folds", type=int, default=5, help="Cross-validation folds.")
@_domain_errors
def gridsearch(in_path: str, out_path: str, config_path: str | None, seed: int | None,
               stopwords_path: str | None, folds: int):
    """Cross-validated grid search; writes the CV table and best config."""
    raw = _load_toml(config_path)
    grid = _section(raw, "grid")
    if not grid:
        raise click.UsageError("config file must carry a [grid] table of parameter lists")
    defaults = _section(raw, "defaults")
    dataset = load_dataset(in_path)
    stopwords = load_stopwords(stopwords_path)
    docs, labels = _labeled_documents(dataset, stopwords)
    vocab = tfidf.fit(docs)
    matrix = tfidf.transform(docs, vocab)
    best, table = grid_search(
        matrix, labels, grid, folds=folds, seed=seed if seed is not None else 0, defaults=defaults
    )
    best_path = Path(out_path + ".best.json")
    write_manifest("gridsearch", out_path, inputs=[in_path, config_path],
                   outputs=[out_path, best_path],
                   config={"grid": grid, "defaults": defaults, "folds": folds},
                   seeds={"seed": seed if seed is not None else 0})
    save_cv_table(table, out_path)
    with open(best_path, "w", encoding="utf-8") as fh:
        json.dump(best.to_mapping(), fh, indent=2)
        fh.write("\n")
    click.echo(f"{len(table)} grid points -> {out_path}; best -> {best_path}")


@main.command()
@_in_opt
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Trained model JSON file.")
@_out_opt
@click.option("--model-name", default="gbt", help="Model name recorded in the prediction rows.")
@_domain_errors
def predict(in_path: str, model_path: str, out_path: str, model_name: str):
    """Classify records with a trained model and write a prediction CSV."""
    ensemble, vocab, stopwords = _load_model(model_path)
    dataset = load_dataset(in_path)
    documents = [build_document(rec, stopwords) for rec in dataset]
    matrix = tfidf.transform(documents, vocab)
    predicted = predict_labels(ensemble, matrix)
    rows = tuple(
        evalreport.PredictionRow(
            record_id=rec.id,
            true_label=rec.college if rec.college is not None else MISSING,
            predicted_label=pred,
            model=model_name,
            sample_id=1,
        )
        for rec, pred in zip(dataset, predicted)
    )
    write_manifest("predict", out_path, inputs=[in_path, model_path], outputs=[out_path],
                   config={"model_name": model_name, "records": len(rows)})
    evalreport.write_predictions(evalreport.PredictionSet(rows), out_path)
    click.echo(f"{len(rows)} predictions -> {out_path}")


# ---------------------------------------------------------------------------
# chat-endpoint workflow


@main.command()
@_in_opt
@_mapping_opt
@_out_opt
@click.option("--seed", type=int, required=True, help="Sampling seed.")
@click.option("--per-college", type=int, default=10, show_default=True, help="Documents drawn per college per sample.")
@click.option("--n-samples", type=int, default=5, show_default=True, help="Number of samples (batches).")
@_stopwords_opt
@_domain_errors
def sample(in_path: str, mapping_path: str, out_path: str, seed: int,
           per_college: int, n_samples: int, stopwords_path: str | None):
    """Draw document batches (with replacement, then shuffled) for prompting."""
    dataset = load_dataset(in_path)
    mapping = CollegeMapping.from_file(mapping_path)
    stopwords = load_stopwords(stopwords_path)
    batches = draw_samples(
        dataset, mapping, per_college=per_college, n_samples=n_samples,
        seed=seed, stopwords=stopwords,
    )
    write_manifest("sample", out_path, inputs=[in_path, mapping_path], outputs=[out_path],
                   config={"per_college": per_college, "n_samples": n_samples},
                   seeds={"seed": seed})
    save_batches(batches, out_path, seed=seed)
    click.echo(f"{len(batches)} batches of {len(batches[0])} documents -> {out_path}")


@main.command()
@_in_opt
@_mapping_opt
@click.option("--variant", type=click.Choice(["plain", "bracketed"]), default="plain", show_default=True, help="Prompt protocol variant.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="Directory for prompt text files.")
@_domain_errors
def prompt(in_path: str, mapping_path: str, variant: str, out_dir: str):
    """Render one prompt file per batch (for manual chat sessions or audit)."""
    batches = load_batches(in_path)
    mapping = CollegeMapping.from_file(mapping_path)
    template = PromptTemplate.from_mapping(variant, mapping)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [out / f"sample_{b.sample_id:02d}.prompt.txt" for b in batches]
    write_manifest("prompt", out, inputs=[in_path, mapping_path], outputs=files,
                   config={"variant": variant})
    for batch, path in zip(batches, files):
        path.write_text(render_prompt(template, batch, mapping), encoding="utf-8")
    click.echo(f"{len(files)} prompts -> {out_dir}")


def _build_endpoint(endpoint_spec: str, template, mapping, batches):
    """An endpoint object from either a mock spec string or a TOML file path."""
    if endpoint_spec.startswith("mock:"):
        try:
            faults = parse_mock_spec(endpoint_spec)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from exc
        return MockChatEndpoint.for_batches(template, mapping, batches, faults=faults)
    if not Path(endpoint_spec).exists():
        raise click.UsageError(
            f"--endpoint {endpoint_spec!r} is neither a mock spec nor an existing file"
        )
    return RemoteEndpoint(EndpointConfig.from_file(endpoint_spec))


@main.command(name="classify-llm")
@_in_opt
@_mapping_opt
@_out_opt
@click.option("--endpoint", "endpoint_spec", required=True, help="Endpoint TOML file, or a mock spec such as mock:perfect / mock:extra=2@1.")
@click.option("--variant", type=click.Choice(["plain", "bracketed"]), default="plain", show_default=True, help="Prompt protocol variant.")
@click.option("--model", "model_name", default=None, help="Model name recorded in prediction rows (default: endpoint's model).")
@click.option("--run-dir", type=click.Path(file_okay=False), default=None, help="Directory for prompt/response archives.")
@click.option("--aliases", "aliases_path", type=click.Path(exists=True, dir_okay=False), default=None, help="College alias JSON (default: packaged table).")
@click.option("--repair", is_flag=True, help="Resubmit a batch once after a parse failure.")
@_domain_errors
def classify_llm(in_path: str, mapping_path: str, out_path: str, endpoint_spec: str,
                 variant: str, model_name: str | None, run_dir: str | None,
                 aliases_path: str | None, repair: bool):
    """Submit sampled batches to a chat endpoint and collect predictions."""
    batches = load_batches(in_path)
    mapping = CollegeMapping.from_file(mapping_path)
    template = PromptTemplate.from_mapping(variant, mapping)
    endpoint = _build_endpoint(endpoint_spec, template, mapping, batches)
    if model_name is None:
        model_name = getattr(endpoint, "model", "unknown")
    aliases = load_aliases(aliases_path) if aliases_path else None
    failures_path = Path(out_path + ".failures.log")
    outputs = [out_path, failures_path]
    if run_dir:
        outputs.append(run_dir)
    write_manifest("classify-llm", out_path, inputs=[in_path, mapping_path], outputs=outputs,
                   config={"endpoint": endpoint_spec, "variant": variant,
                           "model_name": model_name, "repair": repair})
    preds, failures = run_experiment(
        batches, template, endpoint, mapping, model_name,
        run_dir=run_dir, aliases=aliases, repair=repair,
    )
    evalreport.write_predictions(preds, out_path)
    failures_path.write_text(
        "".join(f.describe() + "\n" for f in failures), encoding="utf-8"
    )
    click.echo(
        f"{len(preds)} predictions from {len(batches) - len(failures)}/{len(batches)} "
        f"batches -> {out_path}"
    )
    for failure in failures:
        click.echo(failure.describe(), err=True)


# ---------------------------------------------------------------------------
# scoring and reporting


@main.command()
@_in_opt
@_mapping_opt
@_out_opt
@_domain_errors
def score(in_path: str, mapping_path: str, out_path: str):
    """Score a prediction CSV into a per-model report JSON."""
    mapping = CollegeMapping.from_file(mapping_path)
    preds = evalreport.read_predictions(in_path, mapping)
    reports = []
    for model in preds.models():
        subset = preds.for_model(model)
        report = evalreport.sample_summary(subset)
        entry = evalreport.report_to_dict(report)
        entry["confusion"] = evalreport.confusion_to_dict(evalreport.confusion(subset))
        reports.append(entry)
    if not reports:
        raise click.ClickException(f"{in_path}: no prediction rows to score")
    write_manifest("score", out_path, inputs=[in_path, mapping_path], outputs=[out_path],
                   config={"models": [r["model"] for r in reports]})
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump({"format": "collabel-score", "version": 1, "reports": reports}, fh, indent=2)
        fh.write("\n")
    click.echo(f"scored {len(reports)} model(s) -> {out_path}")


@main.command()
@click.option("--in", "in_paths", required=True, multiple=True, type=click.Path(exists=True, dir_okay=False), help="Score JSON file (repeatable).")
@click.option("--format", "fmt", default="markdown", show_default=True, help="Output shape: markdown, csv, or plotdata.")
@_out_opt
@_domain_errors
def report(in_paths: tuple[str, ...], fmt: str, out_path: str):
    """Merge score files into one comparison report."""
    reports = []
    for path in in_paths:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("format") != "collabel-score":
            raise click.ClickException(f"{path}: not a collabel-score file")
        reports.extend(evalreport.report_from_dict(entry) for entry in doc["reports"])
    write_manifest("report", out_path, inputs=list(in_paths), outputs=[out_path],
                   config={"format": fmt, "models": [r.model for r in reports]})
    evalreport.emit_report(reports, fmt, out_path)
    click.echo(f"{len(reports)} model(s) -> {out_path}")


if __name__ == "__main__":
    main()
