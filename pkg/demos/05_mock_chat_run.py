"""Run the chat-endpoint protocol against the deterministic mock.

Shows the happy path (every answer parses, every batch scores) and a
faulty run where one miscounted response drops its whole batch.
"""

from pathlib import Path

from collabel.evalreport import per_class_accuracy, write_predictions
from collabel.llm import MockChatEndpoint, PromptTemplate, draw_samples, run_experiment
from collabel.llm.mock import MockFault
from collabel.records import CollegeMapping, assign_colleges, load_dataset
from collabel.text import load_stopwords

HERE = Path(__file__).parent
OUT = HERE / "output"


def main():
    OUT.mkdir(exist_ok=True)
    dataset = load_dataset(HERE / "data" / "theses.jsonl")
    mapping = CollegeMapping.from_file(HERE / "data" / "colleges.json")
    labeled = assign_colleges(dataset, mapping)

    batches = draw_samples(
        labeled, mapping, per_college=10, n_samples=5, seed=11, stopwords=load_stopwords()
    )
    print(f"drew {len(batches)} batches of {len(batches[0])} documents "
          f"(10 per college, sampled with replacement)")

    template = PromptTemplate.from_mapping("plain", mapping)

    # perfect endpoint: answers straight from the answer key
    endpoint = MockChatEndpoint.for_batches(template, mapping, batches)
    preds, failures = run_experiment(
        batches, template, endpoint, mapping, "mock", run_dir=OUT / "mock_run"
    )
    print(f"\nperfect endpoint: {len(preds)} predictions, {len(failures)} failures")
    per_class = per_class_accuracy(preds)
    print("per-class accuracy: " +
          ", ".join(f"{c}={a:.1f}" for c, (a, _) in per_class.items()))
    write_predictions(preds, OUT / "mock_predictions.csv")

    # faulty endpoint: two spurious label lines on the first submission
    faulty = MockChatEndpoint.for_batches(
        template, mapping, batches,
        faults=(MockFault(kind="extra_labels", count=2, at_submission=1),),
    )
    preds2, failures2 = run_experiment(batches, template, faulty, mapping, "mock-faulty")
    print(f"\nfaulty endpoint: {len(preds2)} predictions from "
          f"{len(batches) - len(failures2)}/{len(batches)} batches")
    for failure in failures2:
        print(f"  excluded -> {failure.describe()}")

    print(f"\nprompt/response transcripts archived under {OUT / 'mock_run'}")
    print(f"wrote mock_predictions.csv -> {OUT}")


if __name__ == "__main__":
    main()
