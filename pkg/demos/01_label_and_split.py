"""Walk through record loading, college labeling, and a stratified split."""

from pathlib import Path

from collabel.records import (
    CollegeMapping,
    SplitSpec,
    assign_colleges,
    class_distribution,
    load_dataset,
    save_dataset,
    split,
)

HERE = Path(__file__).parent
OUT = HERE / "output"


def main():
    OUT.mkdir(exist_ok=True)

    dataset = load_dataset(HERE / "data" / "theses.jsonl")
    print(f"loaded {len(dataset)} records from {dataset.provenance.source}")

    mapping = CollegeMapping.from_file(HERE / "data" / "colleges.json")
    print(f"mapping covers {len(mapping.colleges)} colleges: {', '.join(mapping.colleges)}")

    labeled = assign_colleges(dataset, mapping)
    print("\nclass distribution after labeling:")
    for college, count in sorted(class_distribution(labeled).items()):
        print(f"  {college:>8}  {count}")

    # records whose department is unknown (or absent) get the sentinel label
    sentinel = [r.id for r in labeled if r.college == "missing"]
    print(f"\nrecords labeled 'missing': {sentinel}")

    spec = SplitSpec(seed=7, train_fraction=0.8, stratified=True)
    train_set, holdout = split(labeled, spec)
    print(f"\nstratified 80/20 split (seed {spec.seed}): "
          f"{len(train_set)} train / {len(holdout)} holdout")
    print("every college appears on both sides:")
    for college in mapping.colleges:
        n_train = sum(r.college == college for r in train_set)
        n_hold = sum(r.college == college for r in holdout)
        print(f"  {college:>8}  train={n_train:<3} holdout={n_hold}")

    save_dataset(labeled, OUT / "labeled.jsonl")
    save_dataset(train_set, OUT / "train.jsonl")
    save_dataset(holdout, OUT / "holdout.jsonl")
    print(f"\nwrote labeled.jsonl, train.jsonl, holdout.jsonl -> {OUT}")


if __name__ == "__main__":
    main()
