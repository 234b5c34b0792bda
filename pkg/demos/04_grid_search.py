"""Cross-validated grid search over a small hyperparameter grid.

Uses a 2x2 grid with 3 folds to stay fast; swap in
config/gridsearch.toml via the CLI for the full 162-point sweep.
"""

from pathlib import Path

from collabel import tfidf
from collabel.gbt import expand_grid, grid_search, save_cv_table
from collabel.records import CollegeMapping, assign_colleges, load_dataset
from collabel.text import build_document, load_stopwords

HERE = Path(__file__).parent
OUT = HERE / "output"

GRID = {"max_depth": [2, 4], "num_round": [20, 40]}
DEFAULTS = {"eta": 0.3, "gamma": 0.0, "subsample": 1.0, "lambda": 1.0}


def main():
    OUT.mkdir(exist_ok=True)
    dataset = load_dataset(HERE / "data" / "theses.jsonl")
    mapping = CollegeMapping.from_file(HERE / "data" / "colleges.json")
    labeled = assign_colleges(dataset, mapping)
    stopwords = load_stopwords()

    records = labeled.labeled()
    docs = [build_document(r, stopwords) for r in records]
    labels = [r.college for r in records]
    vocab = tfidf.fit(docs)
    matrix = tfidf.transform(docs, vocab)

    points = expand_grid(GRID)
    print(f"grid: {GRID}")
    print(f"{len(points)} configurations x 3 folds = {len(points) * 3} trainings\n")

    best, table = grid_search(matrix, labels, GRID, folds=3, seed=0, defaults=DEFAULTS)

    header = list(table[0])
    print("  ".join(f"{h:>12}" for h in header))
    for row in table:
        print("  ".join(
            f"{row[h]:>12.4f}" if isinstance(row[h], float) else f"{row[h]:>12}"
            for h in header
        ))

    print(f"\nbest configuration (lowest mean log-loss): "
          f"max_depth={best.max_depth} num_round={best.num_round}")

    save_cv_table(table, OUT / "cv_table.csv")
    print(f"wrote cv_table.csv -> {OUT}")


if __name__ == "__main__":
    main()
