"""Score prediction files and emit the side-by-side comparison report.

Reads the prediction CSVs produced by demos 03 and 05 (and regenerates
them by running those demos if they are missing).
"""

import runpy

from pathlib import Path

from collabel.evalreport import emit_report, read_predictions, sample_summary

HERE = Path(__file__).parent
OUT = HERE / "output"


def ensure_inputs():
    wanted = {
        OUT / "gbt_predictions.csv": HERE / "03_train_and_evaluate.py",
        OUT / "mock_predictions.csv": HERE / "05_mock_chat_run.py",
    }
    for path, producer in wanted.items():
        if not path.exists():
            print(f"{path.name} missing; running {producer.name} first\n")
            runpy.run_path(str(producer), run_name="__main__")
            print()


def main():
    OUT.mkdir(exist_ok=True)
    ensure_inputs()

    reports = []
    for name in ("gbt_predictions.csv", "mock_predictions.csv"):
        preds = read_predictions(OUT / name)
        for model in preds.models():
            report = sample_summary(preds.for_model(model))
            reports.append(report)
            spread = "" if report.single_sample else f" +/- {report.std_accuracy:.3f}"
            print(f"{report.model}: overall {report.overall:.3f}, "
                  f"mean over samples {report.mean_accuracy:.3f}{spread}")

    for fmt, filename in (
        ("markdown", "comparison.md"),
        ("csv", "comparison.csv"),
        ("plotdata", "comparison_plotdata.csv"),
    ):
        emit_report(reports, fmt, OUT / filename)
        print(f"wrote {filename}")

    print("\n" + (OUT / "comparison.md").read_text(), end="")


if __name__ == "__main__":
    main()
