"""Drive every pipeline stage over a synthetic feed in a temp directory.

Same thing the CLI does, minus the argument parsing: filter the corpus,
label each record, aggregate daily rates, and fit topics over the
disclosing subset. Stages communicate only through files in the output
directory, so each one can be re-run in isolation.
"""

import datetime as dt
import json
import random
import tempfile
from pathlib import Path

from disclosure.config import AnalysisWindow, RunConfig
from disclosure.pipeline import run_detect, run_filter, run_timeseries, run_topics

DISCLOSING = [
    "I live in Pennsylvania.",
    "I was diagnosed with pneumonia.",
    "I feel terrible today.",
    "I tested positive for covid this morning.",
]
PLAIN = [
    "The governor announced new rules today.",
    "Cases in New York doubled this week.",
    "Stay home and wash your hands.",
    "Grocery stores limit customers now.",
]


def build_feed(path: Path) -> None:
    rng = random.Random(11)
    start = dt.date(2020, 3, 1)
    with open(path, "w", encoding="utf-8") as out:
        rid = 0
        for d in range(14):
            day = start + dt.timedelta(days=d)
            disclosing_today = 4 if d < 7 else 9  # rate steps 0.2 -> 0.45
            for i in range(20):
                rid += 1
                pool = DISCLOSING if i < disclosing_today else PLAIN
                obj = {
                    "id": f"r{rid:04d}",
                    "created_at": f"{day.isoformat()}T12:00:00Z",
                    "text": rng.choice(pool) + " corona",
                    "lang": "en",
                }
                out.write(json.dumps(obj) + "\n")


with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    corpus = root / "corpus.ndjson"
    build_feed(corpus)

    cfg = RunConfig(
        inputs=[corpus],
        output_dir=root / "out",
        windows=[
            AnalysisWindow("week1", dt.date(2020, 3, 1), dt.date(2020, 3, 7)),
            AnalysisWindow("week2", dt.date(2020, 3, 8), dt.date(2020, 3, 14)),
        ],
        subset="disclosing",
        lda_k=2,
        lda_iterations=100,
        lda_seed=9,
    )

    stats = run_filter(cfg)
    print(f"filter:     kept {stats.retained}/{stats.total_read}")

    labeled = run_detect(cfg)
    print(f"detect:     labeled {labeled} records")

    series = run_timeseries(cfg)
    print(f"timeseries: {len(series.entries)} days")

    model = run_topics(cfg)
    print(f"topics:     k={model.k} over {len(model.kept_indices)} disclosing records")

    print("\noutput files:")
    for path in sorted((root / "out").iterdir()):
        print(f"  {path.name} ({path.stat().st_size} bytes)")

    print("\ntimeseries report:")
    print((root / "out" / "timeseries_report.txt").read_text(encoding="utf-8"))
