"""Command-line front end: filter, detect, topics, timeseries, eval.

Every command takes --config pointing at a key=value run file; a few
settings can be overridden per invocation. Commands communicate only
through files in the configured output directory.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, RunConfig
from .pipeline import (
    LockError,
    run_detect,
    run_eval,
    run_filter,
    run_timeseries,
    run_topics,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_LOCKED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disclosure",
        description="Batch self-disclosure analytics over NDJSON corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="key=value run configuration file")
        return cmd

    add("filter", "keep original-content records; write filtered.ndjson + stats")

    detect = add("detect", "label records; write labels.ndjson")
    detect.add_argument("--jobs", type=int, help="worker processes (default from config)")

    topics = add("topics", "fit LDA over a subset/window; write topic CSV + model archive")
    topics.add_argument("--window", help="restrict to a named analysis window")
    topics.add_argument(
        "--subset",
        choices=["all", "disclosing", "non-disclosing"],
        help="record subset to model (default from config)",
    )
    topics.add_argument("--seed", type=int, help="RNG seed (required here or in config)")

    timeseries = add("timeseries", "daily rate CSV + changepoint report")
    timeseries.add_argument("--window", help="restrict to a named analysis window")

    add("eval", "score the detector against the configured gold TSV")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config)
        if getattr(args, "jobs", None) is not None:
            cfg.jobs = args.jobs
        if getattr(args, "subset", None) is not None:
            cfg.subset = args.subset
        if getattr(args, "seed", None) is not None:
            cfg.lda_seed = args.seed
        window = getattr(args, "window", None)

        if args.command == "filter":
            stats = run_filter(cfg)
            print(f"retained {stats.retained} of {stats.total_read} records")
        elif args.command == "detect":
            written = run_detect(cfg)
            print(f"labeled {written} records")
        elif args.command == "topics":
            model = run_topics(cfg, window)
            print(f"fitted {model.k} topics over {len(model.kept_indices)} documents")
        elif args.command == "timeseries":
            series = run_timeseries(cfg, window)
            print(f"aggregated {len(series.entries)} days")
        elif args.command == "eval":
            report = run_eval(cfg)
            print(report.as_kv(), end="")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOCKED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
