"""File-coupled pipeline stages.

Each stage reads files named by convention inside the run's output directory
(or the configured inputs for the first stage), writes its own outputs, and
can be re-run in isolation. A lockfile serializes commands per output
directory. Stage outputs are deterministic: re-running a stage on the same
inputs and seed reproduces its files byte for byte.
"""

from __future__ import annotations

import contextlib
import datetime as dt
import json
import multiprocessing
import os
import sys
import time
from pathlib import Path
from typing import Iterable, Iterator

from .config import ConfigError, RunConfig
from .detect import Detector
from .evaluate import load_gold, score
from .ingest import CorpusStats, FilterConfig, filter_lines, parse_record
from .lda import fit_lda, load_stopwords, preprocess_for_lda, top_terms, topic_prevalence
from .lexicon import Lexicon
from .normalize import Normalizer
from .series import (
    DailySeries,
    daily_rates,
    mean_shift_changepoint,
    period_average,
    write_daily_csv,
)

FILTERED_NAME = "filtered.ndjson"
FILTER_STATS_NAME = "filter_stats.txt"
LABELS_NAME = "labels.ndjson"
DAILY_CSV_NAME = "daily.csv"
TIMESERIES_REPORT_NAME = "timeseries_report.txt"
EVAL_TXT_NAME = "eval_report.txt"
EVAL_CSV_NAME = "eval_report.csv"
LOCK_NAME = ".lock"

_DETECT_CHUNK = 512


class LockError(Exception):
    """Another command is already running against this output directory."""


@contextlib.contextmanager
def output_lock(output_dir: Path) -> Iterator[None]:
    output_dir.mkdir(parents=True, exist_ok=True)
    lock_path = output_dir / LOCK_NAME
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise LockError(
            f"lockfile {lock_path} exists; another command may be running "
            "(delete it if that command crashed)"
        ) from None
    try:
        os.write(fd, f"pid {os.getpid()}\n".encode())
        os.close(fd)
        yield
    finally:
        with contextlib.suppress(FileNotFoundError):
            lock_path.unlink()


class _Progress:
    def __init__(self, stage: str, interval: int) -> None:
        self.stage = stage
        self.interval = max(1, interval)
        self.count = 0
        self.started = time.monotonic()

    def tick(self, n: int = 1) -> None:
        before = self.count
        self.count += n
        if before // self.interval != self.count // self.interval:
            elapsed = time.monotonic() - self.started
            rate = self.count / elapsed if elapsed > 0 else 0.0
            print(
                f"[{self.stage}] {self.count} records, {rate:.0f}/s",
                file=sys.stderr,
                flush=True,
            )

    def done(self) -> None:
        elapsed = time.monotonic() - self.started
        rate = self.count / elapsed if elapsed > 0 else 0.0
        print(
            f"[{self.stage}] finished: {self.count} records in {elapsed:.1f}s ({rate:.0f}/s)",
            file=sys.stderr,
            flush=True,
        )


def _input_lines(paths: Iterable[Path]) -> Iterator[str]:
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            yield from fh


def build_detector(cfg: RunConfig) -> Detector:
    tables = cfg.table_paths
    lexicon = Lexicon(
        verbs_path=tables.get("verbs"),
        irregular_path=tables.get("irregular_verbs"),
        adverbs_path=tables.get("adverbs"),
        auxiliaries_path=tables.get("auxiliaries"),
    )
    normalizer = Normalizer(
        contractions_path=tables.get("contractions"),
        replacements_path=tables.get("replacements"),
    )
    return Detector(
        rules_path=tables.get("dictionaries"),
        gazetteers_path=tables.get("gazetteers"),
        lexicon=lexicon,
        normalizer=normalizer,
        window=cfg.triplet_window,
        self_reference=cfg.self_reference,
    )


def run_filter(cfg: RunConfig) -> CorpusStats:
    """Keep original-content records; write them plus rule-level statistics."""
    if not cfg.inputs:
        raise ConfigError("filter needs at least one 'input' path")
    filter_cfg = (
        FilterConfig.from_file(cfg.filter_config) if cfg.filter_config else FilterConfig()
    )
    stats = CorpusStats()
    progress = _Progress("filter", cfg.progress_interval)
    with output_lock(cfg.output_dir):
        out_path = cfg.output_dir / FILTERED_NAME
        with open(out_path, "w", encoding="utf-8") as out:
            for raw, _record in filter_lines(_input_lines(cfg.inputs), filter_cfg, stats):
                out.write(raw if raw.endswith("\n") else raw + "\n")
                progress.tick()
        stats.check_identity()
        (cfg.output_dir / FILTER_STATS_NAME).write_text(stats.as_kv(), encoding="utf-8")
    progress.done()
    return stats


def _detect_input(cfg: RunConfig) -> list[Path]:
    filtered = cfg.output_dir / FILTERED_NAME
    if filtered.exists():
        return [filtered]
    if not cfg.inputs:
        raise ConfigError("detect needs a prior filter run or explicit 'input' paths")
    return cfg.inputs


_WORKER_DETECTOR: Detector | None = None


def _detect_worker_init(cfg: RunConfig) -> None:
    global _WORKER_DETECTOR
    _WORKER_DETECTOR = build_detector(cfg)


def _detect_chunk(lines: list[str]) -> list[str]:
    detector = _WORKER_DETECTOR
    assert detector is not None
    out = []
    for line in lines:
        if not line.strip():
            continue
        record = parse_record(line)
        out.append(detector.label_line(record.id, record.text))
    return out


def _chunks(lines: Iterable[str], size: int) -> Iterator[list[str]]:
    chunk: list[str] = []
    for line in lines:
        chunk.append(line)
        if len(chunk) >= size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def run_detect(cfg: RunConfig) -> int:
    """Label every record; byte-identical output for any worker count."""
    inputs = _detect_input(cfg)
    progress = _Progress("detect", cfg.progress_interval)
    written = 0
    with output_lock(cfg.output_dir):
        out_path = cfg.output_dir / LABELS_NAME
        with open(out_path, "w", encoding="utf-8") as out:
            if cfg.jobs <= 1:
                _detect_worker_init(cfg)
                for chunk in _chunks(_input_lines(inputs), _DETECT_CHUNK):
                    for line in _detect_chunk(chunk):
                        out.write(line + "\n")
                        written += 1
                    progress.tick(len(chunk))
            else:
                ctx = multiprocessing.get_context("fork")
                with ctx.Pool(
                    processes=cfg.jobs,
                    initializer=_detect_worker_init,
                    initargs=(cfg,),
                ) as pool:
                    results = pool.imap(
                        _detect_chunk, _chunks(_input_lines(inputs), _DETECT_CHUNK)
                    )
                    for labeled in results:
                        for line in labeled:
                            out.write(line + "\n")
                            written += 1
                        progress.tick(len(labeled))
    progress.done()
    return written


def _load_labeled_records(cfg: RunConfig) -> Iterator[tuple[dt.date, bool, str, str]]:
    """Join filtered records with their labels by position, checking ids.

    Yields (UTC day, disclosing, id, text) per record.
    """
    records_path = cfg.output_dir / FILTERED_NAME
    labels_path = cfg.output_dir / LABELS_NAME
    if not records_path.exists():
        raise ConfigError(f"missing {records_path}; run the filter stage first")
    if not labels_path.exists():
        raise ConfigError(f"missing {labels_path}; run the detect stage first")
    with open(records_path, encoding="utf-8") as rf, open(labels_path, encoding="utf-8") as lf:
        for raw, label_line in zip(rf, lf):
            if not raw.strip():
                continue
            record = parse_record(raw)
            label = json.loads(label_line)
            if label["id"] != record.id:
                raise ConfigError(
                    f"label/record id mismatch ({label['id']!r} vs {record.id!r}); "
                    "re-run the detect stage"
                )
            yield record.created_at.date(), bool(label["disclosing"]), record.id, record.text


def _window_range(cfg: RunConfig, window_name: str | None):
    if window_name is None:
        return None
    for window in cfg.windows:
        if window.name == window_name:
            return window
    raise ConfigError(f"window {window_name!r} not defined in the config")


def run_timeseries(cfg: RunConfig, window_name: str | None = None) -> DailySeries:
    """Daily rate CSV plus changepoint and per-window period averages."""
    window = _window_range(cfg, window_name)
    with output_lock(cfg.output_dir):
        flags = (
            (day, disclosing)
            for day, disclosing, _id, _text in _load_labeled_records(cfg)
            if window is None or window.start <= day <= window.end
        )
        series = daily_rates(flags)
        if not series.entries:
            raise ConfigError("no labeled records in range; nothing to aggregate")
        write_daily_csv(series, cfg.output_dir / DAILY_CSV_NAME)
        lines = []
        if len(series.entries) >= 4:
            date, pre_mean, post_mean = mean_shift_changepoint(series)
            lines.append(f"changepoint_date = {date.isoformat()}")
            lines.append(f"pre_mean = {pre_mean!r}")
            lines.append(f"post_mean = {post_mean!r}")
        else:
            lines.append("changepoint_date = undefined")
        for win in cfg.windows:
            try:
                avg = period_average(series, win.start, win.end)
                pooled = period_average(series, win.start, win.end, pooled=True)
            except ValueError:
                continue
            lines.append(f"window_{win.name}_average = {avg!r}")
            lines.append(f"window_{win.name}_pooled = {pooled!r}")
        (cfg.output_dir / TIMESERIES_REPORT_NAME).write_text(
            "\n".join(lines) + "\n", encoding="utf-8"
        )
    return series


def _subset_name(cfg: RunConfig, window_name: str | None) -> str:
    parts = [cfg.subset]
    if window_name:
        parts.append(window_name)
    return "_".join(parts)


def run_topics(cfg: RunConfig, window_name: str | None = None):
    """Fit LDA over the selected subset/window; write term CSV and archive."""
    if cfg.lda_seed is None:
        raise ConfigError("topics requires 'lda_seed' in the config (or --seed)")
    window = _window_range(cfg, window_name)
    stopwords = load_stopwords(cfg.table_paths.get("stopwords"))
    detector = build_detector(cfg)
    lexicon = detector.lexicon
    normalizer = detector.normalizer

    docs: list[list[str]] = []
    ids: list[str] = []
    with output_lock(cfg.output_dir):
        for day, disclosing, rec_id, text in _load_labeled_records(cfg):
            if window is not None and not (window.start <= day <= window.end):
                continue
            if cfg.subset == "disclosing" and not disclosing:
                continue
            if cfg.subset == "non-disclosing" and disclosing:
                continue
            docs.append(preprocess_for_lda(normalizer.normalize(text), stopwords, lexicon))
            ids.append(rec_id)
        if not docs:
            raise ConfigError("no records selected for topic modeling")
        model = fit_lda(
            docs,
            k=cfg.lda_k,
            alpha=cfg.lda_alpha,
            beta=cfg.lda_beta,
            iterations=cfg.lda_iterations,
            seed=cfg.lda_seed,
            doc_ids=ids,
        )
        name = _subset_name(cfg, window_name)
        model.save(cfg.output_dir / f"model_{name}.zip")
        prevalence = topic_prevalence(model)
        lines = ["topic,rank,term,probability,prevalence"]
        for topic in range(model.k):
            for rank, (term, prob) in enumerate(top_terms(model, topic, 10), start=1):
                lines.append(f"{topic},{rank},{term},{prob!r},{prevalence[topic]!r}")
        (cfg.output_dir / f"topics_{name}.csv").write_text(
            "\n".join(lines) + "\n", encoding="utf-8"
        )
    return model


def run_eval(cfg: RunConfig):
    """Score the detector against the configured gold TSV."""
    if cfg.gold is None:
        raise ConfigError("eval requires a 'gold' path in the config")
    gold = load_gold(cfg.gold)
    detector = build_detector(cfg)
    report = score(gold, detector)
    with output_lock(cfg.output_dir):
        (cfg.output_dir / EVAL_TXT_NAME).write_text(report.as_kv(), encoding="utf-8")
        (cfg.output_dir / EVAL_CSV_NAME).write_text(report.as_csv(), encoding="utf-8")
    return report
