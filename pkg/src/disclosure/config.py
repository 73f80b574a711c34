"""Key-value configuration files for pipeline runs.

Format: one ``key = value`` pair per line, ``#`` starts a comment, blank
lines are ignored. Keys may repeat (lists are order-preserving).
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(Exception):
    """Raised for malformed or inconsistent configuration input."""


def parse_kv_file(path: str | Path) -> dict[str, list[str]]:
    """Parse a key=value file into {key: [values in file order]}."""
    out: dict[str, list[str]] = {}
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        out.setdefault(key.strip(), []).append(value.strip())
    return out


def parse_date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError as exc:
        raise ConfigError(f"invalid ISO-8601 date: {text!r}") from exc


def _one(values: dict[str, list[str]], key: str, default: str | None = None) -> str | None:
    got = values.get(key)
    if not got:
        return default
    if len(got) > 1:
        raise ConfigError(f"key {key!r} given {len(got)} times, expected once")
    return got[0]


@dataclass(frozen=True)
class AnalysisWindow:
    name: str
    start: dt.date
    end: dt.date


@dataclass
class RunConfig:
    """Settings for one pipeline run, loaded from a key=value file.

    Keys (see README for the full reference)::

        input = corpus.ndjson            # repeatable
        output_dir = out/
        filter_config = filter.cfg
        gold = gold.tsv                  # eval input
        window = name 2020-01-21 2020-03-11   # repeatable
        subset = all | disclosing | non-disclosing
        lda_k = 6
        lda_alpha = 0.5                  # default 50/K
        lda_beta = 0.01
        lda_iterations = 1000
        lda_seed = 7                     # required for the topics stage
        self_reference = all | singular
        triplet_window = 6
        jobs = 1
        progress_interval = 100000

    Table paths (``dictionaries``, ``gazetteers``, ``contractions``,
    ``replacements``, ``stopwords``, ``verbs``, ``irregular_verbs``,
    ``adverbs``) default to the packaged resources when omitted.
    """

    inputs: list[Path]
    output_dir: Path
    filter_config: Path | None = None
    gold: Path | None = None
    windows: list[AnalysisWindow] = field(default_factory=list)
    subset: str = "all"
    lda_k: int = 6
    lda_alpha: float | None = None
    lda_beta: float = 0.01
    lda_iterations: int = 1000
    lda_seed: int | None = None
    self_reference: str = "all"
    triplet_window: int = 6
    jobs: int = 1
    progress_interval: int = 100_000
    table_paths: dict[str, Path] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        base = Path(path).parent
        kv = parse_kv_file(path)

        def resolve(p: str) -> Path:
            q = Path(p)
            return q if q.is_absolute() else base / q

        inputs = [resolve(p) for p in kv.get("input", [])]
        out_dir = _one(kv, "output_dir")
        if out_dir is None:
            raise ConfigError("missing required key 'output_dir'")

        windows = []
        for spec in kv.get("window", []):
            parts = spec.split()
            if len(parts) != 3:
                raise ConfigError(f"window must be 'NAME START END', got {spec!r}")
            start, end = parse_date(parts[1]), parse_date(parts[2])
            if start > end:
                raise ConfigError(f"window {parts[0]!r}: start {start} after end {end}")
            windows.append(AnalysisWindow(parts[0], start, end))

        subset = _one(kv, "subset", "all")
        if subset not in ("all", "disclosing", "non-disclosing"):
            raise ConfigError(f"subset must be all|disclosing|non-disclosing, got {subset!r}")
        self_ref = _one(kv, "self_reference", "all")
        if self_ref not in ("all", "singular"):
            raise ConfigError(f"self_reference must be all|singular, got {self_ref!r}")

        def num(key: str, cast, default):
            raw = _one(kv, key)
            if raw is None:
                return default
            try:
                return cast(raw)
            except ValueError as exc:
                raise ConfigError(f"key {key!r}: not a valid {cast.__name__}: {raw!r}") from exc

        table_paths = {}
        for key in ("dictionaries", "gazetteers", "contractions", "replacements",
                    "stopwords", "verbs", "irregular_verbs", "adverbs", "auxiliaries"):
            raw = _one(kv, key)
            if raw is not None:
                table_paths[key] = resolve(raw)

        fc = _one(kv, "filter_config")
        gold = _one(kv, "gold")
        cfg = cls(
            inputs=inputs,
            output_dir=resolve(out_dir),
            filter_config=resolve(fc) if fc else None,
            gold=resolve(gold) if gold else None,
            windows=windows,
            subset=subset,
            lda_k=num("lda_k", int, 6),
            lda_alpha=num("lda_alpha", float, None),
            lda_beta=num("lda_beta", float, 0.01),
            lda_iterations=num("lda_iterations", int, 1000),
            lda_seed=num("lda_seed", int, None),
            self_reference=self_ref,
            triplet_window=num("triplet_window", int, 6),
            jobs=num("jobs", int, 1),
            progress_interval=num("progress_interval", int, 100_000),
            table_paths=table_paths,
        )
        cfg.validate_paths()
        return cfg

    def validate_paths(self) -> None:
        """Every referenced input path must exist at load time."""
        missing = [p for p in self.inputs if not p.exists()]
        for p in (self.filter_config, self.gold):
            if p is not None and not p.exists():
                missing.append(p)
        missing.extend(p for p in self.table_paths.values() if not p.exists())
        if missing:
            listed = ", ".join(str(p) for p in missing)
            raise ConfigError(f"referenced path(s) do not exist: {listed}")
