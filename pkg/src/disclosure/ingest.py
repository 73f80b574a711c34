"""Corpus ingestion: parse NDJSON records and keep only original user content.

A record survives filtering when it is not a repost or quote, not from a
verified or excluded account, matches the configured language, and (when a
keyword schedule is present) contains at least one keyword already active on
the record's UTC calendar date.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Iterator

from .config import ConfigError, parse_date, parse_kv_file

REJECTION_RULES = (
    "retweet_flag",
    "quote_flag",
    "rt_prefix",
    "verified",
    "excluded_handle",
    "language",
    "keyword_window",
)


class RecordParseError(Exception):
    """Raised when an NDJSON line cannot be turned into a TweetRecord."""


@dataclass(frozen=True, slots=True)
class TweetRecord:
    id: str
    created_at: dt.datetime
    text: str
    lang: str = "und"
    author_handle: str = ""
    author_verified: bool = False
    is_retweet: bool = False
    is_quote: bool = False


def _parse_timestamp(raw: str) -> dt.datetime:
    # Python 3.10 fromisoformat rejects a trailing 'Z'; normalize it first.
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        ts = dt.datetime.fromisoformat(raw)
    except ValueError as exc:
        raise RecordParseError(f"bad created_at timestamp: {raw!r}") from exc
    if ts.tzinfo is None:
        return ts.replace(tzinfo=dt.timezone.utc)
    return ts.astimezone(dt.timezone.utc)


def parse_record(line: str) -> TweetRecord:
    """Parse one NDJSON line.

    ``id``, ``created_at``, and ``text`` are required. Missing booleans
    default to false, missing ``lang`` to ``"und"``, missing handle to ``""``.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise RecordParseError("record is not a JSON object")
    for key in ("id", "created_at", "text"):
        if key not in obj or obj[key] is None:
            raise RecordParseError(f"missing required field {key!r}")
    if not isinstance(obj["text"], str) or not isinstance(obj["created_at"], str):
        raise RecordParseError("'text' and 'created_at' must be strings")
    return TweetRecord(
        id=str(obj["id"]),
        created_at=_parse_timestamp(obj["created_at"]),
        text=obj["text"],
        lang=str(obj.get("lang") or "und"),
        author_handle=str(obj.get("author_handle") or ""),
        author_verified=bool(obj.get("author_verified", False)),
        is_retweet=bool(obj.get("is_retweet", False)),
        is_quote=bool(obj.get("is_quote", False)),
    )


@dataclass(frozen=True)
class FilterConfig:
    """Exclusion settings plus the dated keyword schedule.

    ``keyword_schedule`` maps a lowercase keyword to the first UTC date on
    which it counts as a match. An empty schedule disables the keyword rule.
    """

    language: str = "en"
    excluded_handles: frozenset[str] = frozenset()
    keyword_schedule: dict[str, dt.date] = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str | Path) -> "FilterConfig":
        """Load from a key=value file.

        Repeatable keys: ``exclude_handle = WHO`` and
        ``keyword = 2020-01-28 wuhan`` (start date first, then the keyword,
        which may itself contain spaces).
        """
        kv = parse_kv_file(path)
        langs = kv.get("language", ["en"])
        if len(langs) > 1:
            raise ConfigError("key 'language' given more than once")
        schedule: dict[str, dt.date] = {}
        for spec in kv.get("keyword", []):
            date_part, _, word = spec.partition(" ")
            word = word.strip().lower()
            if not word:
                raise ConfigError(f"keyword must be 'YYYY-MM-DD TEXT', got {spec!r}")
            start = parse_date(date_part)
            if word in schedule and schedule[word] != start:
                raise ConfigError(f"keyword {word!r} scheduled twice with different dates")
            schedule[word] = start
        return cls(
            language=langs[0],
            excluded_handles=frozenset(h.lower() for h in kv.get("exclude_handle", [])),
            keyword_schedule=schedule,
        )


def in_keyword_window(record: TweetRecord, cfg: FilterConfig) -> bool:
    """True when any scheduled keyword is active and present (or no schedule)."""
    if not cfg.keyword_schedule:
        return True
    day = record.created_at.date()
    text = record.text.lower()
    for word, start in cfg.keyword_schedule.items():
        if start <= day and word in text:
            return True
    return False


def rejection_reason(record: TweetRecord, cfg: FilterConfig) -> str | None:
    """First matching exclusion rule, or None when the record is retained.

    Rules are checked in a fixed order so a record failing several is always
    attributed to the same one: repost flag, quote flag, repost text prefix,
    verified author, excluded handle, language, keyword window.
    """
    if record.is_retweet:
        return "retweet_flag"
    if record.is_quote:
        return "quote_flag"
    if record.text.startswith("RT @"):
        return "rt_prefix"
    if record.author_verified:
        return "verified"
    if record.author_handle and record.author_handle.lower() in cfg.excluded_handles:
        return "excluded_handle"
    if record.lang != cfg.language:
        return "language"
    if not in_keyword_window(record, cfg):
        return "keyword_window"
    return None


def is_original_content(record: TweetRecord, cfg: FilterConfig) -> bool:
    return rejection_reason(record, cfg) is None


@dataclass
class CorpusStats:
    """Counters for one filtering pass; merge partial passes with ``merge``."""

    total_read: int = 0
    parse_failures: int = 0
    retained: int = 0
    rejected: dict[str, int] = field(
        default_factory=lambda: {rule: 0 for rule in REJECTION_RULES}
    )

    def merge(self, other: "CorpusStats") -> "CorpusStats":
        merged = CorpusStats(
            total_read=self.total_read + other.total_read,
            parse_failures=self.parse_failures + other.parse_failures,
            retained=self.retained + other.retained,
        )
        for rule in REJECTION_RULES:
            merged.rejected[rule] = self.rejected[rule] + other.rejected[rule]
        return merged

    def check_identity(self) -> None:
        total = self.retained + self.parse_failures + sum(self.rejected.values())
        if total != self.total_read:
            raise ValueError(
                f"stats identity violated: {total} accounted for, {self.total_read} read"
            )

    def as_kv(self) -> str:
        lines = [
            f"total_read = {self.total_read}",
            f"parse_failures = {self.parse_failures}",
            f"retained = {self.retained}",
        ]
        lines += [f"rejected_{rule} = {self.rejected[rule]}" for rule in REJECTION_RULES]
        return "\n".join(lines) + "\n"


def filter_lines(
    lines: Iterable[str], cfg: FilterConfig, stats: CorpusStats
) -> Iterator[tuple[str, TweetRecord]]:
    """Yield (raw line, parsed record) for every retained record.

    Raw lines are passed through unmodified so the filtered corpus stays
    byte-identical to its source records. ``stats`` is updated in place.
    """
    for raw in lines:
        if not raw.strip():
            continue
        stats.total_read += 1
        try:
            record = parse_record(raw)
        except RecordParseError:
            stats.parse_failures += 1
            continue
        reason = rejection_reason(record, cfg)
        if reason is None:
            stats.retained += 1
            yield raw, record
        else:
            stats.rejected[reason] += 1


def read_records(path: str | Path) -> Iterator[TweetRecord]:
    """Parse an already-filtered NDJSON file, failing loudly on bad lines."""
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                yield parse_record(raw)
            except RecordParseError as exc:
                raise RecordParseError(f"{path}:{lineno}: {exc}") from exc


RECORD_FIELDS = tuple(f.name for f in fields(TweetRecord))
