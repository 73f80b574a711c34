"""Precision/recall/F1 scoring of the detector against hand-labeled records."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .config import ConfigError


@dataclass(frozen=True, slots=True)
class GoldRecord:
    id: str
    text: str
    gold_disclosing: bool


def load_gold(path: str | Path) -> list[GoldRecord]:
    """Read a gold TSV: id <TAB> label in {0,1} <TAB> text."""
    records: list[GoldRecord] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t", 2)
        if len(parts) != 3:
            raise ConfigError(f"{path}:{lineno}: expected 'id<TAB>label<TAB>text'")
        rid, label, text = parts
        if label not in ("0", "1"):
            raise ConfigError(f"{path}:{lineno}: label must be 0 or 1, got {label!r}")
        if rid in seen:
            raise ConfigError(f"{path}:{lineno}: duplicate id {rid!r}")
        seen.add(rid)
        records.append(GoldRecord(id=rid, text=text, gold_disclosing=label == "1"))
    if not records:
        raise ConfigError(f"{path}: gold file has no records")
    return records


@dataclass
class EvalReport:
    """Confusion counts with derived metrics; metrics are None when their
    denominator is zero."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def add(self, gold: bool, predicted: bool) -> None:
        if gold and predicted:
            self.tp += 1
        elif not gold and predicted:
            self.fp += 1
        elif gold and not predicted:
            self.fn += 1
        else:
            self.tn += 1

    def merge(self, other: "EvalReport") -> "EvalReport":
        return EvalReport(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def gold_positives(self) -> int:
        return self.tp + self.fn

    @property
    def gold_negatives(self) -> int:
        return self.fp + self.tn

    @property
    def precision(self) -> float | None:
        denom = self.tp + self.fp
        return self.tp / denom if denom else None

    @property
    def recall(self) -> float | None:
        denom = self.tp + self.fn
        return self.tp / denom if denom else None

    @property
    def f1(self) -> float | None:
        p, r = self.precision, self.recall
        if p is None or r is None or p + r == 0:
            return None
        return 2 * p * r / (p + r)

    def as_kv(self) -> str:
        def fmt(x: float | None) -> str:
            return "undefined" if x is None else repr(x)

        return (
            f"records = {self.total}\n"
            f"gold_positives = {self.gold_positives}\n"
            f"gold_negatives = {self.gold_negatives}\n"
            f"tp = {self.tp}\n"
            f"fp = {self.fp}\n"
            f"fn = {self.fn}\n"
            f"tn = {self.tn}\n"
            f"precision = {fmt(self.precision)}\n"
            f"recall = {fmt(self.recall)}\n"
            f"f1 = {fmt(self.f1)}\n"
        )

    def as_csv(self) -> str:
        def fmt(x: float | None) -> str:
            return "" if x is None else repr(x)

        header = "records,gold_positives,gold_negatives,tp,fp,fn,tn,precision,recall,f1"
        row = (
            f"{self.total},{self.gold_positives},{self.gold_negatives},"
            f"{self.tp},{self.fp},{self.fn},{self.tn},"
            f"{fmt(self.precision)},{fmt(self.recall)},{fmt(self.f1)}"
        )
        return header + "\n" + row + "\n"


def score(gold: list[GoldRecord], detector) -> EvalReport:
    """Run the full normalize-and-detect path over every gold record."""
    if not gold:
        raise ConfigError("gold record list is empty")
    report = EvalReport()
    for record in gold:
        label = detector.detect_text(record.text)
        report.add(record.gold_disclosing, label.disclosing)
    return report
