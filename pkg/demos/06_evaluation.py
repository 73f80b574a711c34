"""Score the detector against a small hand-labeled sample."""

from disclosure.detect import Detector
from disclosure.evaluate import GoldRecord, score

GOLD = [
    GoldRecord("a1", "I live in Pennsylvania.", True),
    GoldRecord("a2", "I was diagnosed with pneumonia.", True),
    GoldRecord("a3", "I feel terrible today.", True),
    GoldRecord("a4", "I am in Wuhan right now.", True),   # a known hard miss
    GoldRecord("a5", "Cases in New York doubled.", False),
    GoldRecord("a6", "Stay home and wash your hands.", False),
    GoldRecord("a7", "The governor spoke at noon.", False),
]

report = score(GOLD, Detector())
print(report.as_kv())
