"""Text cleanup for social-media posts.

``normalize`` applies, in order: encoding repair, leading repost-marker
removal, mention/hashtag removal, symbol-to-word replacement, e-mail and
phone placeholders, URL and pictograph removal, contraction expansion, and
whitespace cleanup. The result carries sentence spans for the detector.

The function is idempotent: feeding its output back in returns the same
string, which the property tests rely on.
"""

from __future__ import annotations

import html
import re
from dataclasses import dataclass
from importlib import resources as importlib_resources
from pathlib import Path


def _resource_path(name: str) -> Path:
    return Path(str(importlib_resources.files("disclosure") / "resources" / name))


def load_pair_table(path: str | Path) -> dict[str, str]:
    """Load a two-column TSV; '#' lines are comments."""
    table: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, _, value = line.partition("\t")
        table[key] = value.strip()
    return table


def load_word_list(path: str | Path) -> list[str]:
    words = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            words.append(line)
    return words


# Signatures of UTF-8 bytes mis-decoded as a single-byte codepage.
_MOJIBAKE_MARKERS = ("Ã", "â€", "Â", "ðŸ")
_ENTITY_RE = re.compile(r"&(?:#\d+|#x[0-9a-fA-F]+|[a-zA-Z]+);")
_RT_RE = re.compile(r"^\s*RT\s+@\w+:?\s*")
_MENTION_RE = re.compile(r"(?<!\w)@\w+")
_HASHTAG_RE = re.compile(r"(?<!\w)#\w+")
_EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)+")
# 7+ digits separated by at most two of space ( ) . - between neighbors
_PHONE_RE = re.compile(r"\+?\(?\d(?:[\s().\-]{0,2}\d){6,}")
_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_EMOJI_RE = re.compile(
    "["
    "\U0001f000-\U0001fbff"
    "☀-➿"
    "⬀-⯿"
    "←-⇿"
    "︎️‍"
    "]+"
)
_RESPACE_RE = re.compile(r"([A-Za-z][.!?]+)(?=[A-Za-z])")
_WS_RE = re.compile(r"\s+")
_SENTENCE_END_RE = re.compile(r"[.!?]+(?=\s|$)")
_DIGIT_RE = re.compile(r"\d")
# Rewrites only ever shrink the budget of special characters, so the pass
# sequence reaches a fixpoint almost immediately; the cap is a safety net.
_MAX_PASSES = 6


@dataclass(frozen=True)
class NormalizedText:
    text: str
    sentences: list[tuple[int, int]]
    replacements_applied: list[str]


def _repair_encoding(text: str) -> str:
    """Re-decode UTF-8 bytes that were read as cp1252/latin-1.

    Gated on marker sequences so clean accented text is never touched;
    looped because double-encoded input needs two passes. Strings the
    round-trip cannot fix are passed through unchanged.
    """
    for _ in range(3):
        if not any(marker in text for marker in _MOJIBAKE_MARKERS):
            return text
        for codec in ("cp1252", "latin-1"):
            try:
                repaired = text.encode(codec).decode("utf-8")
                break
            except (UnicodeEncodeError, UnicodeDecodeError):
                repaired = None
        if repaired is None or repaired == text:
            return text
        text = repaired
    return text


class Normalizer:
    """Compiled cleanup pipeline; build once, call for every record."""

    def __init__(
        self,
        contractions_path: str | Path | None = None,
        replacements_path: str | Path | None = None,
    ) -> None:
        self.contractions = load_pair_table(
            contractions_path or _resource_path("contractions.tsv")
        )
        self.replacements = load_pair_table(
            replacements_path or _resource_path("replacements.tsv")
        )
        for symbol in self.replacements:
            if len(symbol) != 1 or symbol.isalnum():
                raise ValueError(f"replacement table keys must be single symbols: {symbol!r}")
        # Longest alternative first so "wouldn't" beats "would"; both ASCII
        # and right-quote apostrophes are accepted in the match.
        keys = sorted(self.contractions, key=len, reverse=True)
        alt = "|".join(re.escape(k).replace("'", "['’]") for k in keys)
        self._contraction_re = re.compile(
            rf"(?<![\w'’])(?:{alt})(?![\w'’])", re.IGNORECASE
        )
        self._symbol_re = re.compile(
            "[" + re.escape("".join(self.replacements)) + "]"
        )

    def _expand_contraction(self, match: re.Match) -> str:
        hit = match.group(0)
        expansion = self.contractions[hit.lower().replace("’", "'")]
        if hit.isupper() and len(hit) > 2:
            return expansion.upper()
        if hit[0].isupper():
            return expansion[0].upper() + expansion[1:]
        return expansion

    def normalize(self, raw: str) -> NormalizedText:
        """Run the cleanup passes until the text stops changing.

        One pass is not enough on adversarial input: a later rewrite can
        strand a pattern an earlier rule handles (an e-mail eating into a
        glued mention, a removed URL joining two digit runs), so the pass
        repeats until stable. Clean text exits after a single pass.
        """
        applied: list[str] = []
        text = raw
        for _ in range(_MAX_PASSES):
            new = self._pass(text, applied)
            if new == text:
                break
            text = new
        seen: set[str] = set()
        applied = [a for a in applied if not (a in seen or seen.add(a))]
        return NormalizedText(text=text, sentences=_sentence_spans(text), replacements_applied=applied)

    def _pass(self, text: str, applied: list[str]) -> str:
        def step(name: str, new: str, old: str) -> str:
            if new != old:
                applied.append(name)
            return new
        if any(marker in text for marker in _MOJIBAKE_MARKERS):
            text = step("encoding", _repair_encoding(text), text)
        if "&" in text:
            text = step("entities", _ENTITY_RE.sub(lambda m: html.unescape(m.group(0)), text), text)
        if text.lstrip().startswith("RT"):
            while True:
                stripped = _RT_RE.sub("", text)
                if stripped == text:
                    break
                text = step("repost_marker", stripped, text)
        if "@" in text:
            # E-mail addresses survive: their "@" is preceded by a word char.
            text = step("mentions", _MENTION_RE.sub(" ", text), text)
        if "#" in text:
            text = step("hashtags", _HASHTAG_RE.sub(" ", text), text)
        if any(symbol in text for symbol in self.replacements):
            text = step(
                "symbols",
                self._symbol_re.sub(lambda m: f" {self.replacements[m.group(0)]} ", text),
                text,
            )
        if "@" in text:
            text = step("email", _EMAIL_RE.sub(" emailid ", text), text)
        if _DIGIT_RE.search(text):
            text = step("phone", _PHONE_RE.sub(" phonenumber ", text), text)
        if "http" in text or "www." in text.lower() or "HTTP" in text:
            text = step("urls", _URL_RE.sub(" ", text), text)
        if not text.isascii():
            text = step("pictographs", _EMOJI_RE.sub(" ", text), text)
        if "'" in text or "’" in text:
            text = step("contractions", self._contraction_re.sub(self._expand_contraction, text), text)
        text = step("respace", _RESPACE_RE.sub(r"\1 ", text), text)
        text = step("whitespace", _WS_RE.sub(" ", text).strip(), text)
        return text

    __call__ = normalize


def _sentence_spans(text: str) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    start = 0
    n = len(text)

    def push(start: int, end: int) -> None:
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if end > start:
            spans.append((start, end))

    for match in _SENTENCE_END_RE.finditer(text):
        push(start, match.end())
        start = match.end()
    push(start, n)
    return spans


def split_sentences(nt: NormalizedText) -> list[tuple[int, int]]:
    """Sentence spans of normalized text; identical to ``nt.sentences``."""
    return _sentence_spans(nt.text)
