"""Tokenization and verb lemmatization shared by the detector and topic stage.

Lemmatization is deliberately lightweight: an irregular-form table plus
suffix stripping with e-restoration and un-doubling, validated against a
known-lemma list. No statistical tagger is involved, keeping the whole
detection path deterministic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .normalize import _resource_path, load_word_list

PLACEHOLDERS = frozenset({"emailid", "phonenumber"})
BE_FORMS = frozenset({"am", "is", "are", "was", "were", "be", "been", "being"})

# Words ending in -ly that the adverb heuristic must not skip.
_LY_EXCEPTIONS = frozenset({
    "family", "italy", "sicily", "reply", "rely", "supply", "apply", "imply",
    "multiply", "july", "ugly", "belly", "bully", "jelly", "rally", "lily",
    "holy", "silly", "ally", "butterfly", "fly", "tally", "early",
})

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:['’\-][A-Za-z0-9]+)*|[^\sA-Za-z0-9]")
_DIGITS_RE = re.compile(r"\d+")

KIND_WORD = "word"
KIND_NUMBER = "number"
KIND_PUNCT = "punctuation"
KIND_PLACEHOLDER = "placeholder"


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    lower: str
    index: int
    kind: str


def tokenize(sentence: str) -> list[Token]:
    """Split a normalized sentence into word/number/punctuation tokens.

    Hyphens and apostrophes inside alphanumeric runs stay in one token, so
    "covid-19" and "2020-03-11" survive as units.
    """
    tokens: list[Token] = []
    for i, match in enumerate(_TOKEN_RE.finditer(sentence)):
        surface = match.group(0)
        lower = surface.lower()
        if lower in PLACEHOLDERS:
            kind = KIND_PLACEHOLDER
        elif surface.isdigit():
            kind = KIND_NUMBER
        elif surface[0].isalnum():
            kind = KIND_WORD
        else:
            kind = KIND_PUNCT
        tokens.append(Token(surface, lower, i, kind))
    return tokens


def load_irregular_verbs(path: str | Path) -> dict[str, tuple[str, bool]]:
    table: dict[str, tuple[str, bool]] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        form, lemma, flag = line.split("\t")
        table[form] = (lemma, flag == "1")
    return table


class Lexicon:
    """Verb lemmas, irregular forms, and the skippable-token lists."""

    def __init__(
        self,
        verbs_path: str | Path | None = None,
        irregular_path: str | Path | None = None,
        adverbs_path: str | Path | None = None,
        auxiliaries_path: str | Path | None = None,
        extra_verbs: set[str] = frozenset(),
    ) -> None:
        self.verbs = set(load_word_list(verbs_path or _resource_path("verbs.txt")))
        self.verbs |= extra_verbs
        self.irregular = load_irregular_verbs(
            irregular_path or _resource_path("irregular_verbs.tsv")
        )
        self.adverbs = frozenset(
            load_word_list(adverbs_path or _resource_path("adverbs.txt"))
        )
        self.auxiliaries = frozenset(
            load_word_list(auxiliaries_path or _resource_path("auxiliaries.txt"))
        )
        # Skippability is tested before verbhood during the scan, so a token
        # listed both as auxiliary and verb lemma ("do") is simply skipped.
        self._lemma_cache: dict[str, str] = {}

    def is_adverb(self, lower: str) -> bool:
        if lower in self.adverbs:
            return True
        return len(lower) > 3 and lower.endswith("ly") and lower not in _LY_EXCEPTIONS

    def is_auxiliary(self, lower: str) -> bool:
        return lower in self.auxiliaries

    def _strip_candidates(self, stem: str) -> list[str]:
        out = [stem, stem + "e"]
        if len(stem) >= 2 and stem[-1] == stem[-2]:
            out.append(stem[:-1])
        return out

    def lemma(self, lower: str) -> str:
        cached = self._lemma_cache.get(lower)
        if cached is not None:
            return cached
        result = self._lemma(lower)
        self._lemma_cache[lower] = result
        return result

    def _lemma(self, word: str) -> str:
        if word in self.irregular:
            return self.irregular[word][0]
        if word in self.verbs:
            return word
        n = len(word)
        if word.endswith("ied") and n > 4:
            return word[:-3] + "y"
        if word.endswith("ed") and n > 3:
            stem = word[:-2]
            for cand in self._strip_candidates(stem):
                if cand in self.verbs:
                    return cand
            return stem
        if word.endswith("ing") and n > 4:
            stem = word[:-3]
            for cand in self._strip_candidates(stem):
                if cand in self.verbs:
                    return cand
            return stem
        if word.endswith("ies") and n > 4:
            return word[:-3] + "y"
        if word.endswith("es") and n > 3 and word[:-2].endswith(("ss", "sh", "ch", "x", "z", "o")):
            return word[:-2]
        if word.endswith("s") and n > 3 and not word.endswith(("ss", "us", "is")):
            return word[:-1]
        return word

    def is_verb(self, lower: str) -> bool:
        return self.lemma(lower) in self.verbs

    def is_participle(self, lower: str) -> bool:
        """Past-participle test used for passive-voice recognition."""
        entry = self.irregular.get(lower)
        if entry is not None:
            return entry[1]
        return lower.endswith("ed") and len(lower) > 3
