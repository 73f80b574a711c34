"""Rule-based self-disclosure detection.

Three phases per sentence: subject-verb-object triplet extraction around
first-person pronouns (voice-aware), gazetteer/pattern entity recognition,
and matching against category dictionaries. Objective categories need a
nearby entity of the right type; subjective ones match on the verb alone.

Everything is table-driven and deterministic: same text and tables, same
label, byte for byte.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .config import ConfigError
from .lexicon import (
    BE_FORMS,
    KIND_NUMBER,
    KIND_PLACEHOLDER,
    KIND_PUNCT,
    Lexicon,
    Token,
    tokenize,
)
from .normalize import NormalizedText, Normalizer, _resource_path

PRONOUNS_ALL = frozenset({"i", "we", "me", "us", "my", "our", "myself", "ourselves"})
PRONOUNS_SINGULAR = frozenset({"i", "me", "my", "myself"})

# Verb particles absorbed into the verb span: "moved back", "reached out".
PARTICLES = frozenset({"up", "out", "down", "off", "away", "back", "over", "around"})

# Tokens that end the object span of a triplet.
CLAUSE_BOUNDARIES = frozenset({
    "and", "but", "or", "because", "so", "although", "though", "while",
    "whereas", "then", "when", "if", "after", "before", "until", "unless",
    "since",
})

VOICE_ACTIVE = "active"
VOICE_PASSIVE = "passive"

ENTITY_TYPES = (
    "LOCATION",
    "PERSON",
    "ORGANIZATION",
    "DATE",
    "CONTACT",
    "HEALTH_CONDITION",
)

_MONTHS = frozenset({
    "january", "february", "march", "april", "june", "july", "august",
    "september", "october", "november", "december", "jan", "feb", "mar",
    "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
})
_WEEKDAYS = frozenset({
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday",
})
_DEICTIC_DAYS = frozenset({"today", "tomorrow", "yesterday", "tonight"})
_ISO_DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}$")

_PRONOUN_HINT_RE = re.compile(
    r"\b(?:i|we|me|us|my|our|myself|ourselves)\b", re.IGNORECASE
)


@dataclass(frozen=True, slots=True)
class Triplet:
    subject: tuple[int, int]
    verb: tuple[int, int]
    object: tuple[int, int] | None
    voice: str
    verb_lemma: str


@dataclass(frozen=True, slots=True)
class EntitySpan:
    start: int
    end: int
    entity_type: str
    surface: str


@dataclass(frozen=True)
class CategoryRule:
    category: str
    subjectivity: str
    required_entity: str | None
    verbs: frozenset[str]
    window: int

    def __post_init__(self) -> None:
        if self.subjectivity == "objective" and self.required_entity is None:
            raise ConfigError(f"objective rule {self.category!r} needs a required entity")
        if self.subjectivity == "subjective" and self.required_entity is not None:
            raise ConfigError(f"subjective rule {self.category!r} cannot require an entity")


def load_rules(path: str | Path) -> list[CategoryRule]:
    rules: list[CategoryRule] = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ConfigError(f"{path}:{lineno}: expected 5 tab-separated fields")
        category, subjectivity, entity, verbs, window = parts
        if subjectivity not in ("objective", "subjective"):
            raise ConfigError(f"{path}:{lineno}: bad subjectivity {subjectivity!r}")
        if entity != "-" and entity not in ENTITY_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown entity type {entity!r}")
        rules.append(
            CategoryRule(
                category=category,
                subjectivity=subjectivity,
                required_entity=None if entity == "-" else entity,
                verbs=frozenset(v.strip() for v in verbs.split(",") if v.strip()),
                window=int(window),
            )
        )
    if not rules:
        raise ConfigError(f"{path}: no rules found")
    return rules


@dataclass(frozen=True)
class Evidence:
    sentence: int
    triplet: Triplet
    rule: CategoryRule
    entity: EntitySpan | None
    subject_text: str
    verb_text: str
    object_text: str | None

    def as_dict(self) -> dict:
        return {
            "sentence": self.sentence,
            "subject": self.subject_text,
            "verb": self.verb_text,
            "object": self.object_text,
            "voice": self.triplet.voice,
            "category": self.rule.category,
            "entity": self.entity.surface if self.entity else None,
            "entity_type": self.entity.entity_type if self.entity else None,
        }


@dataclass
class DisclosureLabel:
    disclosing: bool
    categories: set[str]
    evidence: list[Evidence]


def extract_triplets(tokens: list[Token], lexicon: Lexicon, window: int = 6,
                     pronouns: frozenset[str] = PRONOUNS_ALL) -> list[Triplet]:
    """Find subject-verb-object triplets anchored on first-person pronouns.

    Forward pattern: from pronoun P, skip adverbs/auxiliaries (be-forms are
    skipped but remembered for voice) for at most `window` tokens; the first
    remaining token yields a triplet iff it is a known verb. Passive is
    flagged for ⟨be-form + participle⟩. Backward pattern: "... V by P" marks
    P as the agent of participle V.
    """
    triplets: list[Triplet] = []
    n = len(tokens)
    for i, tok in enumerate(tokens):
        if tok.lower not in pronouns or tok.kind == KIND_PLACEHOLDER:
            continue
        forward = _scan_forward(tokens, i, lexicon, window)
        if forward is not None:
            triplets.append(forward)
        backward = _scan_backward(tokens, i, lexicon, window)
        if backward is not None:
            triplets.append(backward)
    triplets.sort(key=lambda t: (t.subject[0], t.verb[0]))
    return triplets


def _object_span(tokens: list[Token], start: int) -> tuple[int, int] | None:
    end = start
    n = len(tokens)
    while end < n:
        tok = tokens[end]
        if tok.kind == KIND_PUNCT or tok.lower in CLAUSE_BOUNDARIES:
            break
        end += 1
    return (start, end) if end > start else None


def _verb_span(tokens: list[Token], v: int) -> tuple[int, int]:
    end = v + 1
    n = len(tokens)
    while end < n and tokens[end].lower in PARTICLES:
        end += 1
    return (v, end)


def _scan_forward(tokens: list[Token], i: int, lexicon: Lexicon, window: int) -> Triplet | None:
    n = len(tokens)
    be_seen = False
    j = i + 1
    while j < n and j - i <= window:
        tok = tokens[j]
        if tok.kind in (KIND_PUNCT, KIND_NUMBER):
            return None
        lower = tok.lower
        if lower in BE_FORMS:
            be_seen = True
            j += 1
            continue
        if lexicon.is_auxiliary(lower) or lexicon.is_adverb(lower):
            j += 1
            continue
        if lexicon.is_verb(lower):
            verb = _verb_span(tokens, j)
            voice = VOICE_PASSIVE if be_seen and lexicon.is_participle(lower) else VOICE_ACTIVE
            return Triplet(
                subject=(i, i + 1),
                verb=verb,
                object=_object_span(tokens, verb[1]),
                voice=voice,
                verb_lemma=lexicon.lemma(lower),
            )
        return None
    return None


def _scan_backward(tokens: list[Token], i: int, lexicon: Lexicon, window: int) -> Triplet | None:
    # ⟨verb + "by" + pronoun⟩: the pronoun is the agent of a passive verb.
    if i < 2 or tokens[i - 1].lower != "by":
        return None
    j = i - 2
    while j >= 0 and (i - 1) - j <= window:
        tok = tokens[j]
        if tok.kind == KIND_PUNCT:
            return None
        lower = tok.lower
        if lexicon.is_adverb(lower) or lower in PARTICLES:
            j -= 1
            continue
        if lexicon.is_verb(lower) and lexicon.is_participle(lower):
            verb = _verb_span(tokens, j)
            return Triplet(
                subject=(i, i + 1),
                verb=verb,
                object=_object_span(tokens, verb[1]),
                voice=VOICE_PASSIVE,
                verb_lemma=lexicon.lemma(lower),
            )
        return None
    return None


class Gazetteer:
    """Longest-match surface lookup over one or more entity lexicons."""

    def __init__(self, path: str | Path | None = None) -> None:
        self._index: dict[str, list[tuple[tuple[str, ...], str]]] = {}
        self.load(path or _resource_path("gazetteers.tsv"))

    def load(self, path: str | Path) -> None:
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                entity_type, surface = line.split("\t")
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: expected 'TYPE<TAB>surface'") from exc
            if entity_type not in ENTITY_TYPES:
                raise ConfigError(f"{path}:{lineno}: unknown entity type {entity_type!r}")
            words = tuple(surface.lower().split())
            if not words:
                raise ConfigError(f"{path}:{lineno}: empty surface form")
            self._index.setdefault(words[0], []).append((words, entity_type))
        for candidates in self._index.values():
            candidates.sort(key=lambda c: (-len(c[0]), c[1]))

    def candidates(self, tokens: list[Token]) -> list[tuple[int, int, str]]:
        found: list[tuple[int, int, str]] = []
        n = len(tokens)
        index = self._index
        for i in range(n):
            matches = index.get(tokens[i].lower)
            if not matches:
                continue
            for words, entity_type in matches:
                end = i + len(words)
                if end <= n and all(
                    tokens[i + k].lower == words[k] for k in range(1, len(words))
                ):
                    found.append((i, end, entity_type))
        return found


def _date_candidates(tokens: list[Token]) -> list[tuple[int, int, str]]:
    found = []
    for tok in tokens:
        lower = tok.lower
        if (
            lower in _MONTHS
            or lower in _WEEKDAYS
            or lower in _DEICTIC_DAYS
            or (tok.kind == KIND_NUMBER and len(lower) == 4 and "1900" <= lower <= "2099")
            or _ISO_DATE_RE.fullmatch(lower)
        ):
            found.append((tok.index, tok.index + 1, "DATE"))
    return found


def recognize_entities(tokens: list[Token], gazetteer: Gazetteer) -> list[EntitySpan]:
    """Entity spans with overlaps resolved longest-first, then leftmost."""
    candidates = gazetteer.candidates(tokens)
    candidates.extend(_date_candidates(tokens))
    candidates.extend(
        (tok.index, tok.index + 1, "CONTACT")
        for tok in tokens
        if tok.kind == KIND_PLACEHOLDER
    )
    candidates.sort(key=lambda c: (-(c[1] - c[0]), c[0], c[2]))
    taken = [False] * len(tokens)
    spans: list[EntitySpan] = []
    for start, end, entity_type in candidates:
        if any(taken[start:end]):
            continue
        for k in range(start, end):
            taken[k] = True
        surface = " ".join(t.surface for t in tokens[start:end])
        spans.append(EntitySpan(start, end, entity_type, surface))
    spans.sort(key=lambda s: s.start)
    return spans


def _entity_distance(triplet: Triplet, span: EntitySpan) -> int:
    v_start, v_end = triplet.verb
    if span.start >= v_end:
        return span.start - v_end
    if span.end <= v_start:
        return v_start - span.end
    return 0


def match_rule(triplet: Triplet, entities: list[EntitySpan], rule: CategoryRule) -> EntitySpan | None | bool:
    """Entity satisfying the rule for this triplet; True for subjective hits,
    False when the rule does not match."""
    if triplet.verb_lemma not in rule.verbs:
        return False
    if rule.required_entity is None:
        return True
    obj = triplet.object
    best: tuple[int, int] | None = None
    best_span: EntitySpan | None = None
    for span in entities:
        if span.entity_type != rule.required_entity:
            continue
        if obj is not None and not (obj[0] <= span.start and span.end <= obj[1]):
            continue
        distance = _entity_distance(triplet, span)
        if distance > rule.window:
            continue
        key = (distance, span.start)
        if best is None or key < best:
            best = key
            best_span = span
    return best_span if best_span is not None else False


def classify(
    triplets: list[Triplet],
    entities: list[EntitySpan],
    rules: list[CategoryRule],
) -> list[tuple[Triplet, CategoryRule, EntitySpan | None]]:
    """All (triplet, rule, entity) matches for one sentence, in rule order."""
    matches = []
    for triplet in triplets:
        for rule in rules:
            hit = match_rule(triplet, entities, rule)
            if hit is False:
                continue
            matches.append((triplet, rule, None if hit is True else hit))
    return matches


class Detector:
    """End-to-end labeling of raw record text."""

    def __init__(
        self,
        rules_path: str | Path | None = None,
        gazetteers_path: str | Path | None = None,
        lexicon: Lexicon | None = None,
        normalizer: Normalizer | None = None,
        window: int = 6,
        self_reference: str = "all",
    ) -> None:
        self.rules = load_rules(rules_path or _resource_path("dictionaries.tsv"))
        rule_verbs = set()
        for rule in self.rules:
            rule_verbs |= rule.verbs
        self.lexicon = lexicon or Lexicon(extra_verbs=rule_verbs)
        self.lexicon.verbs |= rule_verbs
        self.gazetteer = Gazetteer(gazetteers_path)
        self.normalizer = normalizer or Normalizer()
        self.window = window
        if self_reference not in ("all", "singular"):
            raise ConfigError(f"self_reference must be all|singular, got {self_reference!r}")
        self.pronouns = PRONOUNS_ALL if self_reference == "all" else PRONOUNS_SINGULAR

    def detect_normalized(self, nt: NormalizedText) -> DisclosureLabel:
        label = DisclosureLabel(disclosing=False, categories=set(), evidence=[])
        if not _PRONOUN_HINT_RE.search(nt.text):
            return label
        for s_idx, (a, b) in enumerate(nt.sentences):
            tokens = tokenize(nt.text[a:b])
            if not tokens:
                continue
            triplets = extract_triplets(tokens, self.lexicon, self.window, self.pronouns)
            if not triplets:
                continue
            entities = recognize_entities(tokens, self.gazetteer)
            for triplet, rule, entity in classify(triplets, entities, self.rules):
                label.categories.add(rule.category)
                label.evidence.append(
                    Evidence(
                        sentence=s_idx,
                        triplet=triplet,
                        rule=rule,
                        entity=entity,
                        subject_text=_span_text(tokens, triplet.subject),
                        verb_text=_span_text(tokens, triplet.verb),
                        object_text=_span_text(tokens, triplet.object) if triplet.object else None,
                    )
                )
        label.disclosing = bool(label.categories)
        return label

    def detect_text(self, text: str) -> DisclosureLabel:
        return self.detect_normalized(self.normalizer.normalize(text))

    def detect(self, record) -> DisclosureLabel:
        return self.detect_text(record.text)

    def label_line(self, record_id: str, text: str) -> str:
        """One NDJSON output line for a record."""
        label = self.detect_text(text)
        return json.dumps(
            {
                "id": record_id,
                "disclosing": label.disclosing,
                "categories": sorted(label.categories),
                "evidence": [ev.as_dict() for ev in label.evidence],
            },
            ensure_ascii=False,
            separators=(",", ":"),
        )


def _span_text(tokens: list[Token], span: tuple[int, int]) -> str:
    return " ".join(t.surface for t in tokens[span[0]:span[1]])
