from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disclosure.detect import (
    ENTITY_TYPES,
    PRONOUNS_ALL,
    PRONOUNS_SINGULAR,
    CategoryRule,
    Detector,
    Gazetteer,
    classify,
    extract_triplets,
    load_rules,
    match_rule,
    recognize_entities,
)
from disclosure.evaluate import load_gold, score
from disclosure.lexicon import Lexicon, tokenize


@pytest.fixture(scope="module")
def lex():
    return Lexicon()


@pytest.fixture(scope="module")
def gaz():
    return Gazetteer()


@pytest.fixture(scope="module")
def rules():
    from disclosure.detect import _resource_path

    return load_rules(_resource_path("dictionaries.tsv"))


def triplets(sentence, lex, **kw):
    return extract_triplets(tokenize(sentence), lex, **kw)


class TestTripletExtraction:
    def test_simple_active(self, lex):
        (t,) = triplets("I live in Pennsylvania .", lex)
        assert t.voice == "active"
        assert t.verb_lemma == "live"
        assert t.subject == (0, 1)
        assert t.verb == (1, 2)
        assert t.object == (2, 4)

    def test_no_first_person_no_triplet(self, lex):
        assert triplets("She lives in Texas .", lex) == []
        assert triplets("The city lives on .", lex) == []

    def test_verb_must_be_within_window(self, lex):
        # six skippable-or-verb positions is the default reach
        assert triplets("I definitely truly honestly really just moved", lex)
        far = "I one two three four five six moved"
        assert triplets(far, lex) == []

    def test_scan_stops_at_punctuation(self, lex):
        assert triplets("I , moved to Texas", lex) == []

    def test_scan_stops_at_numbers(self, lex):
        assert triplets("I 44 moved to Texas", lex) == []

    def test_auxiliaries_and_adverbs_are_skippable(self, lex):
        (t,) = triplets("I will definitely move to Texas", lex)
        assert t.verb_lemma == "move"
        assert t.voice == "active"

    def test_be_plus_participle_is_passive(self, lex):
        (t,) = triplets("I was diagnosed with covid", lex)
        assert t.voice == "passive"
        assert t.verb_lemma == "diagnose"

    def test_be_plus_plain_verb_stays_active(self, lex):
        (t,) = triplets("I am moving to Texas", lex)
        assert t.voice == "active"

    def test_perfect_have_intercepts_the_scan(self, lex):
        # "have" is a content verb here, so it wins before "tested" is seen
        (t,) = triplets("I have been tested for covid", lex)
        assert t.verb_lemma == "have"
        assert t.voice == "active"

    def test_be_chain_passive(self, lex):
        (t,) = triplets("I was being tested for covid", lex)
        assert t.voice == "passive"
        assert t.verb_lemma == "test"

    def test_backward_by_agent_pattern(self, lex):
        # forward scan from "me" finds nothing; backward V-by-P applies
        (t,) = triplets("contacted by me today", lex)
        assert t.voice == "passive"
        assert t.verb_lemma == "contact"

    def test_backward_requires_participle(self, lex):
        assert triplets("standing by me always", lex) == []

    def test_object_runs_to_clause_boundary(self, lex):
        (t,) = triplets("I moved to Texas because work vanished", lex)
        assert t.object == (2, 4)  # "to Texas"

    def test_object_absent_when_verb_ends_sentence(self, lex):
        (t,) = triplets("we moved", lex)
        assert t.object is None

    def test_verb_span_swallows_particles(self, lex):
        (t,) = triplets("I came back from Italy", lex)
        assert t.verb == (1, 3)  # "came back"
        assert t.object == (3, 5)

    def test_one_triplet_per_pronoun_ordered(self, lex):
        ts = triplets("I moved and we settled in Ohio", lex)
        assert [t.verb_lemma for t in ts] == ["move", "settle"]
        assert ts[0].subject[0] < ts[1].subject[0]

    def test_pronoun_set_is_configurable(self, lex):
        sent = "we moved to Texas"
        assert triplets(sent, lex) != []
        assert extract_triplets(tokenize(sent), lex, pronouns=PRONOUNS_SINGULAR) == []

    def test_window_is_configurable(self, lex):
        sent = "I quickly quietly calmly moved"
        assert triplets(sent, lex, window=6)
        assert triplets(sent, lex, window=2) == []


class TestEntities:
    def test_gazetteer_location(self, gaz):
        (e,) = recognize_entities(tokenize("streets of wuhan fall silent"), gaz)
        assert (e.entity_type, e.surface) == ("LOCATION", "wuhan")

    def test_longest_match_wins(self, gaz):
        ents = recognize_entities(tokenize("I flew to new york today"), gaz)
        surfaces = {e.surface for e in ents}
        assert "new york" in surfaces
        assert "york" not in surfaces

    def test_multiword_health_condition(self, gaz):
        ents = recognize_entities(tokenize("a sore throat and fever"), gaz)
        types = {(e.entity_type, e.surface) for e in ents}
        assert ("HEALTH_CONDITION", "sore throat") in types
        assert ("HEALTH_CONDITION", "fever") in types

    def test_case_insensitive(self, gaz):
        (e,) = recognize_entities(tokenize("WUHAN again"), gaz)
        assert e.surface == "WUHAN"

    @pytest.mark.parametrize(
        ("text", "surface"),
        [
            ("back in January it began", "January"),
            ("see you on monday perhaps", "monday"),
            ("it starts today apparently", "today"),
            ("the year 1985 mattered", "1985"),
            ("due 2020-03-11 officially", "2020-03-11"),
        ],
    )
    def test_date_shapes(self, gaz, text, surface):
        ents = recognize_entities(tokenize(text), gaz)
        assert any(e.entity_type == "DATE" and e.surface == surface for e in ents)

    def test_plain_numbers_are_not_dates(self, gaz):
        ents = recognize_entities(tokenize("call 911 or room 12345"), gaz)
        assert not any(e.entity_type == "DATE" for e in ents)

    def test_contact_placeholders(self, gaz):
        ents = recognize_entities(tokenize("reach me at emailid or phonenumber"), gaz)
        got = {(e.entity_type, e.surface) for e in ents}
        assert ("CONTACT", "emailid") in got
        assert ("CONTACT", "phonenumber") in got

    def test_overlaps_resolved_greedily(self, gaz):
        # "new york" beats a later overlapping single-word candidate
        ents = recognize_entities(tokenize("new york city hospital"), gaz)
        spans = [(e.start, e.end) for e in ents]
        assert sorted(spans) == spans
        for (a1, b1), (a2, b2) in zip(spans, spans[1:]):
            assert b1 <= a2

    def test_entity_types_published(self):
        assert set(ENTITY_TYPES) == {
            "LOCATION",
            "HEALTH_CONDITION",
            "DATE",
            "ORGANIZATION",
            "PERSON",
            "CONTACT",
        }


class TestRuleMatching:
    def test_objective_needs_entity_in_reach(self, lex, gaz, rules):
        toks = tokenize("I live in Pennsylvania .")
        (t,) = extract_triplets(toks, lex)
        ents = recognize_entities(toks, gaz)
        location = next(r for r in rules if r.category == "location")
        hit = match_rule(t, ents, location)
        assert hit is not None and hit is not False
        assert hit.entity_type == "LOCATION"

    def test_subjective_needs_no_entity(self, lex, rules):
        toks = tokenize("I feel awful")
        (t,) = extract_triplets(toks, lex)
        feelings = next(r for r in rules if r.category == "feelings")
        assert match_rule(t, [], feelings) is True

    def test_wrong_verb_no_match(self, lex, gaz, rules):
        toks = tokenize("I feel Pennsylvania")
        (t,) = extract_triplets(toks, lex)
        ents = recognize_entities(toks, gaz)
        location = next(r for r in rules if r.category == "location")
        assert match_rule(t, ents, location) is False

    def test_entity_beyond_window_no_match(self, lex, gaz, rules):
        sent = "I moved lock stock barrel wagon trailer camper van Pennsylvania"
        toks = tokenize(sent)
        (t,) = extract_triplets(toks, lex)
        ents = recognize_entities(toks, gaz)
        location = next(r for r in rules if r.category == "location")
        assert match_rule(t, ents, location) is False

    def test_classify_returns_rule_order(self, lex, gaz, rules):
        toks = tokenize("I work at a hospital in Queens")
        ts = extract_triplets(toks, lex)
        ents = recognize_entities(toks, gaz)
        hits = classify(ts, ents, rules)
        cats = [rule.category for _, rule, _ in hits]
        assert set(cats) >= {"location", "demographic"}
        order = [rules.index(rule) for _, rule, _ in hits]
        assert order == sorted(order)

    def test_rule_validation(self):
        from disclosure.config import ConfigError

        with pytest.raises(ConfigError):
            CategoryRule(
                category="x",
                subjectivity="objective",
                required_entity=None,
                verbs=frozenset({"like"}),
                window=6,
            )
        with pytest.raises(ConfigError):
            CategoryRule(
                category="x",
                subjectivity="subjective",
                required_entity="LOCATION",
                verbs=frozenset({"like"}),
                window=6,
            )


class TestDetector:
    def test_location_example(self, detector):
        label = detector.detect_text("I live in Pennsylvania")
        assert label.disclosing
        assert label.categories == {"location"}

    def test_feelings_example(self, detector):
        label = detector.detect_text("I'm afraid we will lose our jobs.")
        assert label.disclosing
        assert "feelings" in label.categories

    def test_passive_medical_example(self, detector):
        label = detector.detect_text("I was diagnosed with flu")
        assert label.disclosing
        assert "medical" in label.categories
        assert any(ev.triplet.voice == "passive" for ev in label.evidence)

    def test_multi_sentence_union(self, detector):
        label = detector.detect_text("I live in Ohio. I feel fine about it.")
        assert label.categories == {"location", "feelings"}

    def test_clean_text_not_disclosing(self, detector):
        label = detector.detect_text("The governor announced new rules today.")
        assert not label.disclosing
        assert label.categories == set()
        assert label.evidence == []

    def test_normalization_feeds_detection(self, detector):
        # contraction expansion and placeholder substitution both matter
        label = detector.detect_text("I can be reached at jane@doe.org")
        assert "contact" in label.categories

    def test_singular_self_reference_mode(self):
        det = Detector(self_reference="singular")
        assert not det.detect_text("We moved to Texas.").disclosing
        assert det.detect_text("I moved to Texas.").disclosing

    def test_label_line_shape(self, detector):
        line = detector.label_line("id9", "I live in Ohio and I feel fine.")
        obj = json.loads(line)
        assert obj["id"] == "id9"
        assert obj["disclosing"] is True
        assert obj["categories"] == sorted(obj["categories"])
        ev = obj["evidence"][0]
        assert set(ev) == {
            "sentence",
            "subject",
            "verb",
            "object",
            "voice",
            "category",
            "entity",
            "entity_type",
        }

    def test_evidence_texts_come_from_their_sentence(self, detector):
        text = "The news is grim. I moved to Texas last week."
        nt = detector.normalizer.normalize(text)
        label = detector.detect_normalized(nt)
        assert label.evidence
        for ev in label.evidence:
            a, b = nt.sentences[ev.sentence]
            sentence = nt.text[a:b]
            assert ev.subject_text in sentence
            assert ev.verb_text in sentence
            if ev.object_text is not None:
                assert ev.object_text in sentence
            assert ev.sentence == 1


class TestGoldCorpus:
    def test_precision_and_recall_bounds(self, detector, data_dir):
        gold = load_gold(data_dir / "gold_100.tsv")
        assert len(gold) == 100
        report = score(gold, detector)
        assert report.precision is not None and report.recall is not None
        assert report.precision >= 0.90
        assert report.recall >= 0.70
        assert report.precision >= report.recall

    def test_confusion_cells_frozen(self, detector, data_dir):
        # pinned so silent drift in rules or tables shows up loudly
        gold = load_gold(data_dir / "gold_100.tsv")
        report = score(gold, detector)
        assert (report.tp, report.fp, report.fn, report.tn) == (46, 2, 18, 34)


WORDS = st.sampled_from(
    "the a virus spread hospital city family numbers news masks stay safe work from home".split()
)


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(st.lists(WORDS, min_size=1, max_size=12))
    def test_first_person_required(self, detector, words):
        text = " ".join(words)
        assert not detector.detect_text(text).disclosing

    @settings(max_examples=100, deadline=None)
    @given(st.lists(WORDS, min_size=1, max_size=10), st.sampled_from(sorted(PRONOUNS_ALL)))
    def test_deterministic(self, detector, words, pronoun):
        text = pronoun + " " + " ".join(words)
        assert detector.label_line("x", text) == detector.label_line("x", text)

    def test_verb_monotonicity(self, detector, tmp_path):
        # widening a dictionary can only add detections, never remove any
        from disclosure.detect import _resource_path

        rows = []
        for raw in open(_resource_path("dictionaries.tsv"), encoding="utf-8"):
            if raw.startswith("location\t"):
                parts = raw.rstrip("\n").split("\t")
                parts[3] += ",watch"
                raw = "\t".join(parts) + "\n"
            rows.append(raw)
        wider = tmp_path / "dictionaries.tsv"
        wider.write_text("".join(rows), encoding="utf-8")
        extended = Detector(rules_path=wider)

        probes = [
            "I watched the skyline of Chicago",
            "I live in Ohio.",
            "I watched the news all morning.",
            "Stay home.",
            "I was diagnosed with flu.",
        ]
        for text in probes:
            a = detector.detect_text(text)
            b = extended.detect_text(text)
            if a.disclosing:
                assert b.disclosing
                assert a.categories <= b.categories
        assert extended.detect_text("I watched the skyline of Chicago").disclosing
        assert not detector.detect_text("I watched the skyline of Chicago").disclosing
