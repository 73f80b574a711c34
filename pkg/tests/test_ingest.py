from __future__ import annotations

import datetime as dt
import json

import pytest

from disclosure.ingest import (
    REJECTION_RULES,
    CorpusStats,
    FilterConfig,
    RecordParseError,
    TweetRecord,
    filter_lines,
    in_keyword_window,
    is_original_content,
    parse_record,
    read_records,
    rejection_reason,
)

UTC = dt.timezone.utc


def record(**kw) -> TweetRecord:
    base = dict(
        id="t1",
        created_at=dt.datetime(2020, 3, 15, 12, 0, tzinfo=UTC),
        text="stuck at home because of corona",
        lang="en",
        author_handle="someone",
        author_verified=False,
        is_retweet=False,
        is_quote=False,
    )
    base.update(kw)
    return TweetRecord(**base)


def cfg(**kw) -> FilterConfig:
    base = dict(
        language="en",
        excluded_handles=frozenset({"cdcgov", "who"}),
        keyword_schedule={"corona": dt.date(2020, 1, 28), "covid": dt.date(2020, 3, 6)},
    )
    base.update(kw)
    return FilterConfig(**base)


class TestParseRecord:
    def test_minimal_fields_and_defaults(self):
        rec = parse_record('{"id": "a", "created_at": "2020-03-01T00:00:00Z", "text": "hi"}')
        assert rec.id == "a"
        assert rec.lang == "und"
        assert rec.author_handle == ""
        assert not rec.author_verified and not rec.is_retweet and not rec.is_quote

    def test_numeric_id_coerced_to_string(self):
        rec = parse_record(
            '{"id": 1238675309, "created_at": "2020-03-01T00:00:00Z", "text": "hi"}'
        )
        assert rec.id == "1238675309"

    def test_full_fields(self):
        raw = json.dumps(
            {
                "id": "b",
                "created_at": "2020-03-01T05:00:00+05:00",
                "text": "x",
                "lang": "en",
                "author_handle": "me",
                "author_verified": True,
                "is_retweet": True,
                "is_quote": True,
            }
        )
        rec = parse_record(raw)
        assert rec.created_at == dt.datetime(2020, 3, 1, 0, 0, tzinfo=UTC)
        assert rec.author_verified and rec.is_retweet and rec.is_quote

    @pytest.mark.parametrize(
        "raw",
        [
            "not json",
            "[1, 2]",
            '{"created_at": "2020-03-01T00:00:00Z", "text": "x"}',
            '{"id": "a", "text": "x"}',
            '{"id": "a", "created_at": "2020-03-01T00:00:00Z"}',
            '{"id": "a", "created_at": "yesterday", "text": "x"}',
            '{"id": "a", "created_at": "2020-03-01T00:00:00Z", "text": 7}',
        ],
    )
    def test_malformed_rejected(self, raw):
        with pytest.raises(RecordParseError):
            parse_record(raw)

    def test_zulu_suffix_and_offsets_normalize_to_utc(self):
        rec_z = parse_record('{"id": "a", "created_at": "2020-03-06T00:00:00Z", "text": "x"}')
        rec_off = parse_record(
            '{"id": "b", "created_at": "2020-03-06T05:00:00+05:00", "text": "x"}'
        )
        assert rec_z.created_at == rec_off.created_at
        assert rec_z.created_at.tzinfo == UTC

    def test_naive_timestamp_treated_as_utc(self):
        rec = parse_record('{"id": "a", "created_at": "2020-03-06T08:30:00", "text": "x"}')
        assert rec.created_at == dt.datetime(2020, 3, 6, 8, 30, tzinfo=UTC)


class TestKeywordWindow:
    def test_empty_schedule_accepts_everything(self):
        c = cfg(keyword_schedule={})
        assert in_keyword_window(record(text="anything at all"), c)

    def test_keyword_must_be_active(self):
        c = cfg()
        ok = record(text="covid test", created_at=dt.datetime(2020, 3, 6, 0, 0, tzinfo=UTC))
        early = record(text="covid test", created_at=dt.datetime(2020, 3, 5, 23, 59, tzinfo=UTC))
        assert in_keyword_window(ok, c)
        assert not in_keyword_window(early, c)

    def test_activation_compares_utc_calendar_day(self):
        # 2020-03-06T02:00+05:00 is 2020-03-05 21:00 UTC, one day before activation
        rec = parse_record(
            '{"id": "a", "created_at": "2020-03-06T02:00:00+05:00", "text": "covid"}'
        )
        assert not in_keyword_window(rec, cfg())

    def test_match_is_case_insensitive_substring(self):
        c = cfg()
        assert in_keyword_window(record(text="CORONAVIRUS!"), c)
        assert in_keyword_window(record(text="coronavirus cases"), c)
        assert not in_keyword_window(record(text="the virus"), c)


class TestRejectionReason:
    def test_accepted_record_has_no_reason(self):
        assert rejection_reason(record(), cfg()) is None
        assert is_original_content(record(), cfg())

    def test_precedence_order(self):
        # Start with a record failing every rule, then peel one rule at a time.
        rec = record(
            is_retweet=True,
            is_quote=True,
            text="RT @x: hello",
            author_verified=True,
            author_handle="CDCgov",
            lang="fr",
        )
        c = cfg()
        assert rejection_reason(rec, c) == "retweet_flag"
        rec = record(
            is_quote=True, text="RT @x: hello", author_verified=True,
            author_handle="CDCgov", lang="fr",
        )
        assert rejection_reason(rec, c) == "quote_flag"
        rec = record(
            text="RT @x: hello", author_verified=True, author_handle="CDCgov", lang="fr"
        )
        assert rejection_reason(rec, c) == "rt_prefix"
        rec = record(author_verified=True, author_handle="CDCgov", lang="fr")
        assert rejection_reason(rec, c) == "verified"
        rec = record(author_handle="CDCgov", lang="fr")
        assert rejection_reason(rec, c) == "excluded_handle"
        rec = record(lang="fr")
        assert rejection_reason(rec, c) == "language"
        rec = record(text="no keywords here")
        assert rejection_reason(rec, c) == "keyword_window"

    def test_rt_prefix_is_exact_and_case_sensitive(self):
        c = cfg()
        assert rejection_reason(record(text="RT @user: corona"), c) == "rt_prefix"
        assert rejection_reason(record(text="rt @user: corona"), c) is None
        assert rejection_reason(record(text="RT@user corona"), c) is None
        assert rejection_reason(record(text="START @user corona"), c) is None

    def test_handle_match_is_case_insensitive(self):
        c = cfg()
        for handle in ("CDCgov", "cdcgov", "CDCGOV"):
            assert rejection_reason(record(author_handle=handle), c) == "excluded_handle"

    def test_reasons_all_come_from_published_tuple(self):
        assert set(REJECTION_RULES) == {
            "retweet_flag",
            "quote_flag",
            "rt_prefix",
            "verified",
            "excluded_handle",
            "language",
            "keyword_window",
        }


class TestFilterConfigFromFile:
    def test_parses_keywords_and_handles(self, tmp_path):
        p = tmp_path / "f.cfg"
        p.write_text(
            "language = en\nexclude_handle = WHO\n"
            "keyword = 2020-01-28 corona\nkeyword = 2020-03-12 social distancing\n",
            encoding="utf-8",
        )
        c = FilterConfig.from_file(p)
        assert c.language == "en"
        assert c.excluded_handles == frozenset({"who"})
        assert c.keyword_schedule == {
            "corona": dt.date(2020, 1, 28),
            "social distancing": dt.date(2020, 3, 12),
        }


class TestFilterLines:
    def test_fixture_generates_expected_decisions(self, data_dir):
        c = FilterConfig.from_file(data_dir / "filter_fixture.cfg")
        stats = CorpusStats()
        with open(data_dir / "filter_fixture.ndjson", encoding="utf-8") as fh:
            kept = [(raw, rec.id) for raw, rec in filter_lines(fh, c, stats)]
        assert [rid for _, rid in kept] == [
            "f01", "f09", "f11", "f12", "f20", "f21", "f22", "f28", "f30",
            "f31", "f35", "f37", "f39", "f41", "f43", "f45", "f47", "f49",
        ]
        assert stats.total_read == 50
        assert stats.parse_failures == 4
        assert stats.retained == 18
        assert dict(stats.rejected) == {
            "retweet_flag": 3,
            "quote_flag": 3,
            "rt_prefix": 3,
            "verified": 4,
            "excluded_handle": 3,
            "language": 4,
            "keyword_window": 8,
        }
        stats.check_identity()

    def test_raw_line_is_passed_through_unmodified(self, data_dir):
        c = FilterConfig.from_file(data_dir / "filter_fixture.cfg")
        stats = CorpusStats()
        with open(data_dir / "filter_fixture.ndjson", encoding="utf-8") as fh:
            originals = fh.read().splitlines()
        kept_raw = [
            raw for raw, _ in filter_lines(iter(originals), c, stats)
        ]
        assert all(raw in originals for raw in kept_raw)
        # byte-for-byte: the retained line for f01 is exactly the input line
        assert kept_raw[0] == originals[0]

    def test_stats_merge_and_kv(self):
        a = CorpusStats()
        a.total_read, a.retained = 10, 8
        a.rejected["language"] = 2
        b = CorpusStats()
        b.total_read, b.retained, b.parse_failures = 5, 3, 1
        b.rejected["language"] = 1
        merged = a.merge(b)
        assert merged.total_read == 15
        assert merged.retained == 11
        assert merged.parse_failures == 1
        assert merged.rejected["language"] == 3
        merged.check_identity()
        kv = merged.as_kv()
        assert "total_read = 15" in kv
        assert "rejected_language = 3" in kv

    def test_identity_check_fails_on_inconsistent_tallies(self):
        s = CorpusStats()
        s.total_read = 3
        s.retained = 1
        with pytest.raises(ValueError):
            s.check_identity()


class TestReadRecords:
    def test_strict_reader_raises_on_bad_line(self, tmp_path):
        p = tmp_path / "c.ndjson"
        p.write_text(
            '{"id": "a", "created_at": "2020-03-01T00:00:00Z", "text": "x"}\nbroken\n',
            encoding="utf-8",
        )
        it = read_records(p)
        assert next(it).id == "a"
        with pytest.raises(RecordParseError):
            next(it)
