"""Walk a small NDJSON feed through the corpus filter.

The filter keeps original user content: no reposts or quotes, no verified
or excluded accounts, matching language, and (once a keyword schedule is
configured) only records that mention a keyword already active on their
UTC calendar day.
"""

import json

from disclosure.ingest import CorpusStats, FilterConfig, filter_lines

import datetime as dt

FEED = [
    {"id": "1", "created_at": "2020-03-10T09:00:00Z", "text": "I think I have corona", "lang": "en"},
    {"id": "2", "created_at": "2020-03-10T09:05:00Z", "text": "RT @news: cases rising corona", "lang": "en"},
    {"id": "3", "created_at": "2020-03-10T09:10:00Z", "text": "stay safe corona", "lang": "en", "is_retweet": True},
    {"id": "4", "created_at": "2020-03-10T09:15:00Z", "text": "official update corona", "lang": "en", "author_verified": True},
    {"id": "5", "created_at": "2020-03-10T09:20:00Z", "text": "hablando del corona", "lang": "es"},
    {"id": "6", "created_at": "2020-03-10T09:25:00Z", "text": "pandemic is scary", "lang": "en"},
    {"id": "7", "created_at": "2020-03-13T10:00:00Z", "text": "pandemic is scary", "lang": "en"},
]

# "pandemic" only counts from March 12 on, so record 6 is too early but
# record 7 (same text, three days later) gets through.
cfg = FilterConfig(
    language="en",
    keyword_schedule={
        "corona": dt.date(2020, 1, 28),
        "pandemic": dt.date(2020, 3, 12),
    },
)

stats = CorpusStats()
lines = (json.dumps(obj) + "\n" for obj in FEED)
kept = [record for _raw, record in filter_lines(lines, cfg, stats)]

print("retained records:")
for record in kept:
    print(f"  {record.id}: {record.text!r}")

print()
print(stats.as_kv())
