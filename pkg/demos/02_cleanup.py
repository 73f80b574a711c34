"""Show the text cleanup pass on typically messy feed content.

Cleanup repairs mangled encodings, strips markup and reposts, replaces
emails/phones/URLs with placeholder words, expands contractions, and
normalizes spacing. Running it twice never changes the result, so cleaned
corpora can be re-cleaned safely.
"""

from disclosure.normalize import Normalizer

SAMPLES = [
    "I'm scared of covid ðŸ˜·",
    "RT @user: masks &amp; gloves cost $5 https://t.co/abc #covid",
    "can't sleep.Worried about tomorrow",
    "email me at jane.doe@mail.org or call 555-123-4567",
    "Iâ€™ve been inside for 14 days",
]

normalizer = Normalizer()
for raw in SAMPLES:
    cleaned = normalizer.normalize(raw)
    print(f"raw:     {raw!r}")
    print(f"cleaned: {cleaned.text!r}")
    sentences = [cleaned.text[a:b] for a, b in cleaned.sentences]
    print(f"sentences: {sentences}")
    print(f"rules applied: {cleaned.replacements_applied}")
    print()
