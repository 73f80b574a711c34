"""Run the self-disclosure detector and dump its evidence.

Detection is unsupervised: subject-verb-object triplets anchored on a
first-person subject, a small gazetteer/pattern entity tagger, and one
dictionary rule per category. Objective categories (location, medical,
demographic, contact) need a matching entity near the verb; subjective
ones (feelings, interests) fire on the verb alone.
"""

from disclosure.detect import Detector

SAMPLES = [
    "I live in Pennsylvania.",
    "I was diagnosed with pneumonia on Friday.",
    "I feel terrible today.",
    "We are worried about the kids.",
    "You can reach me at jane@mail.org.",
    "Cases in New York doubled this week.",   # third person: not a disclosure
    "Stay home and wash your hands.",
]

detector = Detector()
for text in SAMPLES:
    label = detector.detect_text(text)
    flag = "DISCLOSING" if label.disclosing else "clean"
    print(f"{flag:<10} {text!r}")
    for ev in label.evidence:
        row = ev.as_dict()
        print(
            f"    [{row['category']}] {row['subject']} --{row['verb']}({row['voice']})--> "
            f"{row['object']!r} entity={row['entity']!r} ({row['entity_type']})"
        )
    print()
