"""Batch text analytics for self-disclosure measurement in social-media corpora.

Subpackages cover the full pipeline: corpus filtering (:mod:`disclosure.ingest`),
text cleanup (:mod:`disclosure.normalize`), rule-based disclosure detection
(:mod:`disclosure.detect`), topic modeling (:mod:`disclosure.lda`), daily rate
series (:mod:`disclosure.series`), and detector evaluation
(:mod:`disclosure.evaluate`). :mod:`disclosure.pipeline` wires the stages
together over files and :mod:`disclosure.cli` exposes them as subcommands.
"""

__version__ = "0.1.0"
