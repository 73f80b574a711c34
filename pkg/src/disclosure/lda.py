"""Latent Dirichlet allocation via collapsed Gibbs sampling.

The sampler resamples every token's topic from the standard collapsed
conditional p(z=k) proportional to (n_dk + alpha)(n_kw + beta)/(n_k + V beta).

Reproducibility scheme: every document owns a PCG64 stream keyed by
(run seed, content fingerprint), and sweeps visit documents in fingerprint
order. Identical inputs give bitwise-identical counts, and permuting the
corpus permutes theta rows without changing the recovered topics.
"""

from __future__ import annotations

import hashlib
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .config import ConfigError
from .lexicon import KIND_NUMBER, KIND_PUNCT, Lexicon, tokenize
from .normalize import NormalizedText, _resource_path, load_word_list


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    return frozenset(load_word_list(path or _resource_path("stopwords.txt")))


def preprocess_for_lda(
    nt: NormalizedText,
    stopwords: frozenset[str],
    lexicon: Lexicon | None = None,
) -> list[str]:
    """Lowercased, lemmatized content terms of one normalized text."""
    if lexicon is None:
        lexicon = _default_lexicon()
    terms = []
    for token in tokenize(nt.text):
        if token.kind in (KIND_PUNCT, KIND_NUMBER):
            continue
        lemma = lexicon.lemma(token.lower)
        if len(lemma) < 2 or lemma in stopwords:
            continue
        terms.append(lemma)
    return terms


_LEXICON: Lexicon | None = None


def _default_lexicon() -> Lexicon:
    global _LEXICON
    if _LEXICON is None:
        _LEXICON = Lexicon()
    return _LEXICON


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    index: dict[str, int]
    doc_freq: np.ndarray

    @classmethod
    def build(cls, docs: Sequence[Sequence[str]]) -> "Vocabulary":
        terms = tuple(sorted({t for doc in docs for t in doc}))
        index = {t: i for i, t in enumerate(terms)}
        df = np.zeros(len(terms), dtype=np.int64)
        for doc in docs:
            for t in set(doc):
                df[index[t]] += 1
        return cls(terms=terms, index=index, doc_freq=df)

    def __len__(self) -> int:
        return len(self.terms)


def _fingerprint(doc: Sequence[str]) -> int:
    digest = hashlib.blake2b("\x00".join(doc).encode("utf-8"), digest_size=8)
    return int.from_bytes(digest.digest(), "big")


@dataclass
class TopicModel:
    k: int
    alpha: float
    beta: float
    iterations: int
    seed: int
    vocabulary: Vocabulary
    topic_word_counts: np.ndarray
    doc_topic_counts: np.ndarray
    topic_counts: np.ndarray
    assignments: list[np.ndarray]
    kept_indices: list[int]
    dropped_empty: int
    doc_ids: list[str] | None = None
    rng_scheme: str = "pcg64-per-document"

    def phi(self) -> np.ndarray:
        v = len(self.vocabulary)
        return (self.topic_word_counts + self.beta) / (
            self.topic_counts[:, None] + v * self.beta
        )

    def theta(self) -> np.ndarray:
        doc_len = self.doc_topic_counts.sum(axis=1, keepdims=True)
        return (self.doc_topic_counts + self.alpha) / (doc_len + self.k * self.alpha)

    def save(self, path: str | Path) -> None:
        """Write the model as a zip of TSV members (layout in README)."""
        meta = {
            "format_version": "1",
            "k": self.k,
            "alpha": repr(self.alpha),
            "beta": repr(self.beta),
            "iterations": self.iterations,
            "seed": self.seed,
            "rng_scheme": self.rng_scheme,
            "dropped_empty": self.dropped_empty,
            "n_docs": len(self.kept_indices),
            "n_terms": len(self.vocabulary),
        }
        with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as zf:
            # Pinned member metadata: writestr would otherwise stamp the wall
            # clock into the archive, breaking byte-for-byte reproducibility.
            def member(name: str, payload: str) -> None:
                info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
                info.compress_type = zipfile.ZIP_DEFLATED
                info.external_attr = 0o644 << 16
                zf.writestr(info, payload)

            member("meta.tsv", "".join(f"{k}\t{v}\n" for k, v in meta.items()))
            member(
                "vocabulary.tsv",
                "".join(
                    f"{term}\t{int(df)}\n"
                    for term, df in zip(self.vocabulary.terms, self.vocabulary.doc_freq)
                ),
            )
            member("topic_word_counts.tsv", _matrix_tsv(self.topic_word_counts))
            member("doc_topic_counts.tsv", _matrix_tsv(self.doc_topic_counts))
            member(
                "assignments.tsv",
                "".join(" ".join(str(int(z)) for z in zs) + "\n" for zs in self.assignments),
            )
            member("kept_indices.tsv", "".join(f"{i}\n" for i in self.kept_indices))
            if self.doc_ids is not None:
                member("doc_ids.tsv", "".join(f"{i}\n" for i in self.doc_ids))

    @classmethod
    def load(cls, path: str | Path) -> "TopicModel":
        with zipfile.ZipFile(path) as zf:
            meta = dict(
                line.split("\t", 1)
                for line in zf.read("meta.tsv").decode("utf-8").splitlines()
            )
            vocab_rows = [
                line.split("\t")
                for line in zf.read("vocabulary.tsv").decode("utf-8").splitlines()
            ]
            terms = tuple(r[0] for r in vocab_rows)
            vocab = Vocabulary(
                terms=terms,
                index={t: i for i, t in enumerate(terms)},
                doc_freq=np.array([int(r[1]) for r in vocab_rows], dtype=np.int64),
            )
            nkw = _parse_matrix(zf.read("topic_word_counts.tsv").decode("utf-8"))
            ndk = _parse_matrix(zf.read("doc_topic_counts.tsv").decode("utf-8"))
            assignments = [
                np.array([int(z) for z in line.split()], dtype=np.int64)
                for line in zf.read("assignments.tsv").decode("utf-8").splitlines()
            ]
            kept = [
                int(line)
                for line in zf.read("kept_indices.tsv").decode("utf-8").splitlines()
            ]
            doc_ids = None
            if "doc_ids.tsv" in zf.namelist():
                doc_ids = zf.read("doc_ids.tsv").decode("utf-8").splitlines()
        return cls(
            k=int(meta["k"]),
            alpha=float(meta["alpha"]),
            beta=float(meta["beta"]),
            iterations=int(meta["iterations"]),
            seed=int(meta["seed"]),
            vocabulary=vocab,
            topic_word_counts=nkw,
            doc_topic_counts=ndk,
            topic_counts=nkw.sum(axis=1),
            assignments=assignments,
            kept_indices=kept,
            dropped_empty=int(meta["dropped_empty"]),
            doc_ids=doc_ids,
            rng_scheme=meta["rng_scheme"],
        )


def _matrix_tsv(matrix: np.ndarray) -> str:
    return "".join("\t".join(str(int(x)) for x in row) + "\n" for row in matrix)


def _parse_matrix(text: str) -> np.ndarray:
    rows = [[int(x) for x in line.split("\t")] for line in text.splitlines()]
    return np.array(rows, dtype=np.int64)


def fit_lda(
    docs: Sequence[Sequence[str]],
    k: int,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 1000,
    seed: int | None = None,
    doc_ids: Sequence[str] | None = None,
    sweep_callback: Callable[[int, list, list, list, list], None] | None = None,
) -> TopicModel:
    """Fit by collapsed Gibbs sampling; see module docstring for the scheme.

    `sweep_callback(sweep, ndk, nwk, nk, z)` is invoked after every sweep
    with live count lists (callers must copy); used by invariant checks.
    """
    if seed is None:
        raise ConfigError("an explicit RNG seed is required for topic fitting")
    if k < 1:
        raise ConfigError(f"topic count must be >= 1, got {k}")
    if iterations < 1:
        raise ConfigError(f"iterations must be >= 1, got {iterations}")
    kept_indices = [i for i, doc in enumerate(docs) if len(doc) > 0]
    if not kept_indices:
        raise ConfigError("corpus is empty after dropping empty documents")
    kept_docs = [docs[i] for i in kept_indices]
    kept_ids = [doc_ids[i] for i in kept_indices] if doc_ids is not None else None
    vocab = Vocabulary.build(kept_docs)
    if k > len(vocab):
        raise ConfigError(f"k={k} exceeds the {len(vocab)} distinct terms available")
    if alpha is None:
        alpha = 50.0 / k

    n_docs = len(kept_docs)
    v = len(vocab)
    vbeta = v * beta
    word_ids = [[vocab.index[t] for t in doc] for doc in kept_docs]
    fingerprints = [_fingerprint(doc) for doc in kept_docs]
    order = sorted(range(n_docs), key=lambda d: (fingerprints[d], d))
    streams = [
        np.random.Generator(
            np.random.PCG64(
                np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, fingerprints[d]])
            )
        )
        for d in range(n_docs)
    ]

    ndk = [[0] * k for _ in range(n_docs)]
    nwk = [[0] * k for _ in range(v)]
    nk = [0] * k
    z: list[list[int]] = [[] for _ in range(n_docs)]
    for d in order:
        zs = streams[d].integers(0, k, size=len(word_ids[d])).tolist()
        z[d] = zs
        ndk_d = ndk[d]
        for w, topic in zip(word_ids[d], zs):
            ndk_d[topic] += 1
            nwk[w][topic] += 1
            nk[topic] += 1

    cum = [0.0] * k
    topics = range(k)
    for sweep in range(iterations):
        for d in order:
            wd = word_ids[d]
            zd = z[d]
            ndk_d = ndk[d]
            u = streams[d].random(len(wd)).tolist()
            for t, w in enumerate(wd):
                old = zd[t]
                nwk_w = nwk[w]
                ndk_d[old] -= 1
                nwk_w[old] -= 1
                nk[old] -= 1
                total = 0.0
                for j in topics:
                    total += (ndk_d[j] + alpha) * (nwk_w[j] + beta) / (nk[j] + vbeta)
                    cum[j] = total
                r = u[t] * total
                new = 0
                last = k - 1
                while new < last and cum[new] < r:
                    new += 1
                ndk_d[new] += 1
                nwk_w[new] += 1
                nk[new] += 1
                zd[t] = new
        if sweep_callback is not None:
            sweep_callback(sweep, ndk, nwk, nk, z)

    return TopicModel(
        k=k,
        alpha=float(alpha),
        beta=float(beta),
        iterations=iterations,
        seed=seed,
        vocabulary=vocab,
        topic_word_counts=np.array(nwk, dtype=np.int64).T.copy(),
        doc_topic_counts=np.array(ndk, dtype=np.int64),
        topic_counts=np.array(nk, dtype=np.int64),
        assignments=[np.array(zs, dtype=np.int64) for zs in z],
        kept_indices=kept_indices,
        dropped_empty=len(docs) - n_docs,
        doc_ids=list(kept_ids) if kept_ids is not None else None,
    )


def top_terms(model: TopicModel, k: int, n: int) -> list[tuple[str, float]]:
    """The n most probable terms of topic k; ties broken lexicographically."""
    if not 0 <= k < model.k:
        raise ConfigError(f"topic id {k} out of range 0..{model.k - 1}")
    if n <= 0:
        return []
    phi_k = model.phi()[k]
    ranked = sorted(zip(model.vocabulary.terms, phi_k), key=lambda p: (-p[1], p[0]))
    return [(term, float(p)) for term, p in ranked[:n]]


def topic_prevalence(model: TopicModel) -> list[float]:
    """Fraction of all token assignments per topic; sums to 1."""
    total = int(model.topic_counts.sum())
    return [int(c) / total for c in model.topic_counts]
