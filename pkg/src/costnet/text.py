"""Character-level vocabulary, integer encoding, and n-gram counting.

Everything is lowercased: domains are case-insensitive and we keep one rule
across use cases. Sequences are prefix-truncated to max_len and right-padded;
id 0 is PAD, id 1 is OOV, real characters start at id 2 in lexicographic
order so rebuilding from the same corpus always yields the same mapping.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError

PAD_ID = 0
OOV_ID = 1

#: default sequence lengths per use case; short strings for domains and
#: urls, long ones for email bodies
DEFAULT_MAX_LEN = {"dga": 100, "url": 100, "email": 500}

#: multiset of character n-grams for one document
NgramCounts = Counter


class CharVocabulary:
    """Bijective char-to-id map with reserved PAD and OOV slots."""

    def __init__(self, chars):
        chars = tuple(chars)
        if len(set(chars)) != len(chars):
            raise DataError("vocabulary characters must be unique")
        if any(len(c) != 1 for c in chars):
            raise DataError("vocabulary entries must be single characters")
        self.chars = chars
        self._ids = {c: i + 2 for i, c in enumerate(chars)}

    @property
    def size(self) -> int:
        return len(self.chars) + 2

    def id_for(self, char: str) -> int:
        return self._ids.get(char, OOV_ID)

    def char_for(self, idx: int) -> str | None:
        """Inverse mapping; PAD/OOV ids have no character."""
        if 2 <= idx < self.size:
            return self.chars[idx - 2]
        return None

    def __eq__(self, other) -> bool:
        return isinstance(other, CharVocabulary) and self.chars == other.chars


def fit_vocab(corpus) -> CharVocabulary:
    """Collect the lowercased character set of a corpus, ids assigned sorted."""
    corpus = list(corpus)
    if not corpus:
        raise DataError("cannot fit a vocabulary on an empty corpus")
    seen = set()
    for text in corpus:
        seen.update(text.lower())
    return CharVocabulary(sorted(seen))


def encode(text: str, vocab: CharVocabulary, max_len: int) -> list[int]:
    """Lowercase, map chars (unknown -> OOV), keep the first max_len, pad."""
    if max_len < 1:
        raise ConfigError(f"max_len must be >= 1, got {max_len}")
    ids = [vocab.id_for(c) for c in text.lower()[:max_len]]
    ids.extend([PAD_ID] * (max_len - len(ids)))
    return ids


@dataclass
class EncodedBatch:
    """Fixed-length padded id matrix plus bookkeeping."""

    ids: np.ndarray  # int64 [n, max_len]
    lengths: np.ndarray  # original (untruncated) text lengths
    labels: np.ndarray | None = None

    def __len__(self) -> int:
        return self.ids.shape[0]

    def take(self, indices) -> "EncodedBatch":
        return EncodedBatch(
            ids=self.ids[indices],
            lengths=self.lengths[indices],
            labels=None if self.labels is None else self.labels[indices],
        )


def encode_batch(texts, vocab: CharVocabulary, max_len: int, labels=None) -> EncodedBatch:
    texts = list(texts)
    ids = np.array([encode(t, vocab, max_len) for t in texts], dtype=np.int64)
    ids = ids.reshape(len(texts), max_len)
    lengths = np.array([len(t) for t in texts], dtype=np.int64)
    lab = None
    if labels is not None:
        lab = np.asarray(labels, dtype=np.int64)
        if lab.shape != (len(texts),):
            raise DataError("labels must align one-to-one with texts")
    return EncodedBatch(ids=ids, lengths=lengths, labels=lab)


def ngram_counts(text: str, n_lo: int, n_hi: int) -> NgramCounts:
    """All character n-grams with multiplicity for n in [n_lo, n_hi]."""
    if not 1 <= n_lo <= n_hi:
        raise ConfigError(f"bad n-gram range [{n_lo}, {n_hi}]")
    text = text.lower()
    counts: Counter = Counter()
    for n in range(n_lo, n_hi + 1):
        for i in range(len(text) - n + 1):
            counts[text[i : i + n]] += 1
    return counts
