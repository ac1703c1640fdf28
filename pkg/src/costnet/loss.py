"""Per-class misclassification costs and the weighted binary cross-entropy.

Class i gets raw cost (1/n_i)^gamma from its training count n_i. gamma=0
collapses to the unweighted loss (all costs exactly 1.0); gamma=1 makes the
cost inversely proportional to class size. Normalized costs are rescaled so
the dataset-mean per-sample weight is 1, which keeps the effective learning
rate comparable across gamma values; raw mode keeps the literal costs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .errors import ConfigError, ContractError, DataError

#: probabilities are clamped into [EPS, 1 - EPS] before the logs
EPS = 1e-7

_clamp_count = 0


def clamp_count() -> int:
    """Number of probability entries clamped since the last reset."""
    return _clamp_count


def reset_clamp_count() -> None:
    global _clamp_count
    _clamp_count = 0


@dataclass(frozen=True)
class ClassWeights:
    """Per-class costs in label order [legitimate=0, malicious/spam=1]."""

    counts: tuple[int, ...]
    gamma: float
    raw: tuple[float, ...]
    normalized: tuple[float, ...]
    normalize_flag: bool

    def weights(self, use_normalized: bool | None = None) -> tuple[float, ...]:
        if use_normalized is None:
            use_normalized = self.normalize_flag
        return self.normalized if use_normalized else self.raw


def compute_class_weights(counts, gamma: float, normalize: bool = True) -> ClassWeights:
    """Raw cost (1/n_i)^gamma per class, plus the mean-1 rescaled variant."""
    counts = tuple(int(c) for c in counts)
    if any(c < 1 for c in counts):
        raise DataError(f"class counts must all be >= 1, got {counts}")
    if not 0.0 <= gamma <= 1.0:
        raise ConfigError(f"gamma must be in [0, 1], got {gamma}")
    raw = tuple((1.0 / c) ** gamma for c in counts)
    total = sum(counts)
    scale = total / sum(c * w for c, w in zip(counts, raw))
    normalized = tuple(w * scale for w in raw)
    return ClassWeights(
        counts=counts,
        gamma=gamma,
        raw=raw,
        normalized=normalized,
        normalize_flag=normalize,
    )


def weighted_bce(
    probs: ad.Tensor,
    labels,
    weights: ClassWeights,
    use_normalized: bool | None = None,
) -> ad.Tensor:
    """Mean over the batch of w_y * (-y ln p - (1-y) ln(1-p)).

    Differentiable through ``probs``. Probabilities at or beyond the open
    interval (0, 1) are clamped to [EPS, 1-EPS]; every clamped entry bumps a
    module-level counter so saturation is observable rather than silent.
    """
    y = np.asarray(labels)
    if probs.data.ndim != 1 or y.shape != probs.shape:
        raise ContractError(
            f"probs and labels must be aligned vectors, got {probs.shape} and {y.shape}"
        )
    if not np.isin(y, (0, 1)).all():
        raise DataError("labels must be 0 or 1")
    w = weights.weights(use_normalized)
    if y.max(initial=0) >= len(w):
        raise DataError("weights missing an entry for a present class")

    global _clamp_count
    _clamp_count += int(np.count_nonzero((probs.data < EPS) | (probs.data > 1.0 - EPS)))

    dt = probs.dtype
    p = ad.clip(probs, EPS, 1.0 - EPS)
    yv = y.astype(dt)
    wv = np.where(y == 1, w[1] if len(w) > 1 else w[0], w[0]).astype(dt)
    log_p = ad.log(p)
    log_q = ad.log(ad.sub(ad.Tensor(np.ones_like(yv)), p))
    nll = ad.sub(
        ad.mul(ad.Tensor(-yv), log_p),
        ad.mul(ad.Tensor(1.0 - yv), log_q),
    )
    return ad.tmean(ad.mul(ad.Tensor(wv), nll))
