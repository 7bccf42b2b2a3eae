"""Turn change scores into rankings and binary changed/stable labels.

Binary labels come either from a fixed ratio (the top share of the
ranking is labelled changed) or from an automatic change point: the
single split of the descending score sequence minimising the total
within-segment squared deviation from the segment means.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

from .errors import DataError

Ranking = list[tuple[str, float]]


def round_half_up(x: float) -> int:
    """Round to the nearest integer with .5 going up (no banker's
    rounding)."""
    return int(math.floor(x + 0.5))


def rank_words(scores: Mapping[str, float]) -> Ranking:
    """Order words by descending score; ties break by ascending word_id."""
    if not scores:
        raise DataError("cannot rank an empty score set")
    return sorted(scores.items(), key=lambda item: (-item[1], item[0]))


def classify_topn(ranking: Ranking, ratio: float) -> dict[str, int]:
    """Label the top round(ratio * N) words as changed (1), the rest
    stable (0)."""
    if not 0.0 <= ratio <= 1.0:
        raise DataError(f"ratio must be in [0, 1], got {ratio}")
    n = round_half_up(ratio * len(ranking))
    return {word_id: (1 if i < n else 0) for i, (word_id, _) in enumerate(ranking)}


def _segment_cost(scores: Sequence[float]) -> float:
    mean = math.fsum(scores) / len(scores)
    return math.fsum((s - mean) ** 2 for s in scores)


def split_costs(scores: Sequence[float]) -> list[float]:
    """L2 cost of every single split k in 1..N-1: the sum of squared
    deviations from the mean within scores[:k] and scores[k:]."""
    return [_segment_cost(scores[:k]) + _segment_cost(scores[k:])
            for k in range(1, len(scores))]


def classify_changepoint(ranking: Ranking) -> dict[str, int]:
    """Label words above the detected change point as changed.

    The descending score sequence is treated as a 1-D signal; the
    breakpoint is the cost-minimising single split (exhaustive search,
    which for one breakpoint is the full dynamic program). Ties go to
    the lowest split index, so the labelling is deterministic.
    """
    if len(ranking) < 3:
        raise DataError("change-point classification needs at least 3 words; "
                        "use top-n classification instead")
    scores = [score for _, score in ranking]
    costs = split_costs(scores)
    best_k = 1
    best_cost = costs[0]
    for k, cost in enumerate(costs[1:], start=2):
        if cost < best_cost:
            best_cost = cost
            best_k = k
    return {word_id: (1 if i < best_k else 0)
            for i, (word_id, _) in enumerate(ranking)}


def average_binary(labels_morph: Mapping[str, int],
                   labels_synt: Mapping[str, int]) -> dict[str, int]:
    """Combine two binary labelings by averaging and rounding half up,
    so (1, 0) resolves to 1."""
    if set(labels_morph) != set(labels_synt):
        missing = sorted(set(labels_morph) ^ set(labels_synt))
        raise DataError(f"label word sets differ: {missing}")
    return {word_id: round_half_up((labels_morph[word_id] + labels_synt[word_id]) / 2.0)
            for word_id in labels_morph}
