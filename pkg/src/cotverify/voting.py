"""Majority voting over extracted answers and the agreement score.

The agreement score (ADS) is the number of responses voting for the winning
answer; its normalized form rescales it into [-1, 1] so it can be combined
with the pairwise consistency score.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .extraction import normalize_answer


@dataclass(frozen=True)
class VoteTally:
    """Outcome of majority voting over one instance's answers.

    counts maps each normalized non-void answer to its frequency; winner is
    the answer with maximal count, ties broken by earliest response index.
    When every answer is void the winner is the void string and ads is 0.
    """

    counts: dict[str, int]
    winner: str
    ads: int
    n: int


def majority_vote(answers: Sequence[str]) -> VoteTally:
    """Tally answers and pick the majority winner.

    Answers are normalized (case, surrounding whitespace, trailing
    punctuation) before tallying. Void answers vote for nobody but still
    count toward n: the normalization denominator is the number of sampled
    responses, not the number of parseable answers.
    """
    if not answers:
        raise ValueError("need at least one answer")
    counts: dict[str, int] = {}
    for answer in answers:
        normalized = normalize_answer(answer)
        if not normalized:
            continue
        counts[normalized] = counts.get(normalized, 0) + 1
    if not counts:
        return VoteTally(counts={}, winner="", ads=0, n=len(answers))
    # dict preserves first-occurrence order, so max() over items resolves
    # ties in favour of the earliest response index.
    winner, top = max(counts.items(), key=lambda kv: kv[1])
    return VoteTally(counts=counts, winner=winner, ads=top, n=len(answers))


def normalized_ads(ads: int, n: int) -> float:
    """Rescale an agreement count into [-1, 1]: 2*(ads - n/2)/n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= ads <= n:
        raise ValueError(f"ads must be in [0, {n}], got {ads}")
    return (2 * ads - n) / n
