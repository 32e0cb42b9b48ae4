"""Process-consistency scoring over sampled reasoning chains.

The pairwise score (PPSS) of an ordered response pair aggregates per-sentence
entailment-minus-contradiction: for each sentence of the target response take
the best-supported score over the source response's sentences, then aggregate
across target sentences with min (default, so one contradicted sentence sinks
the pair) or mean. The process score (PSS) averages PPSS over response pairs;
the combined decision score (PDS) is the mean of the normalized agreement
score and PSS.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .backends import ScoreBackend, SentencePair
from .extraction import normalize_answer
from .records import Instance, Response
from .voting import majority_vote, normalized_ads


class DegenerateInputError(ValueError):
    """A response has no sentences left to score."""


class Variant(str, Enum):
    """Decision-score variants: the main method plus its ablations."""

    ADS = "ads"
    PDS = "pds"
    PDS_MINUS_ADS = "pds_minus_ads"
    PDS_WO_ANS = "pds_wo_ans"
    PDS_AVG = "pds_avg"
    PDS_HALOCHECK = "pds_halocheck"
    PDS_SELFCHECKNLI = "pds_selfchecknli"

    @property
    def aggregation(self) -> str:
        # HaloCheck shares the mean aggregation with the avg ablation; it
        # differs only in averaging over the unordered pair subset.
        if self in (Variant.PDS_AVG, Variant.PDS_HALOCHECK):
            return "avg"
        return "min"

    @property
    def strip_answer(self) -> bool:
        return self is Variant.PDS_WO_ANS

    @property
    def pair_scheme(self) -> str:
        if self is Variant.PDS_HALOCHECK:
            return "unordered"
        if self is Variant.PDS_SELFCHECKNLI:
            return "reference"
        return "ordered"


ALL_VARIANTS: tuple[Variant, ...] = tuple(Variant)


@dataclass(frozen=True)
class ScoreReport:
    """Per-instance scores plus the decision score of the chosen variant."""

    instance_id: str
    n: int
    ads: int
    ads_norm: float
    pss: float
    pds: float
    decision_score: float
    method: Variant
    variant_scores: dict[str, float] = field(default_factory=dict)
    degenerate: bool = False


def _scoring_sentences(response: Response, *, strip_answer: bool) -> tuple[str, ...]:
    return response.sentences(include_answer=not strip_answer)


def ppss(
    r_from: Response,
    r_to: Response,
    backend: ScoreBackend,
    aggregation: str = "min",
    strip_answer: bool = False,
) -> float:
    """Directional pairwise consistency of r_to against r_from, in [-1, 1].

    For target sentences b_j and source sentences a_i this is
    agg_j max_i (entail(a_i, b_j) - contradict(a_i, b_j)). All sentence pairs
    of the response pair go to the backend in a single batch.
    """
    sources = _scoring_sentences(r_from, strip_answer=strip_answer)
    targets = _scoring_sentences(r_to, strip_answer=strip_answer)
    if not sources or not targets:
        raise DegenerateInputError("both responses need at least one sentence after stripping")
    pairs = [SentencePair(a, b) for a in sources for b in targets]
    scores = backend.score_pairs(pairs)
    width = len(targets)
    per_target = [
        max(scores[i * width + j].margin for i in range(len(sources)))
        for j in range(width)
    ]
    if aggregation == "min":
        return min(per_target)
    if aggregation == "avg":
        return sum(per_target) / len(per_target)
    raise ValueError(f"unknown aggregation {aggregation!r}")


def _reference_index(responses: Sequence[Response], usable: Sequence[int]) -> int:
    """Reference response for the single-reference variant.

    Deterministically the lowest-index usable response whose answer equals
    the majority winner; falls back to the lowest-index usable response when
    votes are all void or the winner's responses are unusable.
    """
    tally = majority_vote([r.answer for r in responses])
    if tally.winner:
        for i in usable:
            if normalize_answer(responses[i].answer) == tally.winner:
                return i
    return usable[0]


def _pss_detailed(
    responses: Sequence[Response], backend: ScoreBackend, variant: Variant
) -> tuple[float, bool]:
    if len(responses) < 2:
        raise ValueError(f"need at least 2 responses, got {len(responses)}")
    strip = variant.strip_answer
    usable = [
        i for i, r in enumerate(responses) if _scoring_sentences(r, strip_answer=strip)
    ]
    if len(usable) < 2:
        # Too little signal either way; stay neutral rather than biasing a class.
        return 0.0, True

    def pair_score(i: int, j: int) -> float:
        return ppss(
            responses[i], responses[j], backend,
            aggregation=variant.aggregation, strip_answer=strip,
        )

    scheme = variant.pair_scheme
    if scheme == "reference":
        ref = _reference_index(responses, usable)
        terms = [pair_score(ref, j) for j in usable if j != ref]
    elif scheme == "unordered":
        terms = [pair_score(i, j) for i in usable for j in usable if i < j]
    else:
        terms = [pair_score(i, j) for i in usable for j in usable if i != j]
    if not terms:
        return 0.0, True
    return sum(terms) / len(terms), False


def pss(
    responses: Sequence[Response], backend: ScoreBackend, variant: Variant = Variant.PDS
) -> float:
    """Process score over a response set, per the variant's pair scheme.

    Ordered variants average PPSS over all n*(n-1) ordered pairs; the
    HaloCheck-style variant averages over unordered pairs i < j; the
    single-reference variant averages PPSS from one reference response to
    every other. Responses with no scorable sentences are skipped; with
    fewer than two usable responses the score is neutral 0.
    """
    value, _ = _pss_detailed(responses, backend, variant)
    return value


def pds(ads: int, n: int, pss_value: float) -> float:
    """Combined decision score: (normalized agreement + process score) / 2."""
    if not -1.0 <= pss_value <= 1.0:
        raise ValueError(f"pss must be in [-1, 1], got {pss_value}")
    return (normalized_ads(ads, n) + pss_value) / 2


class _MemoBackend:
    """Per-instance memo so multi-variant scoring hits each pair once."""

    def __init__(self, inner: ScoreBackend):
        self._inner = inner
        self._cache: dict[tuple[str, str], object] = {}

    def score_pairs(self, pairs: Sequence[SentencePair]) -> list:
        todo, seen = [], set()
        for p in pairs:
            key = (p.premise, p.hypothesis)
            if key not in self._cache and key not in seen:
                seen.add(key)
                todo.append(p)
        if todo:
            for p, s in zip(todo, self._inner.score_pairs(todo)):
                self._cache[(p.premise, p.hypothesis)] = s
        return [self._cache[(p.premise, p.hypothesis)] for p in pairs]


def _decision(variant: Variant, ads: int, pss_value: float, pds_value: float) -> float:
    if variant is Variant.ADS:
        return float(ads)
    if variant is Variant.PDS_MINUS_ADS:
        return pss_value
    return pds_value


def score_instance(
    instance: Instance,
    backend: ScoreBackend,
    variant: Variant = Variant.PDS,
    *,
    all_variants: bool = False,
) -> ScoreReport:
    """Score one instance and report every field.

    The decision score follows the variant: the agreement variant reports the
    raw vote count, the agreement-ablated variant reports the process score
    alone, and every other variant reports the combined score built from its
    own process score. With all_variants=True the report also carries each
    variant's decision score, computed off a shared pair memo.
    """
    if instance.n < 2:
        raise ValueError("need at least 2 responses to score an instance")
    tally = majority_vote([r.answer for r in instance.responses])
    ads_norm = normalized_ads(tally.ads, tally.n)

    scorer: ScoreBackend = _MemoBackend(backend) if all_variants else backend
    pss_value, degenerate = _pss_detailed(instance.responses, scorer, variant)
    pds_value = (ads_norm + pss_value) / 2
    decision = _decision(variant, tally.ads, pss_value, pds_value)

    variant_scores = {variant.value: decision}
    if all_variants:
        for other in ALL_VARIANTS:
            if other is variant:
                continue
            if other is Variant.ADS:
                variant_scores[other.value] = float(tally.ads)
                continue
            other_pss, _ = _pss_detailed(instance.responses, scorer, other)
            other_pds = (ads_norm + other_pss) / 2
            variant_scores[other.value] = _decision(other, tally.ads, other_pss, other_pds)
        variant_scores = {v.value: variant_scores[v.value] for v in ALL_VARIANTS}

    return ScoreReport(
        instance_id=instance.id,
        n=tally.n,
        ads=tally.ads,
        ads_norm=ads_norm,
        pss=pss_value,
        pds=pds_value,
        decision_score=decision,
        method=variant,
        variant_scores=variant_scores,
        degenerate=degenerate,
    )
