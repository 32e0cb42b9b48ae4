"""Deterministic synthetic benchmark suites for tests and demos.

Four instance shapes, mirroring the failure modes the scores are meant to
separate: consistent correct answers, disagreeing wrong answers (caught by
answer agreement alone), near-unanimous wrong answers whose rationales
contradict each other (caught only by process scoring), and the same
conflicted shape with a correct majority (a deliberate false positive for
process scoring). Token choices are tuned to the deterministic mock backend.
"""

from __future__ import annotations

import argparse
import random
from typing import Sequence

from .pipeline import build_instance
from .records import AnswerFormat, Instance
from . import records

_ADJECTIVES = ["Ancient", "Modern", "Coastal", "Northern", "Famous", "Quiet", "Remote", "Grand"]
_NOUNS = ["tower", "bridge", "castle", "museum", "harbor", "garden", "library", "station"]
_VERBS = ["opened", "closed", "expanded", "reopened", "collapsed", "flourished"]
_PLACES = ["downtown", "nearby", "overseas", "inland", "offshore"]
_CITIES = ["london", "berlin", "paris", "madrid", "rome", "vienna", "oslo", "dublin", "lisbon", "prague"]

_DATASET = "synthetic"
_LLM = "mockgen"


def _pick_two_cities(rng: random.Random) -> tuple[str, str]:
    a, b = rng.sample(_CITIES, 2)
    return a, b


def consistent_true(rng: random.Random, idx: int) -> Instance:
    """Unanimous correct answer with identical rationales."""
    noun = rng.choice(_NOUNS)
    adj = rng.choice(_ADJECTIVES)
    year = rng.randint(1200, 1999)
    answer = rng.choice(_CITIES)
    raw = f"{adj} {noun} stood near {answer} since {year}. The answer is {answer}."
    return build_instance(
        instance_id=f"true-{idx:04d}",
        question=f"Which city is linked to the {noun} ({idx})?",
        dataset=_DATASET,
        llm=_LLM,
        answer_format=AnswerFormat.FREE_FORM,
        raw_responses=[raw] * 5,
        gold=[answer],
    )


def disagree_false(rng: random.Random, idx: int) -> Instance:
    """Wrong answers that fail to reach consensus; anyone can catch these.

    Rationales use disjoint content words so cross-chain support stays flat.
    """
    answers = rng.sample(_CITIES, 4)
    gold = next(c for c in _CITIES if c not in answers)
    per_response = [answers[0], answers[0], answers[1], answers[2], answers[3]]
    adjs = rng.sample(_ADJECTIVES, 5)
    nouns = rng.sample(_NOUNS, 5)
    verbs = rng.sample(_VERBS, 5)
    places = rng.sample(_PLACES, 5)
    years = rng.sample(range(1200, 1999), 5)
    raws = [
        f"{adjs[k]} {nouns[k]} {verbs[k]} {places[k]} {years[k]}. The answer is {per_response[k]}."
        for k in range(5)
    ]
    return build_instance(
        instance_id=f"spread-{idx:04d}",
        question=f"Which city is linked to the records ({idx})?",
        dataset=_DATASET,
        llm=_LLM,
        answer_format=AnswerFormat.FREE_FORM,
        raw_responses=raws,
        gold=[gold],
    )


def _conflicted_raws(rng: random.Random, majority: str, other: str) -> list[str]:
    noun = rng.choice(_NOUNS)
    year = rng.randint(1200, 1999)
    base = f"the {noun} was built in {year}"
    variants = [
        f"The {noun} was built in {year} so the answer is {majority}.",
        f"The {noun} was not built in {year} so the answer is {majority}.",
        f"The {noun} was never built in {year} so the answer is {majority}.",
        f"No, {base} so the answer is {majority}.",
    ]
    dissent = (
        f"No, the {noun} was never built in {year} so the answer is {majority}. "
        f"Actually the answer is {other}."
    )
    return variants + [dissent]


def contradictory_false(rng: random.Random, idx: int) -> Instance:
    """Near-unanimous wrong answer over mutually contradictory rationales.

    Four of five responses agree, so agreement-based checking passes the
    instance; the chains negate each other, so process scoring flags it.
    """
    majority, other = _pick_two_cities(rng)
    gold = next(c for c in _CITIES if c not in (majority, other))
    return build_instance(
        instance_id=f"conflict-{idx:04d}",
        question=f"Which city is linked to the dispute ({idx})?",
        dataset=_DATASET,
        llm=_LLM,
        answer_format=AnswerFormat.FREE_FORM,
        raw_responses=_conflicted_raws(rng, majority, other),
        gold=[gold],
    )


def contradictory_true(rng: random.Random, idx: int) -> Instance:
    """Conflicted chains whose majority answer happens to be right.

    Process scoring trades some precision for recall; these instances are its
    false positives.
    """
    majority, other = _pick_two_cities(rng)
    return build_instance(
        instance_id=f"noisytrue-{idx:04d}",
        question=f"Which city is linked to the legend ({idx})?",
        dataset=_DATASET,
        llm=_LLM,
        answer_format=AnswerFormat.FREE_FORM,
        raw_responses=_conflicted_raws(rng, majority, other),
        gold=[majority],
    )


def generate_suite(
    n_true: int = 100,
    n_true_conflict: int = 5,
    n_false_disagree: int = 70,
    n_false_conflict: int = 30,
    seed: int = 7,
) -> list[Instance]:
    """Build and shuffle a labeled suite; deterministic for a given seed."""
    rng = random.Random(seed)
    instances: list[Instance] = []
    for i in range(n_true):
        instances.append(consistent_true(rng, i))
    for i in range(n_true_conflict):
        instances.append(contradictory_true(rng, i))
    for i in range(n_false_disagree):
        instances.append(disagree_false(rng, i))
    for i in range(n_false_conflict):
        instances.append(contradictory_false(rng, i))
    rng.shuffle(instances)
    return instances


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="generate a synthetic benchmark suite")
    parser.add_argument("-o", "--output", required=True, help="output record file (JSONL)")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--true", dest="n_true", type=int, default=100)
    parser.add_argument("--true-conflict", dest="n_true_conflict", type=int, default=5)
    parser.add_argument("--false-disagree", dest="n_false_disagree", type=int, default=70)
    parser.add_argument("--false-conflict", dest="n_false_conflict", type=int, default=30)
    args = parser.parse_args(argv)
    suite = generate_suite(
        n_true=args.n_true,
        n_true_conflict=args.n_true_conflict,
        n_false_disagree=args.n_false_disagree,
        n_false_conflict=args.n_false_conflict,
        seed=args.seed,
    )
    records.dump_records(args.output, suite)
    print(f"wrote {len(suite)} instances to {args.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
