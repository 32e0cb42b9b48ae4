"""Shared fixtures: instance builders, the conflicted-consensus scenario, and
deterministic randomized backends."""

from __future__ import annotations

import hashlib
import json
import random

import pytest

from cotverify import (
    AnswerFormat,
    EntailmentScores,
    Instance,
    Label,
    Response,
    ScriptedBackend,
    answers_match,
    majority_vote,
)
from cotverify.pipeline import build_instance


def make_response(sentences, answer, span=None, raw=None) -> Response:
    raw_text = raw if raw is not None else " ".join(sentences)
    return Response(
        raw_text=raw_text,
        rationale=tuple(sentences),
        answer=answer,
        answer_sentence_span=span,
    )


def make_instance(
    instance_id,
    responses,
    gold,
    fmt=AnswerFormat.FREE_FORM,
    dataset="fixture",
    llm="fixture-llm",
    question="q?",
) -> Instance:
    tally = majority_vote([r.answer for r in responses])
    label = Label.TRUE if answers_match(tally.winner, gold) else Label.FALSE
    return Instance(
        id=instance_id,
        question=question,
        dataset=dataset,
        llm=llm,
        answer_format=fmt,
        responses=tuple(responses),
        final_answer=tally.winner,
        gold=tuple(gold),
        label=label,
    )


class RandomTripleBackend:
    """Pure backend emitting arbitrary valid simplex triples per pair.

    Deterministic: the triple is a hash of (seed, premise, hypothesis), so
    repeated queries for the same pair always agree.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    def _triple(self, premise: str, hypothesis: str) -> EntailmentScores:
        digest = hashlib.sha256(f"{self.seed}|{premise}\x00{hypothesis}".encode()).digest()
        a = int.from_bytes(digest[0:8], "big") / 2**64
        b = int.from_bytes(digest[8:16], "big") / 2**64
        c = int.from_bytes(digest[16:24], "big") / 2**64
        total = a + b + c
        if total == 0.0:
            return EntailmentScores(1.0, 0.0, 0.0)
        return EntailmentScores(a / total, b / total, c / total)

    def score_pairs(self, pairs):
        return [self._triple(p.premise, p.hypothesis) for p in pairs]

    def score_fn(self, premise: str, hypothesis: str) -> EntailmentScores:
        return self._triple(premise, hypothesis)


# The conflicted-consensus scenario: four of five chains agree on a wrong
# answer while every chain names a different actor, so answer agreement is
# high but cross-chain entailment is strongly negative.
_CONFLICT_RAWS = [
    "First, the Russian hostage taker Boris is played by George Wendt, an American actor, so the answer is American.",
    "First, the hostage taker Boris is portrayed by Gene Hackman, an American actor, so the answer is American.",
    "First, the hostage taker Boris is played by Dan Aykroyd, an American actor, so the answer is American.",
    "First, the hostage taker Boris is played by Bill Murray, an American actor, so the answer is American.",
    "First, the Russian hostage taker in Hostage for a Day is played by John Candy, a Canadian actor, so the answer is Canadian.",
]

_CONTRADICTION = {"entail": 0.02, "neutral": 0.05, "contradict": 0.93}


def conflict_instance() -> Instance:
    return build_instance(
        instance_id="conflict-consensus-1",
        question='What was the nationality of the actor playing a Russian hostage taker in "Hostage for a Day"?',
        dataset="fixture-openqa",
        llm="fixture-llm",
        answer_format=AnswerFormat.FREE_FORM,
        raw_responses=_CONFLICT_RAWS,
        gold=["Canadian"],
    )


def conflict_table_entries() -> list[dict]:
    instance = conflict_instance()
    sentence_sets = [r.rationale for r in instance.responses]
    entries = []
    for i, src in enumerate(sentence_sets):
        for j, dst in enumerate(sentence_sets):
            if i == j:
                continue
            for a in src:
                for b in dst:
                    entries.append({"premise": a, "hypothesis": b, **_CONTRADICTION})
    return entries


@pytest.fixture
def conflict_fixture():
    instance = conflict_instance()
    table = {
        (e["premise"], e["hypothesis"]): EntailmentScores(e["entail"], e["neutral"], e["contradict"])
        for e in conflict_table_entries()
    }
    return instance, ScriptedBackend(table)


@pytest.fixture
def conflict_table_file(tmp_path):
    path = tmp_path / "scripted_table.json"
    path.write_text(json.dumps(conflict_table_entries()), encoding="utf-8")
    return path


@pytest.fixture
def rng():
    return random.Random(1234)
