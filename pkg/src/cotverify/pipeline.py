"""Ingestion helpers composing extraction into model objects.

Turns raw response texts into Response and Instance values: runs the
extraction pipeline, segments the full text into sentences, locates the
trailing answer-statement span where identifiable, majority-votes the final
answer, and labels the instance against its gold answers.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from .extraction import (
    ExtractionMethod,
    TriggerTable,
    answers_match,
    extract_last_number,
    extract_response,
    split_sentences_with_spans,
)
from .records import AnswerFormat, Instance, Label, Response, validate_instance
from .voting import majority_vote


def _sentence_index_at(spans: Sequence[tuple[str, int, int]], offset: int) -> int | None:
    for i, (_, start, end) in enumerate(spans):
        if start <= offset < end:
            return i
    return None


def _trigger_offset(raw: str, triggers: Iterable[str]) -> int | None:
    lowered = raw.lower()
    for trigger in triggers:
        pos = lowered.rfind(trigger.lower())
        if pos >= 0:
            return pos
    return None


def build_response(
    raw: str,
    answer_format: AnswerFormat,
    triggers: TriggerTable | None = None,
    dataset: str = "",
    llm: str = "",
) -> Response:
    """Extract one raw response into a Response with its answer span.

    The stored sentence list covers the whole raw text. For trigger-extracted
    answers the span starts at the sentence containing the final trigger
    occurrence; for last-number extraction it marks the final sentence when
    that sentence holds the number, otherwise the rationale is the whole text
    with no span.
    """
    table = triggers if triggers is not None else TriggerTable()
    outcome = extract_response(raw, answer_format, table, dataset, llm)
    spans = split_sentences_with_spans(raw)
    sentences = tuple(s for s, _, _ in spans)
    span: tuple[int, int] | None = None
    if outcome.method_used is ExtractionMethod.TRIGGER:
        offset = _trigger_offset(raw, table.lookup(dataset, llm))
        if offset is not None:
            idx = _sentence_index_at(spans, offset)
            if idx is not None:
                span = (idx, len(sentences))
    elif outcome.method_used is ExtractionMethod.LAST_NUMBER and sentences:
        number = extract_last_number(raw)
        if number is not None:
            last_match = None
            for m in re.finditer(r"\d+(?:,\d{3})*(?:\.\d+)?", raw):
                last_match = m
            if last_match is not None:
                idx = _sentence_index_at(spans, last_match.start())
                if idx == len(sentences) - 1:
                    span = (idx, len(sentences))
    return Response(
        raw_text=raw,
        rationale=sentences,
        answer=outcome.answer,
        answer_sentence_span=span,
    )


def build_instance(
    instance_id: str,
    question: str,
    dataset: str,
    llm: str,
    answer_format: AnswerFormat,
    raw_responses: Sequence[str],
    gold: Sequence[str],
    triggers: TriggerTable | None = None,
) -> Instance:
    """Build a validated Instance from raw response texts.

    The final answer comes from majority voting over extracted answers and
    the label from matching it against the gold set.
    """
    responses = tuple(
        build_response(raw, answer_format, triggers, dataset, llm) for raw in raw_responses
    )
    tally = majority_vote([r.answer for r in responses])
    label = Label.TRUE if answers_match(tally.winner, gold) else Label.FALSE
    instance = Instance(
        id=instance_id,
        question=question,
        dataset=dataset,
        llm=llm,
        answer_format=answer_format,
        responses=responses,
        final_answer=tally.winner,
        gold=tuple(gold),
        label=label,
    )
    validate_instance(instance)
    return instance
