"""Benchmark data model and its line-delimited record codec.

One instance per line, UTF-8 JSON, fields exactly:
``id, question, dataset, llm, answer_format,
responses[{raw_text, rationale[], answer, answer_sentence_span?}],
final_answer, gold[], label``.

``answer_sentence_span`` is an optional ``[start, end)`` index range into the
response's sentence list marking the trailing sentences that state the
answer; it is omitted when absent so that parse and write round-trip exactly.
Unknown fields are rejected in strict mode and ignored in lenient mode.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from .extraction import answers_match


class ParseError(ValueError):
    """A record line is syntactically malformed."""

    def __init__(self, message: str, *, offset: int | None = None, line_no: int | None = None):
        self.offset = offset
        self.line_no = line_no
        where = []
        if line_no is not None:
            where.append(f"line {line_no}")
        if offset is not None:
            where.append(f"byte {offset}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class ValidationError(ValueError):
    """A structurally valid record violates a model invariant."""

    def __init__(self, field: str, message: str, *, line_no: int | None = None):
        self.field = field
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{prefix}{field}: {message}")


class Label(str, Enum):
    TRUE = "T"
    FALSE = "F"


class AnswerFormat(str, Enum):
    NUMERIC = "numeric"
    BINARY = "binary"
    MULTIPLE_CHOICE = "multiple_choice"
    FREE_FORM = "free_form"

    @property
    def discriminative(self) -> bool:
        """Fixed answer sets use the raised threshold regime."""
        return self in (AnswerFormat.BINARY, AnswerFormat.MULTIPLE_CHOICE)


@dataclass(frozen=True)
class Response:
    """One sampled response: full sentence list plus the extracted answer.

    ``rationale`` holds every sentence of the raw text in order. When the
    answer-stating sentences are identifiable, ``answer_sentence_span`` marks
    them as a trailing ``[start, end)`` range; the reasoning-only view is
    ``rationale[:start]``.
    """

    raw_text: str
    rationale: tuple[str, ...]
    answer: str
    answer_sentence_span: tuple[int, int] | None = None

    def sentences(self, *, include_answer: bool = True) -> tuple[str, ...]:
        if include_answer or self.answer_sentence_span is None:
            return self.rationale
        start, _ = self.answer_sentence_span
        return self.rationale[:start]


@dataclass(frozen=True)
class Instance:
    """One benchmark record; immutable after construction."""

    id: str
    question: str
    dataset: str
    llm: str
    answer_format: AnswerFormat
    responses: tuple[Response, ...]
    final_answer: str
    gold: tuple[str, ...]
    label: Label

    @property
    def n(self) -> int:
        return len(self.responses)


_INSTANCE_FIELDS = frozenset(
    {"id", "question", "dataset", "llm", "answer_format", "responses", "final_answer", "gold", "label"}
)
_RESPONSE_FIELDS = frozenset({"raw_text", "rationale", "answer", "answer_sentence_span"})


def _require_str(obj: dict, key: str, *, line_no: int | None = None) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise ValidationError(key, "must be a string", line_no=line_no)
    return value


def validate_response(response: Response, *, field: str = "responses", line_no: int | None = None) -> None:
    if not response.rationale and response.raw_text:
        raise ValidationError(field, "rationale is empty for non-empty raw_text", line_no=line_no)
    for sentence in response.rationale:
        if not isinstance(sentence, str) or not sentence.strip():
            raise ValidationError(field, "rationale sentences must be non-empty strings", line_no=line_no)
    span = response.answer_sentence_span
    if span is not None:
        start, end = span
        if not (0 <= start <= end == len(response.rationale)):
            raise ValidationError(
                field,
                f"answer_sentence_span {span!r} must be a trailing range of the "
                f"{len(response.rationale)}-sentence rationale",
                line_no=line_no,
            )


def validate_instance(instance: Instance, *, line_no: int | None = None) -> None:
    """Check every model invariant; raises ValidationError naming the field."""
    if not instance.id:
        raise ValidationError("id", "must be non-empty", line_no=line_no)
    if len(instance.responses) < 2:
        raise ValidationError("responses", "an instance needs at least 2 responses", line_no=line_no)
    for i, response in enumerate(instance.responses):
        validate_response(response, field=f"responses[{i}]", line_no=line_no)
    if not instance.gold:
        raise ValidationError("gold", "needs at least one acceptable answer", line_no=line_no)
    if any(not g for g in instance.gold):
        raise ValidationError("gold", "entries must be non-empty", line_no=line_no)
    matches = answers_match(instance.final_answer, instance.gold)
    if matches != (instance.label is Label.TRUE):
        raise ValidationError(
            "label",
            f"label {instance.label.value} disagrees with gold matching "
            f"(final_answer {instance.final_answer!r} vs gold {list(instance.gold)!r})",
            line_no=line_no,
        )


def _response_from_obj(obj: object, *, lenient: bool, field: str, line_no: int | None) -> Response:
    if not isinstance(obj, dict):
        raise ValidationError(field, "each response must be an object", line_no=line_no)
    if not lenient:
        unknown = set(obj) - _RESPONSE_FIELDS
        if unknown:
            raise ValidationError(field, f"unknown fields {sorted(unknown)}", line_no=line_no)
    raw_text = _require_str(obj, "raw_text", line_no=line_no)
    rationale = obj.get("rationale")
    if not isinstance(rationale, list):
        raise ValidationError(field, "rationale must be a list of sentences", line_no=line_no)
    answer = _require_str(obj, "answer", line_no=line_no)
    span_obj = obj.get("answer_sentence_span")
    span: tuple[int, int] | None = None
    if span_obj is not None:
        if (
            not isinstance(span_obj, list)
            or len(span_obj) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in span_obj)
        ):
            raise ValidationError(field, "answer_sentence_span must be [start, end]", line_no=line_no)
        span = (span_obj[0], span_obj[1])
    return Response(raw_text=raw_text, rationale=tuple(rationale), answer=answer, answer_sentence_span=span)


def parse_record(line: str, *, lenient: bool = False, line_no: int | None = None) -> Instance:
    """Parse one record line into a fully validated Instance.

    Malformed syntax raises ParseError with the byte offset of the failure;
    invariant violations raise ValidationError naming the offending field.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as err:
        byte_offset = len(line[: err.pos].encode("utf-8"))
        raise ParseError(f"invalid record syntax: {err.msg}", offset=byte_offset, line_no=line_no) from err
    if not isinstance(obj, dict):
        raise ParseError("record must be a JSON object", line_no=line_no)
    if not lenient:
        unknown = set(obj) - _INSTANCE_FIELDS
        if unknown:
            raise ValidationError("record", f"unknown fields {sorted(unknown)}", line_no=line_no)
    missing = _INSTANCE_FIELDS - set(obj)
    if missing:
        raise ValidationError("record", f"missing fields {sorted(missing)}", line_no=line_no)

    fmt_raw = _require_str(obj, "answer_format", line_no=line_no)
    try:
        answer_format = AnswerFormat(fmt_raw)
    except ValueError:
        raise ValidationError("answer_format", f"unknown format {fmt_raw!r}", line_no=line_no) from None
    label_raw = _require_str(obj, "label", line_no=line_no)
    try:
        label = Label(label_raw)
    except ValueError:
        raise ValidationError("label", f"must be 'T' or 'F', got {label_raw!r}", line_no=line_no) from None

    responses_obj = obj.get("responses")
    if not isinstance(responses_obj, list):
        raise ValidationError("responses", "must be a list", line_no=line_no)
    responses = tuple(
        _response_from_obj(r, lenient=lenient, field=f"responses[{i}]", line_no=line_no)
        for i, r in enumerate(responses_obj)
    )
    gold_obj = obj.get("gold")
    if not isinstance(gold_obj, list) or not all(isinstance(g, str) for g in gold_obj):
        raise ValidationError("gold", "must be a list of strings", line_no=line_no)

    instance = Instance(
        id=_require_str(obj, "id", line_no=line_no),
        question=_require_str(obj, "question", line_no=line_no),
        dataset=_require_str(obj, "dataset", line_no=line_no),
        llm=_require_str(obj, "llm", line_no=line_no),
        answer_format=answer_format,
        responses=responses,
        final_answer=_require_str(obj, "final_answer", line_no=line_no),
        gold=tuple(gold_obj),
        label=label,
    )
    validate_instance(instance, line_no=line_no)
    return instance


def _response_to_obj(response: Response) -> dict:
    obj: dict = {
        "raw_text": response.raw_text,
        "rationale": list(response.rationale),
        "answer": response.answer,
    }
    if response.answer_sentence_span is not None:
        obj["answer_sentence_span"] = list(response.answer_sentence_span)
    return obj


def write_record(instance: Instance) -> str:
    """Serialize an Instance to a single record line (no trailing newline).

    Round-trip stable: ``parse_record(write_record(x))`` equals ``x``.
    """
    obj = {
        "id": instance.id,
        "question": instance.question,
        "dataset": instance.dataset,
        "llm": instance.llm,
        "answer_format": instance.answer_format.value,
        "responses": [_response_to_obj(r) for r in instance.responses],
        "final_answer": instance.final_answer,
        "gold": list(instance.gold),
        "label": instance.label.value,
    }
    return json.dumps(obj, ensure_ascii=False)


def read_records(lines: Iterable[str], *, lenient: bool = False) -> Iterator[Instance]:
    """Parse an iterable of record lines, skipping blank lines."""
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        yield parse_record(line, lenient=lenient, line_no=line_no)


def load_records(path, *, lenient: bool = False) -> list[Instance]:
    with open(path, encoding="utf-8") as fh:
        return list(read_records(fh, lenient=lenient))


def dump_records(path, instances: Iterable[Instance]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for instance in instances:
            fh.write(write_record(instance))
            fh.write("\n")
