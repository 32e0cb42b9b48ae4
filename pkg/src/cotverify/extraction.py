"""Answer extraction and normalization heuristics for sampled LLM responses.

Segments a raw response into rationale text and an answer, normalizes the
answer per answer format (numeric, yes/no, multiple choice, free form), and
flags responses the heuristics cannot separate.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import TYPE_CHECKING, Callable, Iterable, Sequence

if TYPE_CHECKING:  # pragma: no cover
    from .records import Instance

DEFAULT_TRIGGER = "The answer is"

# Characters stripped before scanning for vocabulary words: quotes, newlines,
# periods, colons, commas. Whitespace runs are collapsed, never deleted, so
# word boundaries survive normalization.
_STRIP_CHARS = "'\"‘’“”\n\r.:,"
_PAREN_CHARS = "()"

_NUMBER_RE = re.compile(r"\d+(?:,\d{3})*(?:\.\d+)?")


class ExtractionMethod(str, Enum):
    TRIGGER = "trigger"
    LAST_NUMBER = "last_number"
    NORMALIZE_SCAN = "normalize_scan"
    MANUAL_MARKER = "manual_marker"


@dataclass(frozen=True)
class ExtractionOutcome:
    """Result of running the extraction pipeline over one raw response."""

    rationale: tuple[str, ...]
    answer: str
    method_used: ExtractionMethod

    @property
    def atypical(self) -> bool:
        """True exactly when no heuristic could separate the response."""
        return self.method_used is ExtractionMethod.MANUAL_MARKER


@dataclass(frozen=True)
class TriggerTable:
    """Ordered trigger phrases per (dataset, llm), with a global default.

    Lookup always yields the default phrase first; dataset/llm specific
    phrases are tried after it, in their listed order.
    """

    entries: dict[tuple[str, str], tuple[str, ...]] = field(default_factory=dict)
    default: str = DEFAULT_TRIGGER

    def lookup(self, dataset: str, llm: str) -> tuple[str, ...]:
        specific = self.entries.get((dataset, llm), ())
        return (self.default, *specific)

    @classmethod
    def from_json_file(cls, path) -> "TriggerTable":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        entries = {
            (e["dataset"], e["llm"]): tuple(e["triggers"]) for e in obj.get("entries", [])
        }
        for key, phrases in entries.items():
            if not phrases:
                raise ValueError(f"empty trigger list for {key}")
        return cls(entries=entries, default=obj.get("default", DEFAULT_TRIGGER))


def load_default_triggers() -> TriggerTable:
    """Load the trigger table shipped with the package."""
    path = resources.files("cotverify").joinpath("data/triggers.json")
    with resources.as_file(path) as p:
        return TriggerTable.from_json_file(p)


def split_by_trigger(
    raw: str, triggers: Sequence[str]
) -> tuple[str, str] | None:
    """Split a response at the last occurrence of the first matching trigger.

    Triggers are tried in order; the first phrase that occurs anywhere in the
    text wins, and the split happens at its final occurrence (responses that
    echo the prompt may repeat the phrase before the actual answer). Matching
    is case-insensitive. Returns (rationale_text, answer_text), both stripped,
    or None when no trigger occurs.
    """
    if not triggers:
        raise ValueError("triggers must be non-empty")
    lowered = raw.lower()
    for trigger in triggers:
        needle = trigger.lower()
        if not needle:
            continue
        pos = lowered.rfind(needle)
        if pos >= 0:
            return raw[:pos].strip(), raw[pos + len(needle):].strip()
    return None


def extract_last_number(raw: str) -> str | None:
    """Return the last numeric token in the text, or None.

    A period right after digits is sentence punctuation, not a decimal point
    ("$5." yields "5"), while a digit.digit period is kept ("3.50"). Commas in
    digit groups are stripped ("146,606" yields "146606"). Signs are ignored.
    """
    matches = _NUMBER_RE.findall(raw)
    if not matches:
        return None
    return matches[-1].replace(",", "")


def _clean_for_scan(text: str, *, remove_parens: bool = False) -> str:
    chars = _STRIP_CHARS + (_PAREN_CHARS if remove_parens else "")
    cleaned = text.translate({ord(c): " " for c in chars})
    return re.sub(r"\s+", " ", cleaned).strip()


def _scan_words(
    text: str, words: Iterable[str], *, case_sensitive: bool
) -> set[str]:
    """Return the subset of vocabulary words occurring as whole tokens."""
    found = set()
    flags = 0 if case_sensitive else re.IGNORECASE
    for word in words:
        if re.search(rf"\b{re.escape(word)}\b", text, flags):
            found.add(word)
    return found


def normalize_binary(raw: str, vocab: tuple[str, str] = ("yes", "no")) -> str:
    """Reduce a response to one of two vocabulary words, or void.

    Strips quotes, newlines, periods, colons, commas and collapses whitespace,
    then scans case-insensitively for both words. Exactly one distinct word
    present yields that word; both present (ambiguous) or neither present
    yields the void string.
    """
    pos, neg = vocab
    if pos == neg or pos != pos.lower() or neg != neg.lower():
        raise ValueError("vocab words must be distinct and lowercase")
    cleaned = _clean_for_scan(raw)
    found = _scan_words(cleaned, (pos, neg), case_sensitive=False)
    if len(found) == 1:
        return next(iter(found))
    return ""


def normalize_choice(raw: str, choices: Iterable[str]) -> str:
    """Reduce a response to one choice label, or void.

    Same scan rule as normalize_binary, with parentheses also removed first.
    Labels are matched case-sensitively: single-letter labels such as "A"
    would otherwise collide with the English article.
    """
    labels = tuple(choices)
    if not labels:
        raise ValueError("choices must be non-empty")
    cleaned = _clean_for_scan(raw, remove_parens=True)
    found = _scan_words(cleaned, labels, case_sensitive=True)
    if len(found) == 1:
        return next(iter(found))
    return ""


def _normalize_free(text: str) -> str:
    out = text.strip().strip("'\"‘’“”").strip()
    out = out.rstrip(".!? ").strip()
    return out


def split_sentences_with_spans(text: str) -> list[tuple[str, int, int]]:
    """Segment text into sentences, keeping (sentence, start, end) offsets.

    A boundary is '.', '?' or '!' followed by whitespace or end of text; a
    period between two digits therefore never splits (it is followed by a
    digit, not whitespace). No abbreviation heuristics. Empty segments are
    dropped.
    """
    out: list[tuple[str, int, int]] = []
    start = 0
    n = len(text)
    for i, ch in enumerate(text):
        if ch in ".?!" and (i + 1 == n or text[i + 1].isspace()):
            segment = text[start : i + 1]
            stripped = segment.strip()
            if stripped:
                lead = len(segment) - len(segment.lstrip())
                out.append((stripped, start + lead, start + lead + len(stripped)))
            start = i + 1
    tail = text[start:]
    stripped = tail.strip()
    if stripped:
        lead = len(tail) - len(tail.lstrip())
        out.append((stripped, start + lead, start + lead + len(stripped)))
    return out


def split_sentences(text: str) -> tuple[str, ...]:
    return tuple(s for s, _, _ in split_sentences_with_spans(text))


def extract_response(
    raw: str,
    answer_format: str,
    triggers: TriggerTable | None = None,
    dataset: str = "",
    llm: str = "",
    *,
    binary_vocab: tuple[str, str] = ("yes", "no"),
    choice_labels: Iterable[str] = ("A", "B", "C", "D"),
) -> ExtractionOutcome:
    """Run the full extraction pipeline over one raw response.

    Trigger splitting is tried first; when no trigger occurs, the fallback
    depends on the answer format: numeric responses fall back to the last
    number in the whole text, binary and multiple-choice responses to a
    vocabulary scan over the whole text, and free-form responses are marked
    atypical with a void answer. Ambiguous vocabulary scans (both words
    present) yield a void answer without the atypical marker: the response
    was processed, the answer is deliberately unusable.
    """
    fmt = getattr(answer_format, "value", answer_format)
    table = triggers if triggers is not None else TriggerTable()
    split = split_by_trigger(raw, table.lookup(dataset, llm))

    if split is not None:
        rationale_text, answer_text = split
        if fmt == "numeric":
            answer = extract_last_number(answer_text) or ""
        elif fmt == "binary":
            answer = normalize_binary(answer_text, binary_vocab)
        elif fmt == "multiple_choice":
            answer = normalize_choice(answer_text, choice_labels)
        else:
            answer = _normalize_free(answer_text)
        return ExtractionOutcome(
            rationale=split_sentences(rationale_text),
            answer=answer,
            method_used=ExtractionMethod.TRIGGER,
        )

    whole = split_sentences(raw)
    if fmt == "numeric":
        number = extract_last_number(raw)
        if number is not None:
            return ExtractionOutcome(whole, number, ExtractionMethod.LAST_NUMBER)
        return ExtractionOutcome(whole, "", ExtractionMethod.MANUAL_MARKER)
    if fmt in ("binary", "multiple_choice"):
        if fmt == "binary":
            cleaned = _clean_for_scan(raw)
            found = _scan_words(cleaned, binary_vocab, case_sensitive=False)
        else:
            cleaned = _clean_for_scan(raw, remove_parens=True)
            found = _scan_words(cleaned, tuple(choice_labels), case_sensitive=True)
        if not found:
            return ExtractionOutcome(whole, "", ExtractionMethod.MANUAL_MARKER)
        answer = next(iter(found)) if len(found) == 1 else ""
        return ExtractionOutcome(whole, answer, ExtractionMethod.NORMALIZE_SCAN)
    return ExtractionOutcome(whole, "", ExtractionMethod.MANUAL_MARKER)


def normalize_answer(answer: str) -> str:
    """Canonical form used for answer comparison and vote tallying.

    Case-folded, surrounding whitespace and quotes stripped, trailing sentence
    punctuation removed, inner whitespace collapsed. The void answer maps to
    itself.
    """
    out = answer.strip().strip("'\"‘’“”")
    out = out.rstrip(".!? ")
    out = re.sub(r"\s+", " ", out)
    return out.casefold()


def answers_match(final_answer: str, gold: Iterable[str]) -> bool:
    """True when the final answer matches any acceptable gold answer.

    Matching happens under normalize_answer; a void final answer never
    matches.
    """
    norm = normalize_answer(final_answer)
    if not norm:
        return False
    return norm in {normalize_answer(g) for g in gold}


def filter_unparseable(
    instances: Iterable["Instance"],
    max_failures: int = 3,
    *,
    is_failure: Callable[[object], bool] | None = None,
) -> tuple[list["Instance"], list["Instance"]]:
    """Partition instances by extraction-failure count.

    Instances with strictly more than max_failures failed responses are
    dropped; the boundary count is kept. A response counts as failed when its
    answer is void (the persisted record format does not keep the atypical
    marker); pipelines with richer information can pass their own predicate.
    """
    failed = is_failure if is_failure is not None else (lambda r: r.answer == "")
    kept: list["Instance"] = []
    dropped: list["Instance"] = []
    for instance in instances:
        failures = sum(1 for r in instance.responses if failed(r))
        if failures > max_failures:
            dropped.append(instance)
        else:
            kept.append(instance)
    return kept, dropped
