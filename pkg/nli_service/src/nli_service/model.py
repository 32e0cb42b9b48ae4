"""Sentence-pair scorers: a pretrained NLI checkpoint or the offline stub.

Both expose the same surface: raw logits per pair plus the checkpoint's own
id2label metadata. The softmax and the label-role mapping live here so the
service never hardcodes which logit index means entailment; checkpoint
conventions differ.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Protocol, Sequence

from .config import ServiceConfig

Pair = tuple[str, str]


class PairScorer(Protocol):
    identifier: str
    id2label: dict[int, str]

    def logits(self, pairs: Sequence[Pair]) -> list[list[float]]: ...

    def too_long(self, premise: str, hypothesis: str) -> bool: ...


class StubScorer:
    """Deterministic hash-based scorer for development and protocol tests.

    The label order is deliberately nonstandard so that anything assuming a
    fixed entail/neutral/contradict index breaks loudly in tests.
    """

    identifier = "stub"
    id2label = {0: "CONTRADICTION", 1: "ENTAILMENT", 2: "NEUTRAL"}
    max_chars = 4096

    def logits(self, pairs: Sequence[Pair]) -> list[list[float]]:
        out = []
        for premise, hypothesis in pairs:
            digest = hashlib.sha256(f"{premise}\x00{hypothesis}".encode()).digest()
            out.append(
                [4.0 * (int.from_bytes(digest[k : k + 8], "big") / 2**64 - 0.5) for k in (0, 8, 16)]
            )
        return out

    def too_long(self, premise: str, hypothesis: str) -> bool:
        return len(premise) + len(hypothesis) > self.max_chars


class TransformersScorer:
    """Wraps a 3-way sequence-classification checkpoint in evaluation mode."""

    def __init__(self, model_id: str, device: str = "cpu"):
        import torch
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self._torch = torch
        self.identifier = model_id
        self._tokenizer = AutoTokenizer.from_pretrained(model_id)
        self._model = AutoModelForSequenceClassification.from_pretrained(model_id)
        self._model.to(device)
        self._model.eval()
        self.id2label = {int(k): v for k, v in self._model.config.id2label.items()}
        self._max_tokens = int(getattr(self._tokenizer, "model_max_length", 512))

    def logits(self, pairs: Sequence[Pair]) -> list[list[float]]:
        premises = [p for p, _ in pairs]
        hypotheses = [h for _, h in pairs]
        encoded = self._tokenizer(premises, hypotheses, padding=True, return_tensors="pt")
        encoded = {k: v.to(self._model.device) for k, v in encoded.items()}
        with self._torch.no_grad():
            out = self._model(**encoded).logits
        return out.cpu().tolist()

    def too_long(self, premise: str, hypothesis: str) -> bool:
        ids = self._tokenizer(premise, hypothesis)["input_ids"]
        return len(ids) > self._max_tokens


@dataclass(frozen=True)
class LabelRoles:
    entail: int
    neutral: int
    contradict: int


def resolve_label_roles(id2label: dict[int, str]) -> LabelRoles:
    """Map logit indices to entail/neutral/contradict from label metadata."""
    roles: dict[str, int] = {}
    for index, label in id2label.items():
        name = label.lower()
        if "entail" in name:
            roles["entail"] = index
        elif "contradict" in name:
            roles["contradict"] = index
        elif "neutral" in name:
            roles["neutral"] = index
    missing = {"entail", "neutral", "contradict"} - set(roles)
    if missing:
        raise ValueError(f"checkpoint labels {id2label} do not cover roles {sorted(missing)}")
    return LabelRoles(**roles)


def softmax_triple(logits: Sequence[float], roles: LabelRoles) -> dict[str, float]:
    peak = max(logits)
    exps = [math.exp(x - peak) for x in logits]
    total = sum(exps)
    probs = [x / total for x in exps]
    return {
        "entail": probs[roles.entail],
        "neutral": probs[roles.neutral],
        "contradict": probs[roles.contradict],
    }


def load_scorer(config: ServiceConfig) -> PairScorer:
    if config.model_id == "stub":
        return StubScorer()
    return TransformersScorer(config.model_id, config.device)
