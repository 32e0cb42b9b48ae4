"""Threshold classification, FALSE-as-positive metrics, and edit gating.

An instance is predicted FALSE when its decision score falls strictly below
the threshold. Incorrect answers are the positive class throughout: true
positives are instances labeled F and predicted F.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Collection, Iterable, Mapping, Sequence

from .extraction import answers_match
from .records import AnswerFormat, Instance, Label
from .scoring import ScoreBackend, ScoreReport, Variant, score_instance

GENERATIVE_ADS_THRESHOLD = 2.5
GENERATIVE_PDS_THRESHOLD = 0.0
DISCRIMINATIVE_ADS_THRESHOLD = 4.5
DISCRIMINATIVE_PDS_THRESHOLD = 0.4


class Regime(str, Enum):
    GENERATIVE = "generative"
    DISCRIMINATIVE = "discriminative"


@dataclass(frozen=True)
class ThresholdPolicy:
    """Decision thresholds for one task regime.

    Free-form and numeric tasks use the generative pair (2.5 for the raw
    agreement count, 0 for combined scores); fixed-answer-set tasks use the
    raised discriminative pair (4.5 and 0.4). The combined-score threshold is
    half the normalized agreement threshold, consistent with the neutral
    process score sitting at 0.
    """

    regime: Regime
    ads_threshold: float
    pds_threshold: float

    @classmethod
    def generative(cls) -> "ThresholdPolicy":
        return cls(Regime.GENERATIVE, GENERATIVE_ADS_THRESHOLD, GENERATIVE_PDS_THRESHOLD)

    @classmethod
    def discriminative(cls) -> "ThresholdPolicy":
        return cls(Regime.DISCRIMINATIVE, DISCRIMINATIVE_ADS_THRESHOLD, DISCRIMINATIVE_PDS_THRESHOLD)

    @classmethod
    def for_format(cls, answer_format: AnswerFormat) -> "ThresholdPolicy":
        if answer_format.discriminative:
            return cls.discriminative()
        return cls.generative()

    def with_overrides(
        self, ads_threshold: float | None = None, pds_threshold: float | None = None
    ) -> "ThresholdPolicy":
        out = self
        if ads_threshold is not None:
            out = replace(out, ads_threshold=ads_threshold)
        if pds_threshold is not None:
            out = replace(out, pds_threshold=pds_threshold)
        return out

    def threshold_for(self, variant: Variant) -> float:
        return self.ads_threshold if variant is Variant.ADS else self.pds_threshold


@dataclass(frozen=True)
class ConfusionCounts:
    """Confusion counts with F as the positive class."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def precision(self) -> float:
        predicted = self.tp + self.fp
        return self.tp / predicted if predicted else 0.0

    @property
    def recall(self) -> float:
        positives = self.tp + self.fn
        return self.tp / positives if positives else 0.0

    @property
    def f1(self) -> float:
        denom = 2 * self.tp + self.fp + self.fn
        return 2 * self.tp / denom if denom else 0.0

    @property
    def degenerate(self) -> bool:
        """No positives and no predicted positives: F1 is 0 by convention."""
        return self.tp + self.fn == 0 and self.fp == 0


@dataclass(frozen=True)
class EvalConfig:
    dataset: str
    llm: str
    variant: Variant
    regime: str


@dataclass(frozen=True)
class EvalSummary:
    config: EvalConfig
    counts: ConfusionCounts
    precision: float
    recall: float
    f1: float
    auc_pr: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "dataset": self.config.dataset,
            "llm": self.config.llm,
            "method": self.config.variant.value,
            "regime": self.config.regime,
            "tp": self.counts.tp,
            "fp": self.counts.fp,
            "fn": self.counts.fn,
            "tn": self.counts.tn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auc_pr": self.auc_pr,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class GateDecision:
    instance_id: str
    score: float
    selected_for_edit: bool


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    precision: float
    recall: float


def classify(score: float, threshold: float) -> Label:
    """Predict F exactly when the score falls strictly below the threshold."""
    return Label.FALSE if score < threshold else Label.TRUE


def confusion(predictions: Sequence[tuple[Label, Label]]) -> ConfusionCounts:
    """Count (gold label, predicted label) pairs; F is the positive class."""
    if not predictions:
        raise ValueError("need at least one prediction")
    tp = fp = fn = tn = 0
    for gold, predicted in predictions:
        if gold is Label.FALSE and predicted is Label.FALSE:
            tp += 1
        elif gold is Label.TRUE and predicted is Label.FALSE:
            fp += 1
        elif gold is Label.FALSE and predicted is Label.TRUE:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def auc_pr(scored: Sequence[tuple[Label, float]]) -> float:
    """Average precision with F as the positive class.

    Positivity is the negated decision score (low scores mean likely wrong),
    swept over unique values descending; tied scores form one group. The area
    is the step integral sum_k (R_k - R_{k-1}) * P_k, not a trapezoidal
    interpolation, which is known to overstate PR area.
    """
    total_pos = sum(1 for label, _ in scored if label is Label.FALSE)
    if total_pos == 0:
        raise ValueError("average precision needs at least one F label")
    by_positivity = sorted(scored, key=lambda pair: pair[1])
    ap = 0.0
    tp = fp = 0
    prev_recall = 0.0
    i = 0
    while i < len(by_positivity):
        j = i
        while j < len(by_positivity) and by_positivity[j][1] == by_positivity[i][1]:
            if by_positivity[j][0] is Label.FALSE:
                tp += 1
            else:
                fp += 1
            j += 1
        precision = tp / (tp + fp)
        recall = tp / total_pos
        ap += (recall - prev_recall) * precision
        prev_recall = recall
        i = j
    return ap


def _score_all(
    instances: Sequence[Instance],
    backend: ScoreBackend,
    variant: Variant,
    *,
    jobs: int = 1,
) -> list[ScoreReport]:
    if jobs <= 1 or len(instances) <= 1:
        return [score_instance(inst, backend, variant) for inst in instances]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda inst: score_instance(inst, backend, variant), instances))


def _policy_for(
    instance: Instance,
    policy: ThresholdPolicy | None,
    ads_threshold: float | None = None,
    pds_threshold: float | None = None,
) -> ThresholdPolicy:
    resolved = policy if policy is not None else ThresholdPolicy.for_format(instance.answer_format)
    return resolved.with_overrides(ads_threshold, pds_threshold)


def _shared_tag(values: Iterable[str]) -> str:
    unique = sorted(set(values))
    if len(unique) == 1:
        return unique[0]
    return "mixed"


def evaluate(
    instances: Sequence[Instance],
    backend: ScoreBackend,
    variant: Variant = Variant.PDS,
    policy: ThresholdPolicy | None = None,
    *,
    ads_threshold: float | None = None,
    pds_threshold: float | None = None,
    jobs: int = 1,
) -> EvalSummary:
    """Score, classify, and aggregate one configuration.

    Without an explicit policy each instance resolves its own regime from its
    answer format; explicit threshold overrides win either way. Metric
    reduction is a deterministic fold in input order.
    """
    if not instances:
        raise ValueError("need at least one instance to evaluate")
    reports = _score_all(instances, backend, variant, jobs=jobs)
    predictions = []
    scored = []
    for inst, report in zip(instances, reports):
        threshold = _policy_for(inst, policy, ads_threshold, pds_threshold).threshold_for(variant)
        predictions.append((inst.label, classify(report.decision_score, threshold)))
        scored.append((inst.label, report.decision_score))
    counts = confusion(predictions)
    any_false = any(label is Label.FALSE for label, _ in scored)
    degenerate = not any_false
    area = auc_pr(scored) if any_false else 0.0
    regime = policy.regime.value if policy is not None else "per-format"
    config = EvalConfig(
        dataset=_shared_tag(i.dataset for i in instances),
        llm=_shared_tag(i.llm for i in instances),
        variant=variant,
        regime=regime,
    )
    return EvalSummary(
        config=config,
        counts=counts,
        precision=counts.precision,
        recall=counts.recall,
        f1=counts.f1,
        auc_pr=area,
        degenerate=degenerate or counts.degenerate,
    )


def gate_for_edit(
    instances: Sequence[Instance],
    backend: ScoreBackend,
    variant: Variant = Variant.PDS,
    policy: ThresholdPolicy | None = None,
    *,
    ads_threshold: float | None = None,
    pds_threshold: float | None = None,
    jobs: int = 1,
) -> list[GateDecision]:
    """Select instances whose decision score falls below the threshold.

    Exactly the instances with score < threshold are selected for re-editing;
    a score equal to the threshold is excluded. Output preserves input order.
    """
    if not instances:
        raise ValueError("need at least one instance to gate")
    reports = _score_all(instances, backend, variant, jobs=jobs)
    decisions = []
    for inst, report in zip(instances, reports):
        threshold = _policy_for(inst, policy, ads_threshold, pds_threshold).threshold_for(variant)
        decisions.append(
            GateDecision(
                instance_id=inst.id,
                score=report.decision_score,
                selected_for_edit=report.decision_score < threshold,
            )
        )
    return decisions


def accuracy_delta(
    original: Sequence[tuple[str, str]],
    edited: Sequence[tuple[str, str]],
    gold: Mapping[str, Collection[str]],
    selected: Collection[str],
) -> tuple[Fraction, Fraction]:
    """Exact accuracy before and after applying edits to selected instances.

    Edits replace answers only for selected ids; an edit missing for a
    selected id is an error. The editor producing the answers is external.
    """
    edited_map = dict(edited)
    selected_set = set(selected)
    missing = [i for i in selected_set if i not in edited_map]
    if missing:
        raise ValueError(f"missing edited answers for selected ids {sorted(missing)}")
    total = len(original)
    if total == 0:
        raise ValueError("need at least one original answer")
    before = after = 0
    for instance_id, answer in original:
        gold_set = gold[instance_id]
        if answers_match(answer, gold_set):
            before += 1
        effective = edited_map[instance_id] if instance_id in selected_set else answer
        if answers_match(effective, gold_set):
            after += 1
    return Fraction(before, total), Fraction(after, total)


def sweep_thresholds(
    instances: Sequence[Instance],
    backend: ScoreBackend,
    variant: Variant,
    grid: Sequence[float],
    *,
    jobs: int = 1,
) -> list[SweepRow]:
    """Precision/recall at each threshold of the grid, scoring once.

    Raising the threshold can only grow the predicted-F set, so recall is
    non-decreasing along the sorted grid; that monotonicity is checked here.
    """
    if not grid:
        raise ValueError("threshold grid must be non-empty")
    if not instances:
        raise ValueError("need at least one instance to sweep")
    if not any(inst.label is Label.FALSE for inst in instances):
        raise ValueError("threshold sweep needs at least one F label")
    reports = _score_all(instances, backend, variant, jobs=jobs)
    labeled_scores = [(inst.label, r.decision_score) for inst, r in zip(instances, reports)]
    rows = []
    for threshold in grid:
        predictions = [(label, classify(score, threshold)) for label, score in labeled_scores]
        counts = confusion(predictions)
        rows.append(SweepRow(threshold=threshold, precision=counts.precision, recall=counts.recall))
    by_threshold = sorted(rows, key=lambda r: r.threshold)
    for prev, cur in zip(by_threshold, by_threshold[1:]):
        if cur.recall < prev.recall:
            raise AssertionError("recall must be non-decreasing in the threshold")
    return rows


def render_summary_table(summaries: Sequence[EvalSummary]) -> str:
    """Fixed-width text table with one row per configuration."""
    header = ("dataset", "llm", "method", "f1", "auc_pr", "precision", "recall")
    rows = [
        (
            s.config.dataset,
            s.config.llm,
            s.config.variant.value,
            f"{s.f1:.4f}",
            f"{s.auc_pr:.4f}",
            f"{s.precision:.4f}",
            f"{s.recall:.4f}",
        )
        for s in summaries
    ]
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i]) for i in range(len(header))]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)


def summaries_to_json(summaries: Sequence[EvalSummary]) -> str:
    return json.dumps([s.to_dict() for s in summaries], ensure_ascii=False, indent=2)


def sweep_rows_to_csv(rows: Sequence[SweepRow]) -> str:
    lines = ["threshold,precision,recall"]
    for row in rows:
        lines.append(f"{row.threshold!r},{row.precision!r},{row.recall!r}")
    return "\n".join(lines) + "\n"
