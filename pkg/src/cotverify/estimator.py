"""Scikit-learn style estimator over benchmark instances.

Wraps scoring and threshold classification behind the familiar
fit/predict/decision_function surface so the verifier composes with the
wider ecosystem (model selection, metrics, pipelines). X is a sequence of
Instance objects, the way text estimators take raw documents.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .backends import MockBackend, ScoreBackend
from .evaluation import ThresholdPolicy, classify
from .records import Instance
from .scoring import ScoreReport, Variant, score_instance


def check_instances(X) -> list[Instance]:
    """Validate an input collection of instances.

    Accepts any sequence or iterable of Instance objects with at least two
    responses each; anything else raises with a pointed message.
    """
    try:
        items = list(X)
    except TypeError as err:
        raise TypeError(f"X must be an iterable of Instance objects, got {type(X).__name__}") from err
    if not items:
        raise ValueError("X must contain at least one instance")
    for i, item in enumerate(items):
        if not isinstance(item, Instance):
            raise TypeError(f"X[{i}] is {type(item).__name__}, expected Instance")
        if item.n < 2:
            raise ValueError(f"X[{i}] has {item.n} responses; scoring needs at least 2")
    return items


class DiscernibilityClassifier(ClassifierMixin, BaseEstimator):
    """Predicts whether a majority-voted answer is true ("T") or false ("F").

    Stateless in the learning sense: thresholds are fixed policy, not fitted,
    so ``fit`` only validates input and records metadata. The positive class
    for error analysis is "F" (incorrect answers are what the verifier is
    meant to surface).

    Parameters
    ----------
    variant : str, default="pds"
        Decision-score variant; one of the Variant enum values.
    backend : ScoreBackend or None, default=None
        Sentence-pair scorer; defaults to the deterministic mock.
    regime : {"generative", "discriminative", None}, default=None
        Force one threshold regime; None resolves per instance from its
        answer format.
    ads_threshold, pds_threshold : float or None
        Override the policy thresholds.
    """

    def __init__(
        self,
        variant: str = "pds",
        backend: ScoreBackend | None = None,
        regime: str | None = None,
        ads_threshold: float | None = None,
        pds_threshold: float | None = None,
    ):
        self.variant = variant
        self.backend = backend
        self.regime = regime
        self.ads_threshold = ads_threshold
        self.pds_threshold = pds_threshold

    def _resolved_variant(self) -> Variant:
        return Variant(self.variant)

    def _resolved_backend(self) -> ScoreBackend:
        return self.backend if self.backend is not None else MockBackend()

    def _policy_for(self, instance: Instance) -> ThresholdPolicy:
        if self.regime == "generative":
            policy = ThresholdPolicy.generative()
        elif self.regime == "discriminative":
            policy = ThresholdPolicy.discriminative()
        elif self.regime is None:
            policy = ThresholdPolicy.for_format(instance.answer_format)
        else:
            raise ValueError(f"unknown regime {self.regime!r}")
        return policy.with_overrides(self.ads_threshold, self.pds_threshold)

    def fit(self, X, y=None):
        """Validate inputs and mark the estimator fitted; y is ignored."""
        self._resolved_variant()
        check_instances(X)
        self.classes_ = np.array(["F", "T"])
        self.n_features_in_ = 1
        return self

    def score_reports(self, X) -> list[ScoreReport]:
        instances = check_instances(X)
        variant = self._resolved_variant()
        backend = self._resolved_backend()
        return [score_instance(inst, backend, variant) for inst in instances]

    def decision_function(self, X) -> np.ndarray:
        """Raw decision scores; higher means more likely true.

        Ties sit on the "T" side: predict() uses the strict score < threshold
        rule, so it is not simply the sign of (score - threshold) at exact
        threshold hits.
        """
        return np.array([r.decision_score for r in self.score_reports(X)], dtype=float)

    def predict(self, X) -> np.ndarray:
        instances = check_instances(X)
        variant = self._resolved_variant()
        backend = self._resolved_backend()
        out = []
        for inst in instances:
            report = score_instance(inst, backend, variant)
            threshold = self._policy_for(inst).threshold_for(variant)
            out.append(classify(report.decision_score, threshold).value)
        return np.array(out)
