"""Verification toolkit for majority-voted chain-of-thought answers.

Scores answer agreement across sampled responses and entailment consistency
across their reasoning chains, classifies each instance as true or false
against fixed thresholds, and evaluates predictions with FALSE as the
positive class.
"""

from .backends import (
    BackendError,
    EntailmentScores,
    HttpBackend,
    MockBackend,
    PairLookupError,
    ProtocolError,
    ScoreInvariantError,
    ScriptedBackend,
    SentencePair,
    StatusError,
    TransportError,
    mock_score,
)
from .estimator import DiscernibilityClassifier, check_instances
from .evaluation import (
    ConfusionCounts,
    EvalSummary,
    GateDecision,
    Regime,
    SweepRow,
    ThresholdPolicy,
    accuracy_delta,
    auc_pr,
    classify,
    confusion,
    evaluate,
    gate_for_edit,
    sweep_thresholds,
)
from .extraction import (
    ExtractionMethod,
    ExtractionOutcome,
    TriggerTable,
    answers_match,
    extract_last_number,
    extract_response,
    filter_unparseable,
    load_default_triggers,
    normalize_answer,
    normalize_binary,
    normalize_choice,
    split_by_trigger,
    split_sentences,
)
from .pipeline import build_instance, build_response
from .records import (
    AnswerFormat,
    Instance,
    Label,
    ParseError,
    Response,
    ValidationError,
    dump_records,
    load_records,
    parse_record,
    read_records,
    write_record,
)
from .scoring import (
    ALL_VARIANTS,
    DegenerateInputError,
    ScoreReport,
    Variant,
    pds,
    ppss,
    pss,
    score_instance,
)
from .voting import VoteTally, majority_vote, normalized_ads

__version__ = "0.1.0"
