"""Sentence-pair entailment scoring backends.

Every backend maps ordered (premise, hypothesis) pairs to probability triples
(entail, neutral, contradict). Scoring is directional by design; nothing here
symmetrizes. Three implementations: a deterministic mock for tests, a
scripted fixture table, and an HTTP client speaking the /v1/score protocol.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

import requests

SIMPLEX_TOLERANCE = 1e-6

_NEGATION_TOKENS = frozenset({"not", "no", "never", "n't"})
_TOKEN_RE = re.compile(r"n't|[a-z0-9]+")


class BackendError(Exception):
    """Base class for scoring-backend failures."""


class TransportError(BackendError):
    """Network-level failure (timeout, connection refused); retryable."""

    retryable = True


class StatusError(BackendError):
    """The service answered with a non-success HTTP status."""

    def __init__(self, status: int, message: str = ""):
        self.status = status
        super().__init__(f"backend returned HTTP {status}{': ' + message if message else ''}")


class ProtocolError(BackendError):
    """The service answered with a malformed or mismatched body."""


class ScoreInvariantError(BackendError):
    """A returned triple violates the probability-simplex invariant."""


class PairLookupError(BackendError, KeyError):
    """A scripted table has no entry for the requested pair."""

    def __init__(self, pair: "SentencePair"):
        self.pair = pair
        BackendError.__init__(
            self, f"no scripted score for pair (premise={pair.premise!r}, hypothesis={pair.hypothesis!r})"
        )


@dataclass(frozen=True)
class EntailmentScores:
    """Probability triple for one ordered sentence pair."""

    entail: float
    neutral: float
    contradict: float

    def validate(self) -> "EntailmentScores":
        for name, p in (
            ("entail", self.entail),
            ("neutral", self.neutral),
            ("contradict", self.contradict),
        ):
            if not 0.0 <= p <= 1.0:
                raise ScoreInvariantError(f"{name} probability {p} outside [0, 1]")
        total = self.entail + self.neutral + self.contradict
        if abs(total - 1.0) > SIMPLEX_TOLERANCE:
            raise ScoreInvariantError(f"probabilities sum to {total}, expected 1 within {SIMPLEX_TOLERANCE}")
        return self

    @property
    def margin(self) -> float:
        """entail minus contradict, the per-pair consistency signal."""
        return self.entail - self.contradict


@dataclass(frozen=True)
class SentencePair:
    """Ordered premise/hypothesis pair; scoring is directional."""

    premise: str
    hypothesis: str

    def validate(self) -> "SentencePair":
        if not self.premise.strip() or not self.hypothesis.strip():
            raise ValueError("premise and hypothesis must be non-empty")
        return self


class ScoreBackend(Protocol):
    def score_pairs(self, pairs: Sequence[SentencePair]) -> list[EntailmentScores]:
        """Score pairs in order; output has the same length and order."""
        ...


def _tokens(text: str) -> list[str]:
    # Penn-style contraction split keeps "n't" as its own token so the
    # negation rule can see it; all other punctuation is dropped.
    return _TOKEN_RE.findall(text.lower().replace("n't", " n't"))


def mock_score(premise: str, hypothesis: str) -> EntailmentScores:
    """Deterministic lexical scorer used as a test oracle.

    Rules, in order: equal token multisets score (1, 0, 0); multisets that
    become equal once negation tokens (not/no/never/n't) are removed score
    (0, 0, 1); otherwise the Jaccard overlap j of the token sets scores
    (j, 1-j, 0). Crude on purpose: the job is bit-for-bit determinism, not
    linguistic accuracy.
    """
    a = Counter(_tokens(premise))
    b = Counter(_tokens(hypothesis))
    if a == b:
        return EntailmentScores(1.0, 0.0, 0.0)

    def drop_negations(counter: Counter) -> Counter:
        return Counter({t: c for t, c in counter.items() if t not in _NEGATION_TOKENS})

    if drop_negations(a) == drop_negations(b):
        return EntailmentScores(0.0, 0.0, 1.0)
    set_a, set_b = set(a), set(b)
    union = set_a | set_b
    jaccard = len(set_a & set_b) / len(union) if union else 0.0
    return EntailmentScores(jaccard, 1.0 - jaccard, 0.0)


class MockBackend:
    """Pure, lock-free backend applying mock_score pairwise."""

    def score_pairs(self, pairs: Sequence[SentencePair]) -> list[EntailmentScores]:
        if not pairs:
            raise ValueError("pairs must be non-empty")
        return [mock_score(p.validate().premise, p.hypothesis) for p in pairs]


class ScriptedBackend:
    """Backend replaying exact triples from a fixture table."""

    def __init__(self, table: Mapping[tuple[str, str], EntailmentScores]):
        self._table = {k: v.validate() for k, v in table.items()}

    @classmethod
    def from_json_file(cls, path) -> "ScriptedBackend":
        """Load a table from JSON: a list of entries with premise,
        hypothesis, entail, neutral, contradict."""
        with open(path, encoding="utf-8") as fh:
            entries = json.load(fh)
        table = {}
        for e in entries:
            table[(e["premise"], e["hypothesis"])] = EntailmentScores(
                entail=float(e["entail"]), neutral=float(e["neutral"]), contradict=float(e["contradict"])
            )
        return cls(table)

    def score_pairs(self, pairs: Sequence[SentencePair]) -> list[EntailmentScores]:
        if not pairs:
            raise ValueError("pairs must be non-empty")
        out = []
        for pair in pairs:
            pair.validate()
            key = (pair.premise, pair.hypothesis)
            if key not in self._table:
                raise PairLookupError(pair)
            out.append(self._table[key])
        return out


class HttpBackend:
    """Client for the POST /v1/score wire protocol.

    Requests are split into batches of at most batch_size pairs and results
    re-concatenated in order. Triples are validated on receipt, never
    repaired: silently renormalizing would mask service bugs. max_in_flight
    batches may be scored concurrently; reassembly order is fixed either way.
    """

    def __init__(
        self,
        endpoint: str,
        *,
        batch_size: int = 64,
        timeout: float = 30.0,
        max_in_flight: int = 1,
        session: requests.Session | None = None,
    ):
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        self.endpoint = endpoint.rstrip("/")
        self.batch_size = batch_size
        self.timeout = timeout
        self.max_in_flight = max_in_flight
        self._session = session or requests.Session()

    def _score_batch(self, batch: Sequence[SentencePair]) -> list[EntailmentScores]:
        body = {"pairs": [{"premise": p.premise, "hypothesis": p.hypothesis} for p in batch]}
        try:
            response = self._session.post(f"{self.endpoint}/v1/score", json=body, timeout=self.timeout)
        except (requests.Timeout, requests.ConnectionError) as err:
            raise TransportError(f"score request failed: {err}") from err
        if response.status_code != 200:
            detail = ""
            try:
                detail = response.json().get("error", "")
            except Exception:
                pass
            raise StatusError(response.status_code, detail)
        try:
            payload = response.json()
            scores = payload["scores"]
            triples = [
                EntailmentScores(
                    entail=float(s["entail"]), neutral=float(s["neutral"]), contradict=float(s["contradict"])
                )
                for s in scores
            ]
        except (ValueError, KeyError, TypeError) as err:
            raise ProtocolError(f"malformed score response: {err}") from err
        if len(triples) != len(batch):
            raise ProtocolError(f"got {len(triples)} scores for {len(batch)} pairs")
        for triple in triples:
            triple.validate()
        return triples

    def score_pairs(self, pairs: Sequence[SentencePair]) -> list[EntailmentScores]:
        if not pairs:
            raise ValueError("pairs must be non-empty")
        for pair in pairs:
            pair.validate()
        batches = [pairs[i : i + self.batch_size] for i in range(0, len(pairs), self.batch_size)]
        if self.max_in_flight == 1 or len(batches) == 1:
            results = [self._score_batch(b) for b in batches]
        else:
            with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
                results = list(pool.map(self._score_batch, batches))
        return [triple for batch in results for triple in batch]
