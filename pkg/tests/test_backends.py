"""Backends: mock determinism, scripted lookup, and the HTTP client over a
local wire server that serves mock scores."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cotverify import (
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

_sentence = st.text(min_size=1, max_size=30).filter(lambda s: s.strip())


class TestMock:
    def test_identical_sentences(self):
        assert mock_score("The cat sat.", "The cat sat.") == EntailmentScores(1.0, 0.0, 0.0)

    def test_inserted_not_contradicts(self):
        got = mock_score("the tower was built in 1889", "the tower was not built in 1889")
        assert got == EntailmentScores(0.0, 0.0, 1.0)

    def test_contraction_negation(self):
        got = mock_score("it is safe", "it isn't safe")
        # "isn't" tokenizes to "is" + "n't", leaving a pure negation diff
        assert got == EntailmentScores(0.0, 0.0, 1.0)

    def test_jaccard_half(self):
        got = mock_score("red cat sat", "red cat ran")
        assert got == EntailmentScores(0.5, 0.5, 0.0)

    def test_disjoint_tokens(self):
        assert mock_score("alpha beta", "gamma delta") == EntailmentScores(0.0, 1.0, 0.0)

    @settings(max_examples=100)
    @given(_sentence)
    def test_self_pair_is_full_entailment(self, s):
        assert mock_score(s, s) == EntailmentScores(1.0, 0.0, 0.0)

    @settings(max_examples=100)
    @given(_sentence, _sentence)
    def test_pure_function_and_simplex(self, a, b):
        first = mock_score(a, b)
        second = mock_score(a, b)
        assert first == second
        first.validate()

    def test_backend_batches(self):
        backend = MockBackend()
        pairs = [SentencePair("a b", "a b"), SentencePair("a", "b")]
        out = backend.score_pairs(pairs)
        assert out == [mock_score("a b", "a b"), mock_score("a", "b")]

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError):
            MockBackend().score_pairs([])

    def test_blank_sentence_rejected(self):
        with pytest.raises(ValueError):
            MockBackend().score_pairs([SentencePair("  ", "x")])


class TestEntailmentScores:
    def test_valid(self):
        EntailmentScores(0.2, 0.5, 0.3).validate()

    def test_sum_violation(self):
        with pytest.raises(ScoreInvariantError):
            EntailmentScores(0.5, 0.5, 0.5).validate()

    def test_range_violation(self):
        with pytest.raises(ScoreInvariantError):
            EntailmentScores(1.2, -0.2, 0.0).validate()

    def test_margin(self):
        assert EntailmentScores(0.7, 0.1, 0.2).margin == pytest.approx(0.5)


class TestScripted:
    def test_lookup_and_self_pair(self, conflict_fixture):
        _, backend = conflict_fixture
        table = {("s", "s"): EntailmentScores(1.0, 0.0, 0.0)}
        scripted = ScriptedBackend(table)
        assert scripted.score_pairs([SentencePair("s", "s")]) == [EntailmentScores(1.0, 0.0, 0.0)]

    def test_conflict_pair_is_contradiction_dominant(self, conflict_fixture):
        instance, backend = conflict_fixture
        wendt = instance.responses[0].rationale[0]
        candy = instance.responses[4].rationale[0]
        [score] = backend.score_pairs([SentencePair(wendt, candy)])
        assert score.contradict > score.entail

    def test_missing_pair_names_it(self):
        scripted = ScriptedBackend({})
        with pytest.raises(PairLookupError) as err:
            scripted.score_pairs([SentencePair("unknown premise", "unknown hypothesis")])
        assert "unknown premise" in str(err.value)
        assert "unknown hypothesis" in str(err.value)

    def test_invalid_table_rejected_on_load(self):
        with pytest.raises(ScoreInvariantError):
            ScriptedBackend({("a", "b"): EntailmentScores(0.9, 0.9, 0.9)})


class _WireHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        behavior = self.server.behavior  # type: ignore[attr-defined]
        length = int(self.headers.get("Content-Length", "0"))
        body = self.rfile.read(length)
        if behavior == "error_status":
            self._respond(503, {"error": "model not loaded"})
            return
        if behavior == "malformed":
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.end_headers()
            self.wfile.write(b"{not json")
            return
        pairs = json.loads(body)["pairs"]
        if behavior == "bad_sum":
            scores = [{"entail": 0.3, "neutral": 0.3, "contradict": 0.2} for _ in pairs]
        else:
            scores = []
            for p in pairs:
                s = mock_score(p["premise"], p["hypothesis"])
                scores.append({"entail": s.entail, "neutral": s.neutral, "contradict": s.contradict})
        self._respond(200, {"scores": scores})

    def _respond(self, status, obj):
        payload = json.dumps(obj).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def wire_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _WireHandler)
    server.behavior = "ok"
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server, f"http://127.0.0.1:{server.server_address[1]}"
    finally:
        server.shutdown()
        server.server_close()


class TestHttpBackend:
    def test_order_preserved(self, wire_server):
        _, url = wire_server
        backend = HttpBackend(url)
        pairs = [SentencePair("a b", "a b"), SentencePair("x", "y"), SentencePair("p q", "p r")]
        got = backend.score_pairs(pairs)
        assert got == [mock_score(p.premise, p.hypothesis) for p in pairs]

    def test_batched_equals_single_batch(self, wire_server):
        _, url = wire_server
        pairs = [SentencePair(f"word{i}共通", f"word{i % 7} other") for i in range(10_000)]
        batched = HttpBackend(url, batch_size=512).score_pairs(pairs)
        reference = MockBackend().score_pairs(pairs)
        assert batched == reference

    def test_concurrent_batches_keep_order(self, wire_server):
        _, url = wire_server
        pairs = [SentencePair(f"tok{i}", f"tok{i+1}") for i in range(300)]
        sequential = HttpBackend(url, batch_size=32).score_pairs(pairs)
        concurrent = HttpBackend(url, batch_size=32, max_in_flight=8).score_pairs(pairs)
        assert concurrent == sequential

    def test_sum_violation_rejected_not_repaired(self, wire_server):
        server, url = wire_server
        server.behavior = "bad_sum"
        with pytest.raises(ScoreInvariantError):
            HttpBackend(url).score_pairs([SentencePair("a", "b")])

    def test_non_success_status(self, wire_server):
        server, url = wire_server
        server.behavior = "error_status"
        with pytest.raises(StatusError) as err:
            HttpBackend(url).score_pairs([SentencePair("a", "b")])
        assert err.value.status == 503

    def test_malformed_body(self, wire_server):
        server, url = wire_server
        server.behavior = "malformed"
        with pytest.raises(ProtocolError):
            HttpBackend(url).score_pairs([SentencePair("a", "b")])

    def test_unreachable_is_transport_error(self):
        backend = HttpBackend("http://127.0.0.1:1", timeout=0.5)
        with pytest.raises(TransportError) as err:
            backend.score_pairs([SentencePair("a", "b")])
        assert err.value.retryable
