"""The verifier's HTTP client against a live service instance.

Runs the same range/order/batching property checks the client passes against
its deterministic mock, now over a real socket.
"""

from __future__ import annotations

import threading
import time

import pytest
import uvicorn

from cotverify import HttpBackend, ScoreInvariantError, SentencePair, StatusError
from nli_service import ServiceConfig, create_app


@pytest.fixture(scope="module")
def live_service():
    app = create_app(ServiceConfig(model_id="stub", max_batch_size=64))
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("service did not start")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def _pairs(count):
    return [SentencePair(f"premise {i} spoken", f"hypothesis {i % 11} heard") for i in range(count)]


def test_triples_valid_and_ordered(live_service):
    backend = HttpBackend(live_service, batch_size=64)
    pairs = _pairs(64)
    scores = backend.score_pairs(pairs)
    assert len(scores) == len(pairs)
    for triple in scores:
        triple.validate()
    # same pairs again: identical values (stateless service, pure client)
    assert backend.score_pairs(pairs) == scores


def test_batched_equals_single_batch(live_service):
    pairs = _pairs(200)
    small = HttpBackend(live_service, batch_size=7).score_pairs(pairs)
    large = HttpBackend(live_service, batch_size=64).score_pairs(pairs)
    # 200 pairs in one request would exceed the service cap; 64 is the
    # service's own maximum and the reference layout
    assert small == large


def test_concurrent_batches_keep_order(live_service):
    pairs = _pairs(150)
    sequential = HttpBackend(live_service, batch_size=16).score_pairs(pairs)
    concurrent = HttpBackend(live_service, batch_size=16, max_in_flight=6).score_pairs(pairs)
    assert concurrent == sequential


def test_oversized_client_batch_is_status_error(live_service):
    backend = HttpBackend(live_service, batch_size=100)  # above the service cap
    with pytest.raises(StatusError) as err:
        backend.score_pairs(_pairs(100))
    assert err.value.status == 413


def test_scoring_pipeline_end_to_end(live_service):
    # full instance scoring through the live service: range invariants hold
    from conftest_pipeline import build_demo_instance  # local helper below

    instance = build_demo_instance()
    from cotverify import Variant, score_instance

    backend = HttpBackend(live_service, batch_size=16)
    report = score_instance(instance, backend, Variant.PDS)
    assert -1.0 <= report.pss <= 1.0
    assert -1.0 <= report.pds <= 1.0
