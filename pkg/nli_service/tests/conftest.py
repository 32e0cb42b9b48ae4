from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from nli_service import ServiceConfig, create_app


@pytest.fixture
def loaded_client():
    app = create_app(ServiceConfig(model_id="stub", max_batch_size=64))
    with TestClient(app) as client:
        yield client


@pytest.fixture
def unloaded_app():
    return create_app(ServiceConfig(model_id="stub"), load_immediately=False)
