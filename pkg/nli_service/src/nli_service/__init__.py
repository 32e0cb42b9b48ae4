"""Stateless HTTP microservice scoring sentence pairs with a 3-way NLI model."""

from .app import ModelHolder, create_app
from .config import DEFAULT_MODEL, REFERENCE_CHECKPOINTS, ServiceConfig
from .model import (
    LabelRoles,
    StubScorer,
    load_scorer,
    resolve_label_roles,
    softmax_triple,
)

__version__ = "0.1.0"
