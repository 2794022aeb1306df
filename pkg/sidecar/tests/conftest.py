"""Fixtures for the service tests; all model resolution stays offline."""

from __future__ import annotations

import os

# Checkpoint-gated adapters must fail fast instead of reaching a hub.
os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

import pytest
from fastapi.testclient import TestClient

from bioaug_sidecar import SidecarConfig, create_app


@pytest.fixture()
def app():
    return create_app(SidecarConfig())


@pytest.fixture()
def client(app):
    return TestClient(app)
