from __future__ import annotations

import pytest

from aku.fixtures import build_store, default_registry
from aku.orchestration import Orchestrator


@pytest.fixture
def store():
    return build_store()


@pytest.fixture
def orch(store):
    return Orchestrator(store, default_registry())


@pytest.fixture
def bundle_path(tmp_path):
    path = tmp_path / "bundle.json"
    build_store().save_bundle(path)
    return path
