from __future__ import annotations

import os
from pathlib import Path

import pytest

from pipeline_threats.dsl import parse_file
from pipeline_threats.kb import KnowledgeBase, load_knowledge_base
from pipeline_threats.model import DfdModel
from pipeline_threats.report import Deviation, load_deviations
from pipeline_threats.run import TEMPLATES

GOLDEN_DIR = Path(__file__).resolve().parent / "golden"
UPDATE_GOLDEN = os.environ.get("UPDATE_GOLDEN") == "1"


def load_bundled(name: str) -> DfdModel:
    result = parse_file(TEMPLATES[name])
    assert result.model is not None, [d.format() for d in result.diagnostics]
    return result.model


def assert_golden(name: str, actual: str) -> None:
    """Compare against tests/golden/<name>; UPDATE_GOLDEN=1 rewrites the file."""
    path = GOLDEN_DIR / name
    if UPDATE_GOLDEN:
        path.write_text(actual, encoding="utf-8", newline="")
    expected = path.read_text(encoding="utf-8")
    assert actual == expected


@pytest.fixture(autouse=True)
def _isolated_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("PIPELINE_THREATS_DATA_DIR", raising=False)
    monkeypatch.delenv("NO_COLOR", raising=False)


@pytest.fixture(scope="session")
def reference_model() -> DfdModel:
    return load_bundled("reference")


@pytest.fixture(scope="session")
def deployment_model() -> DfdModel:
    return load_bundled("deployment")


@pytest.fixture(scope="session")
def knowledge() -> KnowledgeBase:
    return load_knowledge_base()


@pytest.fixture(scope="session")
def deviations() -> tuple[Deviation, ...]:
    return load_deviations()
