"""Shared fixtures for the test suite."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import settings

from bioaug.corpus.io import load_dataset, load_notions
from bioaug.corpus.model import Dataset

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"

# Populated by the acceptance gate tests; echoed after the run so the
# one-line-per-criterion verdicts survive output capturing.
ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, status in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{status} {name}")


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture(scope="session")
def demo_re_path() -> Path:
    return DATA_DIR / "demo_re.jsonl"


@pytest.fixture(scope="session")
def demo_re(demo_re_path: Path) -> Dataset:
    return load_dataset(demo_re_path, "canonical-jsonl")


@pytest.fixture(scope="session")
def notions_path() -> Path:
    return DATA_DIR / "notions.json"


@pytest.fixture(scope="session")
def notions(notions_path: Path) -> dict[str, str]:
    return load_notions(notions_path)


@pytest.fixture()
def write_json(tmp_path: Path):
    """Write an object as JSON into the test tmp dir and return the path."""

    def _write(name: str, obj) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(obj), encoding="utf-8")
        return path

    return _write


@pytest.fixture()
def write_jsonl(tmp_path: Path):
    """Write a list of records as JSON lines and return the path."""

    def _write(name: str, records) -> Path:
        path = tmp_path / name
        with path.open("w", encoding="utf-8") as handle:
            for record in records:
                handle.write(json.dumps(record) + "\n")
        return path

    return _write
