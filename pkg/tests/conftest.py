from __future__ import annotations

from pathlib import Path

import pytest

from molly.index import HashEmbedder, build_index
from molly.kb import load_dataset

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "molly" / "data"
PLAYBOOK_DIR = DATA_DIR / "playbooks"


@pytest.fixture(scope="session")
def sample_kb_path() -> Path:
    return DATA_DIR / "sample_kb.jsonl"


@pytest.fixture(scope="session")
def eval_items_path() -> Path:
    return DATA_DIR / "eval_items.jsonl"


@pytest.fixture(scope="session")
def playbook_dir() -> Path:
    return PLAYBOOK_DIR


@pytest.fixture(scope="session")
def sample_kb(sample_kb_path):
    return load_dataset(sample_kb_path)


@pytest.fixture(scope="session")
def sample_embedder():
    return HashEmbedder(128)


@pytest.fixture(scope="session")
def sample_index(sample_kb, sample_embedder):
    return build_index(((e.id, e.question) for e in sample_kb), sample_embedder)


class CounterClock:
    """Deterministic clock: each call advances by a fixed step."""

    def __init__(self, step: float = 1.0):
        self.now = 0.0
        self.step = step

    def __call__(self) -> float:
        self.now += self.step
        return self.now
