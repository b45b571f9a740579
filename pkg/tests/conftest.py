from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from revisecoach.embeddings import load_embeddings
from revisecoach.feedback import Thresholds
from revisecoach.lexicon import load_article_config
from revisecoach.scoring import ArticleMatcher

DATA = Path(__file__).parent.parent / "src" / "revisecoach" / "data"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def mvp_config():
    return load_article_config(DATA / "lexicons" / "mvp.json")


@pytest.fixture(scope="session")
def space_config():
    return load_article_config(DATA / "lexicons" / "space.json")


@pytest.fixture(scope="session")
def sample_table():
    return load_embeddings(DATA / "embeddings" / "sample-50d.txt")


@pytest.fixture(scope="session")
def mvp_matcher(mvp_config, sample_table):
    return ArticleMatcher(mvp_config, sample_table)


@pytest.fixture(scope="session")
def mvp_thresholds(mvp_config):
    return Thresholds(mvp_config.alpha, mvp_config.beta, mvp_config.gamma)


@pytest.fixture(scope="session")
def demo_texts():
    out = {}
    for student in ("alice", "bob"):
        for draft in (1, 2, 3):
            path = DATA / "demo" / f"{student}_draft{draft}.txt"
            out[(student, draft)] = path.read_text(encoding="utf-8")
    return out


@pytest.fixture()
def demo_dir():
    return DATA / "demo"
