import shutil
from pathlib import Path

import pytest

from app.services.corpus import load_corpus
from app.services.ledger import ledger_service

CORPUS_ROOT = Path(__file__).parent / "corpus"


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(CORPUS_ROOT)


@pytest.fixture(scope="session")
def reports(corpus):
    """Reports keyed by "family/certificate"."""
    return {f"{r.family}/{r.certificate}": r for r in ledger_service.verify_all(corpus)}


@pytest.fixture
def corpus_copy(tmp_path):
    """Writable copy of the shipped corpus, for mutation tests."""
    root = tmp_path / "corpus"
    shutil.copytree(CORPUS_ROOT, root)
    return root
