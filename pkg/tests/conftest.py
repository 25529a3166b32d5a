import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hairmony.taxonomy import load_canonical_taxonomy, read_annotations

REPO = Path(__file__).resolve().parents[1]
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def tax():
    return load_canonical_taxonomy()


@pytest.fixture(scope="session")
def canonical_library():
    return read_annotations(REPO / "data" / "styles.v1.jsonl")


@pytest.fixture(scope="session")
def golden_dir():
    return GOLDEN


@pytest.fixture(scope="session")
def repo_root():
    return REPO
