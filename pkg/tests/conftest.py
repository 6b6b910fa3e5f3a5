import pytest

from tolerance_lab import corpus
from tolerance_lab.consequence import SearchBounds


@pytest.fixture(scope="session")
def small_corpus():
    return corpus.generate_corpus(80, seed=corpus.DEFAULT_SEED)


@pytest.fixture(scope="session")
def small_nosim_corpus():
    return corpus.generate_corpus(60, seed=corpus.DEFAULT_SEED + 1, allow_sim=False)


@pytest.fixture(scope="session")
def bounds():
    return SearchBounds()
