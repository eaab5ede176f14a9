import numpy as np
import pytest

from wordfetch import Lexicon
from wordfetch.defaults import DEFAULT_ARENA_CONFIG, DEFAULT_GRAMMAR_SPEC
from wordfetch.game import run_curriculum
from wordfetch.speaker import VocabularyGrammar


@pytest.fixture(scope="session")
def grammar():
    return VocabularyGrammar.from_spec(DEFAULT_GRAMMAR_SPEC)


@pytest.fixture(scope="session")
def arena_config():
    return DEFAULT_ARENA_CONFIG


@pytest.fixture(scope="session")
def taught_lexicon(grammar, arena_config):
    """Lexicon after a full 600-episode focused teaching run (seed 0).

    Session-scoped because several tests evaluate the same trained state;
    everything downstream treats it as read-only and copies before mutating.
    """
    lexicon = Lexicon(rng_seed=0)
    metrics, ledger = run_curriculum(
        lexicon,
        grammar,
        arena_config,
        episodes=600,
        seed=0,
        mode="learning",
        focus_rotation=True,
        window=100,
    )
    return lexicon, metrics, ledger


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
