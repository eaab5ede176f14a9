"""wordfetch: per-word classifiers learning word meanings in a fetch game."""

from .classifier import WordClassifier
from .lexicon import (
    Lexicon,
    load_lexicon,
    merge_lexicons,
    save_lexicon,
    train_word,
    update_online,
)
from .resolver import (
    CandidateDistribution,
    Resolution,
    Utterance,
    apply_word,
    resolve,
    score_candidates,
    tokenize,
)
from .arena import Arena, ArenaState, Percept, Pose, SimObject, advance, build_arena, extract_features, percept_at
from .speaker import GeneratedExpression, VocabularyGrammar, generate, label_check
from .game import (
    EpisodeLedger,
    EpisodeResult,
    EpisodeRunner,
    replay,
    run_curriculum,
    run_episode,
)

__version__ = "0.1.0"
