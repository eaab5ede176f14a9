"""Composition of per-word responses into a referent distribution.

A referring expression scores a candidate as the product of its words'
responses on the candidate's features (reported as the geometric mean).
Scores are kept as sums of log-responses so long utterances cannot
underflow, and normalization over candidates uses log-sum-exp.
"""

import math
from dataclasses import dataclass, field

from .errors import InvalidInputError, InvalidStateError

PUNCTUATION = ".,!?;:'\""

TAU_COMMIT = 0.7  # minimum normalized probability of the argmax
TAU_RAW = 0.5  # minimum geometric-mean response of the argmax


@dataclass(frozen=True)
class Utterance:
    raw: str
    tokens: tuple

    def __len__(self):
        return len(self.tokens)


def tokenize(text):
    """Lowercase, strip punctuation, split on whitespace."""
    cleaned = str(text).lower().translate(str.maketrans("", "", PUNCTUATION))
    return Utterance(raw=str(text), tokens=tuple(cleaned.split()))


@dataclass
class CandidateDistribution:
    """Scores over a fixed candidate list.

    ``log_scores[i]`` accumulates sum of log responses for candidate i over
    the words applied so far; zero words means a uniform distribution with
    the 0.5 raw-score convention.
    """

    object_ids: tuple
    log_scores: list = field(default_factory=list)
    words_applied: int = 0

    def __post_init__(self):
        if len(set(self.object_ids)) != len(self.object_ids):
            raise InvalidInputError("candidate object_ids must be unique")
        if not self.log_scores:
            self.log_scores = [0.0] * len(self.object_ids)

    def __len__(self):
        return len(self.object_ids)

    def raw_scores(self):
        """Geometric-mean response per candidate (0.5 before any word)."""
        if self.words_applied == 0:
            return [0.5] * len(self.object_ids)
        return [math.exp(s / self.words_applied) for s in self.log_scores]

    def normalized(self):
        """Probabilities proportional to the product scores; sums to 1."""
        if not self.object_ids:
            return []
        if self.words_applied == 0:
            return [1.0 / len(self.object_ids)] * len(self.object_ids)
        m = max(self.log_scores)
        exp = [math.exp(s - m) for s in self.log_scores]
        total = sum(exp)
        return [e / total for e in exp]

    def entries(self):
        return list(zip(self.object_ids, self.raw_scores(), self.normalized()))

    def argmax(self):
        """Index of the highest product score; ties go to the lowest id.

        None on an empty distribution.
        """
        if not self.object_ids:
            return None
        best = 0
        if self.words_applied:
            for i in range(1, len(self.object_ids)):
                if self.log_scores[i] > self.log_scores[best] or (
                    self.log_scores[i] == self.log_scores[best]
                    and self.object_ids[i] < self.object_ids[best]
                ):
                    best = i
        else:
            best = min(range(len(self.object_ids)), key=lambda i: self.object_ids[i])
        return best


def score_candidates(lexicon, utterance, candidates):
    """Distribution over ``candidates`` induced by the whole utterance.

    candidates: list of (object_id, feature_vector).
    """
    dist = CandidateDistribution(object_ids=tuple(oid for oid, _ in candidates))
    feats = [x for _, x in candidates]
    for token in utterance.tokens:
        dist = _apply(dist, lexicon, token, feats)
    return dist


def apply_word(distribution, lexicon, token, candidates):
    """Fold one more word into an existing distribution.

    Must be called with the same candidate list the distribution was built
    over; folding over all tokens from the uniform start equals batch
    scoring exactly.
    """
    ids = tuple(oid for oid, _ in candidates)
    if ids != distribution.object_ids:
        raise InvalidStateError("candidate set does not match the distribution")
    return _apply(distribution, lexicon, token, [x for _, x in candidates])


def _apply(dist, lexicon, token, feats):
    logs = [s + math.log(lexicon.response(token, x)) for s, x in zip(dist.log_scores, feats)]
    return CandidateDistribution(
        object_ids=dist.object_ids,
        log_scores=logs if logs else [],
        words_applied=dist.words_applied + 1,
    )


@dataclass(frozen=True)
class Resolution:
    decision: str  # "commit" | "undecided"
    object_id: object = None
    confidence: float = 0.0
    raw_score: float = 0.0

    @property
    def committed(self):
        return self.decision == "commit"


def resolve(distribution, tau_commit=TAU_COMMIT, tau_raw=TAU_RAW):
    """Commit to the argmax iff it clears both thresholds.

    The normalized threshold asks "clearly best among what we have seen";
    the raw threshold asks "actually a good fit in absolute terms", which
    guards commits made before every candidate has been seen.
    """
    for name, tau in (("tau_commit", tau_commit), ("tau_raw", tau_raw)):
        if not 0.0 < tau < 1.0:
            raise InvalidInputError(f"{name} must lie in (0, 1), got {tau}")
    idx = distribution.argmax()
    if idx is None:
        return Resolution(decision="undecided")
    conf = distribution.normalized()[idx]
    raw = distribution.raw_scores()[idx]
    if conf >= tau_commit and raw >= tau_raw:
        return Resolution(
            decision="commit",
            object_id=distribution.object_ids[idx],
            confidence=conf,
            raw_score=raw,
        )
    return Resolution(decision="undecided", confidence=conf, raw_score=raw)
