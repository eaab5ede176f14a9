"""The word store: training, online updates, merging, persistence.

A lexicon maps lowercase tokens to independent WordClassifiers. Looking up
a token that was never taught returns a fresh untrained classifier (response
0.5 everywhere) rather than raising: unknown words are simply uninformative.
"""

import json
import unicodedata
import zlib
from collections import deque

import numpy as np

from .classifier import BUFFER_CAPACITY, WordClassifier
from .errors import InvalidInputError, LexiconParseError, SchemaVersionError
from .features import N_FEATURES

SCHEMA_VERSION = 1

NEGATIVE_RATIO = 3  # sampled negatives per positive, at most


def normalize_token(token):
    tok = unicodedata.normalize("NFC", str(token)).strip().lower()
    if not tok:
        raise InvalidInputError(f"token {token!r} normalizes to the empty string")
    return tok


class Lexicon:
    def __init__(self, rng_seed=0):
        self.words = {}
        self.schema_version = SCHEMA_VERSION
        self.rng_seed = int(rng_seed)

    def get(self, token):
        """Classifier for ``token``; untrained placeholder if absent.

        The placeholder is not inserted: read paths never mutate the store.
        """
        tok = normalize_token(token)
        clf = self.words.get(tok)
        return clf if clf is not None else WordClassifier(tok)

    def _ensure(self, token):
        tok = normalize_token(token)
        if tok not in self.words:
            self.words[tok] = WordClassifier(tok)
        return self.words[tok]

    def response(self, token, x):
        return self.get(token).response(x)

    def tokens(self):
        return sorted(self.words)

    def copy(self):
        dup = Lexicon(self.rng_seed)
        dup.words = {tok: clf.copy() for tok, clf in self.words.items()}
        return dup

    def _sampling_rng(self, token):
        # stable per (lexicon seed, token); crc32 keeps it hash-randomization-free
        entropy = [self.rng_seed & 0xFFFFFFFF, zlib.crc32(token.encode("utf-8"))]
        return np.random.default_rng(np.random.SeedSequence(entropy))


def train_word(lexicon, token, positives, negative_pool):
    """Batch-train ``token`` on positives plus sampled negatives.

    Negatives are drawn from ``negative_pool`` without replacement, seeded
    by the lexicon, up to NEGATIVE_RATIO per positive. The fit starts from
    zero weights, so identical inputs always give bit-identical classifiers.
    """
    if not positives:
        raise InvalidInputError("train_word needs at least one positive example")
    tok = normalize_token(token)
    positives = [np.asarray(x, dtype=float) for x in positives]
    pool = [np.asarray(x, dtype=float) for x in negative_pool]

    n_neg = min(len(pool), NEGATIVE_RATIO * len(positives))
    if n_neg:
        rng = lexicon._sampling_rng(tok)
        idx = rng.choice(len(pool), size=n_neg, replace=False)
        negatives = [pool[i] for i in sorted(idx)]
    else:
        negatives = []

    X = np.array(positives + negatives)
    y = np.array([1.0] * len(positives) + [0.0] * len(negatives))

    clf = lexicon._ensure(tok)
    clf.fit(X, y)
    clf.record_examples([(x, 1) for x in positives] + [(x, 0) for x in negatives])
    return clf


def update_online(lexicon, token, x, label, lr=0.1):
    """One feedback-driven SGD step on (x, label) for ``token``."""
    clf = lexicon._ensure(token)
    clf.partial_fit(x, label, lr=lr)
    clf.record_examples([(np.asarray(x, dtype=float), label)])
    return clf


def consolidate(lexicon, tokens):
    """Refit words from their example buffers; returns the tokens refit.

    Online steps move weights one nudge at a time, but every feedback
    example is still in the buffer. Refitting from the buffer (the reason
    the buffer exists) recovers words whose few positives were drowned out
    by a long run of negatives. A one-sided buffer still helps: the fit
    points the weights away from (or toward) the examples' mean, which is
    what ranking candidates needs.
    """
    refit = []
    for token in tokens:
        clf = lexicon.words.get(normalize_token(token))
        if clf is None or not clf.buffer:
            continue
        X = np.array([x for x, _ in clf.buffer])
        y = np.array([float(label) for _, label in clf.buffer])
        clf.fit(X, y)
        refit.append(clf.token)
    return refit


def merge_lexicons(a, b):
    """Pool two lexicons' accepted usage into one.

    Disjoint words are copied verbatim. Shared words pool both example
    buffers (most recent 500 kept) and are retrained from scratch on the
    pooled labeled pairs.
    """
    if a.schema_version != b.schema_version:
        raise SchemaVersionError(
            f"schema_version mismatch: {a.schema_version} vs {b.schema_version}"
        )
    merged = Lexicon(a.rng_seed)
    for tok in set(a.words) | set(b.words):
        in_a, in_b = tok in a.words, tok in b.words
        if in_a and in_b:
            ca, cb = a.words[tok], b.words[tok]
            clf = WordClassifier(tok)
            pooled = deque(
                [(x.copy(), y) for x, y in ca.buffer] + [(x.copy(), y) for x, y in cb.buffer],
                maxlen=BUFFER_CAPACITY,
            )
            clf.buffer = pooled
            clf.pos_count = ca.pos_count + cb.pos_count
            clf.neg_count = ca.neg_count + cb.neg_count
            if pooled:
                X = np.array([x for x, _ in pooled])
                y = np.array([float(lbl) for _, lbl in pooled])
                clf.fit(X, y)
            merged.words[tok] = clf
        else:
            merged.words[tok] = (a.words[tok] if in_a else b.words[tok]).copy()
    return merged


# -- persistence -------------------------------------------------------------


def lexicon_to_dict(lexicon):
    words = {}
    for tok in sorted(lexicon.words):
        clf = lexicon.words[tok]
        words[tok] = {
            "weights": [float(w) for w in clf.weights],
            "bias": float(clf.bias),
            "pos_count": clf.pos_count,
            "neg_count": clf.neg_count,
            "buffer": [{"x": [float(v) for v in x], "y": int(y)} for x, y in clf.buffer],
        }
    return {
        "schema_version": lexicon.schema_version,
        "rng_seed": lexicon.rng_seed,
        "words": words,
    }


def save_lexicon(lexicon, destination):
    """Write ``lexicon`` as JSON; floats keep full round-trip precision."""
    text = json.dumps(lexicon_to_dict(lexicon), indent=2, sort_keys=True, allow_nan=False)
    with open(destination, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def _reject_constant(name):
    raise LexiconParseError(f"non-finite number {name!r} in lexicon document")


def lexicon_from_dict(doc):
    if not isinstance(doc, dict):
        raise LexiconParseError("lexicon document must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(f"unknown schema_version {version!r}")
    lex = Lexicon(int(doc.get("rng_seed", 0)))
    words = doc.get("words", {})
    if not isinstance(words, dict):
        raise LexiconParseError('"words" must be an object')
    for raw_tok, entry in words.items():
        tok = normalize_token(raw_tok)
        clf = WordClassifier(tok)
        try:
            weights = np.asarray(entry["weights"], dtype=float)
            bias = float(entry["bias"])
            pos_count = int(entry.get("pos_count", 0))
            neg_count = int(entry.get("neg_count", 0))
            buffer = entry.get("buffer", [])
        except (KeyError, TypeError, ValueError) as exc:
            raise LexiconParseError(f"malformed entry for word {tok!r}: {exc}") from None
        if weights.shape != (N_FEATURES,) or not np.all(np.isfinite(weights)):
            raise LexiconParseError(f"word {tok!r} needs {N_FEATURES} finite weights")
        if not np.isfinite(bias):
            raise LexiconParseError(f"word {tok!r} has non-finite bias")
        if pos_count < 0 or neg_count < 0:
            raise LexiconParseError(f"word {tok!r} has negative counts")
        clf.weights = weights
        clf.bias = bias
        clf.pos_count = pos_count
        clf.neg_count = neg_count
        for item in buffer:
            try:
                x = np.asarray(item["x"], dtype=float)
                y = int(item["y"])
            except (KeyError, TypeError, ValueError) as exc:
                raise LexiconParseError(f"malformed buffer item for {tok!r}: {exc}") from None
            if x.shape != (N_FEATURES,) or not np.all(np.isfinite(x)):
                raise LexiconParseError(f"bad buffer vector for {tok!r}")
            if y not in (0, 1):
                raise LexiconParseError(f"buffer label for {tok!r} must be 0 or 1")
            clf.buffer.append((x, y))
        lex.words[tok] = clf
    return lex


def load_lexicon(source):
    with open(source, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise LexiconParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    return lexicon_from_dict(doc)
