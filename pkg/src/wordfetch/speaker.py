"""Synthetic speaker: referring expressions from an attribute grammar.

Stands in for the human player during scripted training and evaluation.
Each attribute lexeme is a decidable threshold predicate on one feature
component; spatial lexemes carry a reference frame (speaker by default,
which is the source of the perspective mismatch the agent must cope with).
"""

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .arena import extract_features
from .errors import (
    ConfigurationError,
    InvalidInputError,
    NoDistinguishingExpressionError,
    UnknownLexemeError,
)
from .features import FEATURE_NAMES
from .resolver import tokenize


@dataclass(frozen=True)
class AttributePredicate:
    lexeme: str
    feature: str
    op: str  # "<=" or ">="
    threshold: float
    frame: str = None  # "speaker"/"agent" for spatial lexemes, None otherwise

    def holds(self, x):
        value = float(x[FEATURE_NAMES.index(self.feature)])
        return value <= self.threshold if self.op == "<=" else value >= self.threshold


class VocabularyGrammar:
    def __init__(self, attributes, articles=("the",), heads=("one", "thing")):
        self.attributes = dict(attributes)  # lexeme -> AttributePredicate
        self.articles = tuple(articles)
        self.heads = tuple(heads)

    @classmethod
    def from_spec(cls, spec):
        attrs = {}
        for lexeme, entry in spec.get("attributes", {}).items():
            feature = entry.get("feature")
            op = entry.get("op")
            if feature not in FEATURE_NAMES or op not in ("<=", ">="):
                raise ConfigurationError(f"bad predicate for lexeme {lexeme!r}: {entry!r}")
            attrs[lexeme] = AttributePredicate(
                lexeme=lexeme,
                feature=feature,
                op=op,
                threshold=float(entry["threshold"]),
                frame=entry.get("frame"),
            )
        if not attrs:
            raise ConfigurationError("grammar defines no attribute lexemes")
        return cls(
            attrs,
            articles=tuple(spec.get("articles", ["the"])),
            heads=tuple(spec.get("heads", ["one", "thing"])),
        )

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            try:
                spec = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigurationError(f"bad grammar file {path}: {exc}") from None
        return cls.from_spec(spec)

    def lexemes(self):
        return sorted(self.attributes)

    def reframed(self, frame):
        """Copy with every spatial lexeme re-grounded in ``frame``."""
        attrs = {
            lex: (
                AttributePredicate(p.lexeme, p.feature, p.op, p.threshold, frame)
                if p.frame is not None
                else p
            )
            for lex, p in self.attributes.items()
        }
        return VocabularyGrammar(attrs, self.articles, self.heads)


@dataclass(frozen=True)
class GeneratedExpression:
    target_id: int
    text: str
    tokens: tuple
    discriminating: bool
    attributes: tuple


def _predicate_features(grammar, arena, obj):
    """Feature vectors per frame an object's predicates might need."""
    speaker_x = extract_features(obj, arena.speaker_pose, arena.view_range, arena.max_area)
    agent_x = extract_features(obj, arena.start_pose, arena.view_range, arena.max_area)
    return {"speaker": speaker_x, "agent": agent_x, None: speaker_x}


def predicate_holds(grammar, arena, lexeme, obj):
    pred = grammar.attributes[lexeme]
    return pred.holds(_predicate_features(grammar, arena, obj)[pred.frame])


def true_attributes(grammar, arena, obj):
    feats = _predicate_features(grammar, arena, obj)
    return [lex for lex, p in sorted(grammar.attributes.items()) if p.holds(feats[p.frame])]


def generate(grammar, arena, target_id, seed, require_discriminating=True):
    """Render a referring expression for the target.

    Discriminating mode picks the smallest attribute set that is true of
    the target and false (on at least one member) of every distractor;
    same-size ties and the head noun are seeded choices.
    """
    target = arena.object_by_id(target_id)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, 0x5BEA]))
    truth = {
        obj.object_id: set(true_attributes(grammar, arena, obj)) for obj in arena.objects
    }
    target_true = sorted(truth[target_id])
    distractors = [obj.object_id for obj in arena.objects if obj.object_id != target_id]

    chosen = None
    discriminating = False
    if require_discriminating:
        for k in range(1, len(target_true) + 1):
            options = [
                combo
                for combo in combinations(target_true, k)
                if all(any(tok not in truth[d] for tok in combo) for d in distractors)
            ]
            if options:
                chosen = options[int(rng.integers(len(options)))]
                discriminating = True
                break
        if chosen is None:
            raise NoDistinguishingExpressionError(
                f"no attribute set separates object {target_id} from {distractors}"
            )
    else:
        if target_true:
            k = int(rng.integers(1, min(2, len(target_true)) + 1))
            idx = rng.choice(len(target_true), size=k, replace=False)
            chosen = tuple(target_true[i] for i in sorted(idx))
        else:
            chosen = ()
        discriminating = bool(chosen) and all(
            any(tok not in truth[d] for tok in chosen) for d in distractors
        )

    # render in the grammar's canonical lexeme order
    order = {lex: i for i, lex in enumerate(grammar.lexemes())}
    attrs = tuple(sorted(chosen, key=order.__getitem__))
    head = grammar.heads[int(rng.integers(len(grammar.heads)))]
    words = [grammar.articles[0], *attrs, head]
    text = " ".join(words)
    return GeneratedExpression(
        target_id=target_id,
        text=text,
        tokens=tuple(tokenize(text).tokens),
        discriminating=discriminating,
        attributes=attrs,
    )


def label_check(grammar, expression, object_features):
    """True iff every attribute token in ``expression`` holds of the features.

    Articles and head nouns are ignored; any other unknown token is an
    error. ``object_features`` must already be in the frame the caller
    cares about.
    """
    tokens = tokenize(expression).tokens if isinstance(expression, str) else tuple(expression)
    if object_features is None:
        raise InvalidInputError("object_features required")
    result = True
    for tok in tokens:
        if tok in grammar.attributes:
            if not grammar.attributes[tok].holds(object_features):
                result = False
        elif tok in grammar.articles or tok in grammar.heads:
            continue
        else:
            raise UnknownLexemeError(tok)
    return result
