"""The fetch episode loop and its conversational-grounding ledger.

An episode: the speaker utters a referring expression, the agent hops
between inspection stations (seeing at most two objects at a time), scores
everything it has seen so far, and commits as soon as the dual-threshold
rule fires — or falls back to the best raw score after a full sweep. In
learning mode a single +/- feedback signal after the commit drives one
online update per utterance token.

Every event is appended to a ledger. Replaying a ledger's feedback events
against a fresh lexicon reproduces the live run's final lexicon exactly.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .arena import (
    AGENT_FRAME,
    MAX_VISIBLE,
    SPEAKER_FRAME,
    ArenaState,
    advance,
    build_arena,
    percept_at,
)
from .errors import ConfigurationError, CorruptLedgerError, InvalidStateError
from .lexicon import consolidate, train_word, update_online
from .resolver import TAU_COMMIT, TAU_RAW, resolve, score_candidates, tokenize
from .speaker import generate, true_attributes

ONLINE_LR = 0.1
RAW_TIE_EPS = 1e-12


def episode_rng(seed, index):
    """The seeded generator a session uses for its index-th episode.

    Shared by the HTTP service and by library-driven comparisons so both
    produce identical tie-breaks and therefore identical ledgers.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, 0x5E55, index]))


class EpisodeLedger:
    """Append-only event record; indices strictly increasing from 0."""

    def __init__(self):
        self.events = []

    def append(self, event_type, **payload):
        event = {"i": len(self.events), "type": event_type}
        event.update(payload)
        self.events.append(event)
        return event

    def tail(self, n=10):
        return self.events[-n:]

    def to_ndjson(self):
        return "\n".join(json.dumps(e, sort_keys=True) for e in self.events) + (
            "\n" if self.events else ""
        )

    @classmethod
    def from_ndjson(cls, text):
        ledger = cls()
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            try:
                event = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptLedgerError(f"bad ledger line: {exc}") from None
            ledger.events.append(event)
        return ledger


@dataclass
class EpisodeResult:
    target_id: int
    committed_id: int
    correct: bool
    steps: int
    saw_all: bool
    early_commit: bool
    confidence: float
    raw_score: float


class EpisodeRunner:
    """Drives one episode station-by-station.

    The server steps this interactively; run_episode drives it to
    completion. ``rng`` is the episode's seeded generator, used only to
    break exact raw-score ties at the fallback commit (so an ignorant
    agent is correct at chance rate rather than biased to low ids).
    """

    def __init__(
        self,
        lexicon,
        arena,
        text,
        tau_commit=TAU_COMMIT,
        tau_raw=TAU_RAW,
        frame=SPEAKER_FRAME,
        mode="frozen",
        rng=None,
        max_visible=MAX_VISIBLE,
        online_lr=ONLINE_LR,
        ledger=None,
    ):
        self.lexicon = lexicon
        self.arena = arena
        self.utterance = tokenize(text)
        self.tau_commit = tau_commit
        self.tau_raw = tau_raw
        self.frame = frame
        self.mode = mode
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.max_visible = max_visible
        self.online_lr = online_lr
        self.ledger = ledger if ledger is not None else EpisodeLedger()
        self.state = ArenaState(pose=arena.start_pose)
        self.seen = {}  # object_id -> features at first sight
        self.seen_order = []
        self.commit = None
        self.feedback_done = False
        self.ledger.append(
            "utterance", text=self.utterance.raw, tokens=list(self.utterance.tokens)
        )

    @property
    def committed(self):
        return self.commit is not None

    def _candidates(self):
        return [(oid, self.seen[oid]) for oid in self.seen_order]

    def distribution(self):
        return score_candidates(self.lexicon, self.utterance, self._candidates())

    def step(self):
        """Advance one station; returns a dict describing what happened."""
        if self.committed:
            raise InvalidStateError("episode already committed")
        station = advance(self.arena, self.state)
        if station is None:
            return self._fallback_commit()
        percept = percept_at(self.arena, station, frame=self.frame, max_visible=self.max_visible)
        self.ledger.append(
            "percept",
            station=station,
            visible=[{"id": oid, "x": [float(v) for v in x]} for oid, x in percept.visible],
        )
        for oid, x in percept.visible:
            if oid not in self.seen:
                self.seen[oid] = x
                self.seen_order.append(oid)
        dist = self.distribution()
        resolution = resolve(dist, self.tau_commit, self.tau_raw)
        if resolution.committed:
            self._record_commit(
                resolution.object_id, resolution.confidence, resolution.raw_score, early=True
            )
        return {
            "station": station,
            "percept": percept,
            "distribution": dist,
            "resolution": resolution,
            "commit": self.commit,
        }

    def _fallback_commit(self):
        """Full sweep over; commit to the best raw score among seen objects."""
        dist = self.distribution()
        raws = dist.raw_scores()
        best = max(raws)
        tied = [i for i, r in enumerate(raws) if best - r < RAW_TIE_EPS]
        idx = tied[int(self.rng.integers(len(tied)))] if len(tied) > 1 else tied[0]
        self._record_commit(dist.object_ids[idx], dist.normalized()[idx], raws[idx], early=False)
        return {
            "station": None,
            "percept": None,
            "distribution": dist,
            "resolution": None,
            "commit": self.commit,
        }

    def _record_commit(self, object_id, confidence, raw, early):
        self.commit = {
            "object_id": object_id,
            "confidence": confidence,
            "raw": raw,
            "steps": self.state.steps,
            "early": early,
        }
        self.ledger.append(
            "commit",
            object_id=object_id,
            confidence=confidence,
            raw=raw,
            steps=self.state.steps,
            early=early,
        )

    def give_feedback(self, sign):
        """Apply one +/- signal to every utterance token (learning mode)."""
        if not self.committed:
            raise InvalidStateError("feedback before commit")
        if self.feedback_done:
            raise InvalidStateError("feedback already given for this episode")
        if sign not in (1, -1):
            raise InvalidStateError(f"feedback sign must be +1 or -1, got {sign!r}")
        label = 1 if sign > 0 else 0
        x = self.seen[self.commit["object_id"]]
        tokens = list(self.utterance.tokens)
        self.ledger.append(
            "feedback", sign=sign, tokens=tokens, x=[float(v) for v in x], lr=self.online_lr
        )
        deltas = {}
        for tok in tokens:
            before = self.lexicon.response(tok, x)
            update_online(self.lexicon, tok, x, label, lr=self.online_lr)
            deltas[tok] = [before, self.lexicon.response(tok, x)]
        self.ledger.append("lexicon_update", tokens=tokens, deltas=deltas)
        self.feedback_done = True
        return deltas

    def result(self, target_id=None):
        if not self.committed:
            raise InvalidStateError("episode not finished")
        committed_id = self.commit["object_id"]
        return EpisodeResult(
            target_id=target_id,
            committed_id=committed_id,
            correct=(target_id is not None and committed_id == target_id),
            steps=self.state.steps,
            saw_all=len(self.seen) == len(self.arena.objects),
            early_commit=self.commit["early"],
            confidence=self.commit["confidence"],
            raw_score=self.commit["raw"],
        )


def run_episode(
    lexicon,
    arena,
    text,
    target_id=None,
    tau_commit=TAU_COMMIT,
    tau_raw=TAU_RAW,
    frame=SPEAKER_FRAME,
    mode="frozen",
    feedback_source=None,
    rng=None,
    max_visible=MAX_VISIBLE,
    online_lr=ONLINE_LR,
    ledger=None,
):
    """Run one full episode; returns (EpisodeResult, EpisodeLedger).

    In learning mode ``feedback_source(result) -> +1 | -1`` supplies the
    signal; the default is the oracle (+1 iff the commit was correct),
    which needs ``target_id``.
    """
    runner = EpisodeRunner(
        lexicon,
        arena,
        text,
        tau_commit=tau_commit,
        tau_raw=tau_raw,
        frame=frame,
        mode=mode,
        rng=rng,
        max_visible=max_visible,
        online_lr=online_lr,
        ledger=ledger,
    )
    while not runner.committed:
        runner.step()
    result = runner.result(target_id)
    if mode == "learning":
        if feedback_source is None:
            if target_id is None:
                raise InvalidStateError("oracle feedback needs a target_id")
            sign = 1 if result.correct else -1
        else:
            sign = feedback_source(result)
        runner.give_feedback(sign)
    return result, runner.ledger


# -- curriculum ----------------------------------------------------------------


@dataclass
class CurriculumMetrics:
    accuracy: float
    mean_steps: float
    early_commit_rate: float
    learning_curve: list  # [{"start", "end", "accuracy"}] over fixed windows
    word_counts: dict  # token -> {"pos", "neg"}
    episodes: int
    seed: int
    mode: str
    frame: str
    config: dict
    results: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "accuracy": self.accuracy,
            "mean_steps": self.mean_steps,
            "early_commit_rate": self.early_commit_rate,
            "learning_curve": self.learning_curve,
            "word_counts": self.word_counts,
            "episodes": self.episodes,
            "seed": self.seed,
            "mode": self.mode,
            "frame": self.frame,
            "config": self.config,
        }


def _episode_seed(seed, index, attempt=0):
    # stable scalar per (run seed, episode, resample attempt)
    seq = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, index, attempt])
    return int(seq.generate_state(1)[0])


def make_episode(grammar, arena_config, seed, index, rng, focus_lexeme=None, max_attempts=200):
    """Seeded (arena, target, expression) triple for one curriculum episode.

    With a focus lexeme the arena is resampled until the lexeme uniquely
    picks out some object, which becomes the target of "the <lexeme>
    <head>". Otherwise the target is a seeded choice and the speaker must
    find a discriminating expression, resampling the arena when none exists.
    """
    from .errors import NoDistinguishingExpressionError

    for attempt in range(max_attempts):
        arena = build_arena(arena_config, _episode_seed(seed, index, attempt))
        ids = [obj.object_id for obj in arena.objects]
        if focus_lexeme is not None:
            truth = {
                obj.object_id: focus_lexeme in true_attributes(grammar, arena, obj)
                for obj in arena.objects
            }
            eligible = [oid for oid in ids if truth[oid] and all(
                not truth[other] for other in ids if other != oid
            )]
            if not eligible:
                continue
            target = eligible[int(rng.integers(len(eligible)))]
            # bare-lexeme teaching keeps articles and heads neutral (0.5)
            text = focus_lexeme
            return arena, target, text, (focus_lexeme,)
        target = ids[int(rng.integers(len(ids)))]
        try:
            expr = generate(
                grammar, arena, target, _episode_seed(seed, index, attempt) ^ 0xA5A5,
                require_discriminating=True,
            )
        except NoDistinguishingExpressionError:
            continue
        return arena, target, expr.text, expr.attributes
    raise ConfigurationError(
        f"could not build a usable episode for index {index}"
        + (f" (focus {focus_lexeme!r})" if focus_lexeme else "")
    )


def _target_features(runner, arena, target, frame):
    """Features of the target as the agent saw (or would see) it."""
    if target in runner.seen:
        return runner.seen[target]
    for station_index in range(len(arena.stations)):
        percept = percept_at(arena, station_index, frame=frame, max_visible=runner.max_visible)
        for oid, x in percept.visible:
            if oid == target:
                return x
    return None


def run_curriculum(
    lexicon,
    grammar,
    arena_config,
    episodes,
    seed,
    mode="learning",
    tau_commit=TAU_COMMIT,
    tau_raw=TAU_RAW,
    frame=SPEAKER_FRAME,
    focus_rotation=False,
    max_visible=MAX_VISIBLE,
    online_lr=ONLINE_LR,
    window=50,
    ledger=None,
):
    """Run N seeded speaker-generated episodes; returns (metrics, ledger).

    Feedback in learning mode is oracle-correct: +1 iff the commit hit the
    speaker's target.
    """
    if episodes < 1:
        raise ConfigurationError("episodes must be >= 1")
    lexemes = grammar.lexemes()
    run_ledger = ledger if ledger is not None else EpisodeLedger()
    records = []
    for i in range(episodes):
        ep_rng = np.random.default_rng(
            np.random.SeedSequence([int(seed) & 0xFFFFFFFF, 0xEA15, i])
        )
        focus = lexemes[i % len(lexemes)] if focus_rotation else None
        arena, target, text, attrs = make_episode(
            grammar, arena_config, seed, i, ep_rng, focus_lexeme=focus
        )
        runner = EpisodeRunner(
            lexicon,
            arena,
            text,
            tau_commit=tau_commit,
            tau_raw=tau_raw,
            frame=frame,
            mode=mode,
            rng=ep_rng,
            max_visible=max_visible,
            online_lr=online_lr,
            ledger=run_ledger,
        )
        while not runner.committed:
            runner.step()
        result = runner.result(target)
        if mode == "learning":
            sign = 1 if result.correct else -1
            runner.give_feedback(sign)
            if focus is not None:
                # the focus word is true of exactly one object: a correct
                # commit marks every other seen object as a non-referent,
                # and after a miss the teacher points the referent out
                x = _target_features(runner, arena, target, frame)
                pool = [runner.seen[oid] for oid in runner.seen_order if oid != target]
                if x is not None:
                    train_word(lexicon, focus, [x], pool)
                    run_ledger.append(
                        "train",
                        token=focus,
                        positives=[[float(v) for v in x]],
                        pool=[[float(v) for v in p] for p in pool],
                    )
            # one online nudge per episode is slow to undo a bad start, so
            # refit the episode's attribute words from their buffers
            refit = consolidate(lexicon, attrs)
            if refit:
                run_ledger.append("consolidate", tokens=refit)
        records.append(
            {
                "index": i,
                "target": target,
                "committed": result.committed_id,
                "correct": result.correct,
                "steps": result.steps,
                "early": result.early_commit,
                "saw_all": result.saw_all,
                "text": text,
                "attributes": list(attrs),
            }
        )

    n = len(records)
    curve = []
    for start in range(0, n, window):
        chunk = records[start : start + window]
        curve.append(
            {
                "start": start + 1,
                "end": start + len(chunk),
                "accuracy": sum(r["correct"] for r in chunk) / len(chunk),
            }
        )
    metrics = CurriculumMetrics(
        accuracy=sum(r["correct"] for r in records) / n,
        mean_steps=sum(r["steps"] for r in records) / n,
        early_commit_rate=sum(r["early"] for r in records) / n,
        learning_curve=curve,
        word_counts={
            tok: {"pos": clf.pos_count, "neg": clf.neg_count}
            for tok, clf in sorted(lexicon.words.items())
        },
        episodes=n,
        seed=int(seed),
        mode=mode,
        frame=frame,
        config=arena_config,
        results=records,
    )
    return metrics, run_ledger


# -- replay --------------------------------------------------------------------


def replay(ledger, fresh_lexicon):
    """Re-apply a ledger's feedback updates to a fresh lexicon.

    Validates the ordering invariants (strictly increasing indices; commit
    only after an utterance; feedback only after a commit; one commit per
    utterance) and returns the updated lexicon.
    """
    lexicon = fresh_lexicon
    last_index = -1
    utterance_open = False  # an utterance awaiting its commit
    commit_open = False  # a commit awaiting (optional) feedback
    for event in ledger.events:
        index = event.get("i")
        if not isinstance(index, int) or index <= last_index:
            raise CorruptLedgerError(f"event indices must strictly increase, got {index!r}")
        last_index = index
        etype = event.get("type")
        if etype == "utterance":
            utterance_open = True
            commit_open = False
        elif etype == "percept":
            if not utterance_open:
                raise CorruptLedgerError("percept before any utterance")
        elif etype == "commit":
            if not utterance_open:
                raise CorruptLedgerError("commit before utterance")
            utterance_open = False
            commit_open = True
        elif etype == "feedback":
            if not commit_open:
                raise CorruptLedgerError("feedback before commit")
            label = 1 if event["sign"] > 0 else 0
            x = np.asarray(event["x"], dtype=float)
            lr = float(event.get("lr", ONLINE_LR))
            for tok in event["tokens"]:
                update_online(lexicon, tok, x, label, lr=lr)
        elif etype == "lexicon_update":
            if not commit_open:
                raise CorruptLedgerError("lexicon_update before commit")
        elif etype == "train":
            train_word(lexicon, event["token"], event["positives"], event["pool"])
        elif etype == "consolidate":
            consolidate(lexicon, event["tokens"])
        else:
            raise CorruptLedgerError(f"unknown event type {etype!r}")
    return lexicon
