"""HTTP session service driving live interactive teaching sessions.

Sessions are client-pulled: one station advance per step request. Each
session serializes its own requests (a concurrent request gets a 409), and
all lexicon mutations from feedback go through a single writer lock so
multi-session learning stays reproducible in feedback-arrival order.
"""

import os
import threading
import uuid

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse

from . import defaults
from .arena import arena_to_dict, build_arena, validate_arena_config
from .errors import InvalidStateError, WordfetchError
from .features import FEATURE_NAMES
from .game import EpisodeLedger, EpisodeRunner, episode_rng
from .lexicon import Lexicon, load_lexicon, save_lexicon

PHASE_AWAITING_UTTERANCE = "awaiting_utterance"
PHASE_SEARCHING = "searching"
PHASE_AWAITING_FEEDBACK = "awaiting_feedback"
PHASE_DONE = "done"


class ApiError(Exception):
    def __init__(self, status, code, message, phase=None):
        self.status = status
        self.code = code
        self.message = message
        self.phase = phase
        super().__init__(message)

    def response(self):
        body = {"code": self.code, "message": self.message}
        if self.phase is not None:
            body["phase"] = self.phase
        return JSONResponse(body, status_code=self.status)


class Session:
    def __init__(self, session_id, arena, frame, seed):
        self.session_id = session_id
        self.arena = arena
        self.frame = frame
        self.seed = seed
        self.phase = PHASE_AWAITING_UTTERANCE
        self.ledger = EpisodeLedger()
        self.runner = None
        self.episode_count = 0
        self.lock = threading.Lock()

    def require_phase(self, *phases):
        if self.phase not in phases:
            raise ApiError(
                409,
                "phase_violation",
                f"operation requires phase {' or '.join(phases)}, session is {self.phase}",
                phase=self.phase,
            )


def _distribution_view(runner):
    if runner is None:
        return []
    dist = runner.distribution()
    return [
        {"object_id": oid, "raw": raw, "normalized": norm}
        for oid, raw, norm in dist.entries()
    ]


def _session_view(session):
    runner = session.runner
    return {
        "session_id": session.session_id,
        "phase": session.phase,
        "frame": session.frame,
        "seed": session.seed,
        "episode_count": session.episode_count,
        "arena": arena_to_dict(session.arena),
        "agent": None
        if runner is None
        else {
            "pose": {
                "x": runner.state.pose.x,
                "y": runner.state.pose.y,
                "heading": runner.state.pose.heading,
            },
            "visited": sorted(runner.state.visited),
            "steps": runner.state.steps,
            "station_index": runner.state.station_index,
        },
        "utterance": None
        if runner is None
        else {"text": runner.utterance.raw, "tokens": list(runner.utterance.tokens)},
        "seen": []
        if runner is None
        else [
            {"object_id": oid, "x": [float(v) for v in runner.seen[oid]]}
            for oid in runner.seen_order
        ],
        "distribution": _distribution_view(runner),
        "commit": None if runner is None else runner.commit,
        "ledger_tail": session.ledger.tail(12),
    }


def create_app(lexicon=None, lexicon_path=None, default_config=None):
    app = FastAPI(title="wordfetch session service")
    if lexicon is None:
        if lexicon_path and os.path.exists(lexicon_path):
            lexicon = load_lexicon(lexicon_path)
        else:
            lexicon = Lexicon()
    app.state.lexicon = lexicon
    app.state.lexicon_path = lexicon_path
    app.state.lexicon_lock = threading.Lock()
    app.state.sessions = {}
    app.state.default_config = default_config or dict(defaults.DEFAULT_ARENA_CONFIG)

    @app.exception_handler(ApiError)
    async def _api_error(_request, exc):
        return exc.response()

    @app.exception_handler(WordfetchError)
    async def _domain_error(_request, exc):
        return JSONResponse({"code": "invalid_input", "message": str(exc)}, status_code=400)

    def get_session(session_id):
        session = app.state.sessions.get(session_id)
        if session is None:
            raise ApiError(404, "unknown_session", f"no session {session_id}")
        return session

    class _SessionGuard:
        """Non-blocking per-session lock: concurrent requests get a 409."""

        def __init__(self, session):
            self.session = session

        def __enter__(self):
            if not self.session.lock.acquire(blocking=False):
                raise ApiError(409, "busy", "another request is in flight for this session",
                               phase=self.session.phase)
            return self.session

        def __exit__(self, *exc):
            self.session.lock.release()

    async def _body(request):
        try:
            raw = await request.body()
            if not raw:
                return {}
            import json

            parsed = json.loads(raw)
            if not isinstance(parsed, dict):
                raise ValueError("body must be a JSON object")
            return parsed
        except ValueError as exc:
            raise ApiError(400, "bad_request", f"malformed request body: {exc}")

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await _body(request)
        seed = body.get("seed", 0)
        if not isinstance(seed, int):
            raise ApiError(400, "bad_request", "seed must be an integer")
        frame = body.get("frame", "speaker")
        if frame not in ("speaker", "agent"):
            raise ApiError(400, "bad_request", f"unknown frame {frame!r}")
        config = body.get("arena_config") or app.state.default_config
        try:
            validate_arena_config(config)
            arena = build_arena(config, seed)
        except WordfetchError as exc:
            raise ApiError(400, "bad_config", str(exc))
        session = Session(uuid.uuid4().hex, arena, frame, seed)
        app.state.sessions[session.session_id] = session
        return {"session_id": session.session_id, "arena_snapshot": arena_to_dict(arena)}

    @app.get("/sessions/{session_id}/state")
    async def session_state(session_id: str):
        return _session_view(get_session(session_id))

    @app.post("/sessions/{session_id}/utterance")
    async def submit_utterance(session_id: str, request: Request):
        session = get_session(session_id)
        body = await _body(request)
        text = body.get("text")
        if not isinstance(text, str):
            raise ApiError(400, "bad_request", '"text" must be a string')
        with _SessionGuard(session):
            session.require_phase(PHASE_AWAITING_UTTERANCE)
            session.runner = EpisodeRunner(
                app.state.lexicon,
                session.arena,
                text,
                frame=session.frame,
                rng=episode_rng(session.seed, session.episode_count),
                ledger=session.ledger,
            )
            session.phase = PHASE_SEARCHING
            return {
                "tokens": list(session.runner.utterance.tokens),
                "phase": session.phase,
            }

    @app.post("/sessions/{session_id}/step")
    async def step(session_id: str, request: Request):
        session = get_session(session_id)
        await _body(request)
        with _SessionGuard(session):
            session.require_phase(PHASE_SEARCHING)
            outcome = session.runner.step()
            if session.runner.committed:
                session.phase = PHASE_AWAITING_FEEDBACK
            percept = outcome["percept"]
            return {
                "phase": session.phase,
                "station": outcome["station"],
                "percept": None
                if percept is None
                else [
                    {"object_id": oid, "x": [float(v) for v in x]}
                    for oid, x in percept.visible
                ],
                "distribution": _distribution_view(session.runner),
                "resolution": "committed" if session.runner.committed else "undecided",
                "commit": session.runner.commit,
            }

    @app.post("/sessions/{session_id}/feedback")
    async def feedback(session_id: str, request: Request):
        session = get_session(session_id)
        body = await _body(request)
        sign = body.get("sign")
        if sign not in (1, -1):
            raise ApiError(400, "bad_request", '"sign" must be +1 or -1')
        with _SessionGuard(session):
            session.require_phase(PHASE_AWAITING_FEEDBACK)
            with app.state.lexicon_lock:
                try:
                    deltas = session.runner.give_feedback(sign)
                except InvalidStateError as exc:
                    raise ApiError(409, "phase_violation", str(exc), phase=session.phase)
            session.episode_count += 1
            session.runner = None
            session.phase = PHASE_AWAITING_UTTERANCE
            return {"phase": session.phase, "deltas": deltas}

    @app.delete("/sessions/{session_id}")
    async def end_session(session_id: str):
        session = get_session(session_id)
        session.phase = PHASE_DONE
        return {"phase": session.phase}

    @app.get("/lexicon")
    async def lexicon_index():
        lex = app.state.lexicon
        return {
            "words": [
                {"token": tok, "pos_count": clf.pos_count, "neg_count": clf.neg_count}
                for tok, clf in sorted(lex.words.items())
            ]
        }

    @app.get("/lexicon/{word}")
    async def lexicon_word(word: str):
        clf = app.state.lexicon.get(word)
        return {
            "token": clf.token,
            "feature_names": list(FEATURE_NAMES),
            "weights": [float(w) for w in clf.weights],
            "bias": float(clf.bias),
            "pos_count": clf.pos_count,
            "neg_count": clf.neg_count,
        }

    @app.post("/lexicon/save")
    async def lexicon_save(request: Request):
        body = await _body(request)
        path = body.get("path") or app.state.lexicon_path
        if not path:
            raise ApiError(400, "no_path", "no lexicon path configured or supplied")
        with app.state.lexicon_lock:
            save_lexicon(app.state.lexicon, path)
        return {"saved": path}

    ui_dir = os.environ.get("WORDFETCH_UI_DIR")
    if ui_dir and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles

        @app.get("/")
        async def index():
            return FileResponse(os.path.join(ui_dir, "index.html"))

        app.mount("/ui", StaticFiles(directory=ui_dir), name="ui")

    return app
