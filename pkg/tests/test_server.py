import numpy as np
import pytest
from fastapi.testclient import TestClient

from wordfetch import Lexicon
from wordfetch.arena import build_arena
from wordfetch.defaults import DEFAULT_ARENA_CONFIG
from wordfetch.game import EpisodeLedger, episode_rng, run_episode
from wordfetch.server import create_app


@pytest.fixture()
def client():
    app = create_app(lexicon=Lexicon(rng_seed=0))
    with TestClient(app) as c:
        yield c


def _new_session(client, **body):
    resp = client.post("/sessions", json=body or {"seed": 0})
    assert resp.status_code == 200
    return resp.json()["session_id"]


def _drive_to_commit(client, sid, text):
    resp = client.post(f"/sessions/{sid}/utterance", json={"text": text})
    assert resp.status_code == 200
    while True:
        step = client.post(f"/sessions/{sid}/step", json={})
        assert step.status_code == 200
        if step.json()["resolution"] == "committed":
            return step.json()


def test_create_session_returns_arena_snapshot(client):
    resp = client.post("/sessions", json={"seed": 3})
    body = resp.json()
    assert resp.status_code == 200
    assert len(body["arena_snapshot"]["objects"]) == 4
    state = client.get(f"/sessions/{body['session_id']}/state").json()
    assert state["phase"] == "awaiting_utterance"
    assert state["episode_count"] == 0


def test_create_session_validates(client):
    assert client.post("/sessions", json={"seed": "x"}).status_code == 400
    assert client.post("/sessions", json={"frame": "martian"}).status_code == 400
    bad = client.post("/sessions", json={"arena_config": {"objects": []}})
    assert bad.status_code == 400
    assert bad.json()["code"] == "bad_config"


def test_unknown_session_404(client):
    assert client.get("/sessions/nope/state").status_code == 404


def test_full_episode_flow_and_phases(client):
    sid = _new_session(client)
    # wrong-phase requests are rejected with the phase in the body
    step = client.post(f"/sessions/{sid}/step", json={})
    assert step.status_code == 409
    assert step.json()["phase"] == "awaiting_utterance"
    assert client.post(f"/sessions/{sid}/feedback", json={"sign": 1}).status_code == 409

    final = _drive_to_commit(client, sid, "The big one!")
    assert final["phase"] == "awaiting_feedback"
    assert final["commit"]["object_id"] in (0, 1, 2, 3)

    # utterance and step are now illegal, feedback is not
    assert client.post(f"/sessions/{sid}/utterance", json={"text": "x"}).status_code == 409
    assert client.post(f"/sessions/{sid}/step", json={}).status_code == 409
    fb = client.post(f"/sessions/{sid}/feedback", json={"sign": 1})
    assert fb.status_code == 200
    deltas = fb.json()["deltas"]
    assert set(deltas) == {"the", "big", "one"}
    for before, after in deltas.values():
        assert after >= before  # positive feedback raises every token's response
    state = client.get(f"/sessions/{sid}/state").json()
    assert state["phase"] == "awaiting_utterance"
    assert state["episode_count"] == 1


def test_feedback_sign_validation(client):
    sid = _new_session(client)
    _drive_to_commit(client, sid, "the one")
    assert client.post(f"/sessions/{sid}/feedback", json={"sign": 0}).status_code == 400


def test_state_exposes_distribution_and_seen(client):
    sid = _new_session(client)
    client.post(f"/sessions/{sid}/utterance", json={"text": "the big one"})
    client.post(f"/sessions/{sid}/step", json={})
    state = client.get(f"/sessions/{sid}/state").json()
    assert state["utterance"]["tokens"] == ["the", "big", "one"]
    assert state["seen"]
    assert len(state["distribution"]) == len(state["seen"])
    for entry in state["distribution"]:
        assert 0 <= entry["normalized"] <= 1
    assert state["agent"]["steps"] >= 1
    assert state["ledger_tail"]


def test_delete_ends_session(client):
    sid = _new_session(client)
    assert client.delete(f"/sessions/{sid}").json()["phase"] == "done"
    assert client.post(f"/sessions/{sid}/utterance", json={"text": "x"}).status_code == 409


def test_lexicon_endpoints(client):
    sid = _new_session(client)
    _drive_to_commit(client, sid, "the dark one")
    client.post(f"/sessions/{sid}/feedback", json={"sign": 1})
    index = client.get("/lexicon").json()["words"]
    assert {w["token"] for w in index} == {"the", "dark", "one"}
    word = client.get("/lexicon/dark").json()
    assert word["feature_names"][3] == "intensity"
    assert len(word["weights"]) == 6
    assert word["pos_count"] == 1
    # unknown words read as neutral, not as errors
    neutral = client.get("/lexicon/zork").json()
    assert neutral["weights"] == [0.0] * 6 and neutral["bias"] == 0.0


def test_lexicon_save_round_trip(tmp_path):
    app = create_app(lexicon=Lexicon(), lexicon_path=str(tmp_path / "lex.json"))
    with TestClient(app) as client:
        sid = _new_session(client)
        _drive_to_commit(client, sid, "the small one")
        client.post(f"/sessions/{sid}/feedback", json={"sign": -1})
        resp = client.post("/lexicon/save", json={})
        assert resp.status_code == 200
        from wordfetch import load_lexicon

        loaded = load_lexicon(tmp_path / "lex.json")
        assert set(loaded.words) == {"the", "small", "one"}

    no_path = create_app(lexicon=Lexicon())
    with TestClient(no_path) as client:
        assert client.post("/lexicon/save", json={}).status_code == 400


def test_service_matches_library_episode_ledger():
    """Driving the service step-by-step equals run_episode byte for byte."""
    seed = 6
    lexicon = Lexicon(rng_seed=0)
    app = create_app(lexicon=lexicon)
    with TestClient(app) as client:
        sid = _new_session(client, seed=seed)
        _drive_to_commit(client, sid, "the big round one")
        client.post(f"/sessions/{sid}/feedback", json={"sign": 1})
        state = client.get(f"/sessions/{sid}/state").json()
        server_events = state["ledger_tail"]

    arena = build_arena(DEFAULT_ARENA_CONFIG, seed)
    lib_ledger = EpisodeLedger()
    run_episode(
        Lexicon(rng_seed=0),
        arena,
        "the big round one",
        target_id=None,
        mode="learning",
        feedback_source=lambda result: 1,
        rng=episode_rng(seed, 0),
        ledger=lib_ledger,
    )
    assert server_events == lib_ledger.events


def test_malformed_bodies(client):
    sid = _new_session(client)
    resp = client.post(
        f"/sessions/{sid}/utterance",
        content=b"not json",
        headers={"content-type": "application/json"},
    )
    assert resp.status_code == 400
    assert client.post(f"/sessions/{sid}/utterance", json={"text": 5}).status_code == 400
