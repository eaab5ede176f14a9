import json

import numpy as np
import pytest

from wordfetch import Lexicon, load_lexicon, merge_lexicons, save_lexicon, train_word, update_online
from wordfetch.errors import InvalidInputError, LexiconParseError, SchemaVersionError
from wordfetch.lexicon import NEGATIVE_RATIO, consolidate, normalize_token


def test_normalize_token():
    assert normalize_token("  BIG ") == "big"
    assert normalize_token("Café") == "café"
    # NFC: decomposed e + combining acute folds to the composed form
    assert normalize_token("Café") == "café"
    with pytest.raises(InvalidInputError):
        normalize_token("   ")


def test_get_unknown_word_is_neutral_and_not_inserted():
    lex = Lexicon()
    clf = lex.get("zork")
    assert clf.response(np.zeros(6)) == 0.5
    assert "zork" not in lex.words  # reads never mutate the store


def test_train_word_separates_and_records():
    lex = Lexicon(rng_seed=3)
    pos = [np.array([1.0, 0, 0, 0, 0, 0])] * 5
    pool = [np.zeros(6)] * 15
    clf = train_word(lex, "Big", pos, pool)
    assert clf.response(pos[0]) > 0.9
    assert clf.response(np.zeros(6)) < 0.1
    assert clf.pos_count == 5
    assert clf.neg_count == min(len(pool), NEGATIVE_RATIO * 5)
    assert "big" in lex.words


def test_train_word_negative_ratio_cap():
    lex = Lexicon(rng_seed=3)
    clf = train_word(lex, "w", [np.ones(6)], [np.zeros(6)] * 10)
    assert clf.neg_count == NEGATIVE_RATIO


def test_train_word_requires_positives():
    with pytest.raises(InvalidInputError):
        train_word(Lexicon(), "w", [], [np.zeros(6)])


def test_train_word_deterministic_per_seed():
    rng = np.random.default_rng(0)
    pos = list(rng.random((4, 6)))
    pool = list(rng.random((30, 6)))
    a = train_word(Lexicon(rng_seed=9), "w", pos, pool)
    b = train_word(Lexicon(rng_seed=9), "w", pos, pool)
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias
    c = train_word(Lexicon(rng_seed=10), "w", pos, pool)
    # a different lexicon seed samples a different negative subset
    assert not np.array_equal(a.weights, c.weights)


def test_update_online_records_example():
    lex = Lexicon()
    x = np.array([0.2, 0.4, 0.0, 1.0, -0.5, 0.3])
    update_online(lex, "dark", x, 1)
    clf = lex.words["dark"]
    assert clf.pos_count == 1 and len(clf.buffer) == 1
    assert clf.response(x) > 0.5


def test_consolidate_refits_from_buffer():
    lex = Lexicon()
    x_hi = np.array([0.9, 0, 0, 0, 0, 0])
    x_lo = np.array([0.1, 0, 0, 0, 0, 0])
    # many wrong-direction online negatives, then a single positive
    for _ in range(10):
        update_online(lex, "big", x_lo, 0)
    update_online(lex, "big", x_hi, 1)
    refit = consolidate(lex, ["big", "missing"])
    assert refit == ["big"]
    clf = lex.words["big"]
    assert clf.response(x_hi) > clf.response(x_lo)


def test_merge_disjoint_and_shared(rng):
    a, b = Lexicon(rng_seed=1), Lexicon(rng_seed=2)
    train_word(a, "only-a", [np.ones(6)], [np.zeros(6)] * 3)
    train_word(b, "only-b", [np.ones(6)], [np.zeros(6)] * 3)
    X = rng.random((20, 6))
    for i, x in enumerate(X):
        update_online(a if i % 2 else b, "both", x, int(x[0] > 0.5))
    merged = merge_lexicons(a, b)
    assert set(merged.words) == {"only-a", "only-b", "both"}
    assert merged.rng_seed == a.rng_seed
    both = merged.words["both"]
    assert both.pos_count == a.words["both"].pos_count + b.words["both"].pos_count
    assert len(both.buffer) == len(a.words["both"].buffer) + len(b.words["both"].buffer)
    # retrained on the pooled examples: ranks a high-size point over a low one
    assert both.response(np.array([0.9, 0, 0, 0, 0, 0])) > both.response(
        np.array([0.1, 0, 0, 0, 0, 0])
    )


def test_merge_improves_on_split_halves(rng):
    # linearly separable concept; each half sees 6 labeled examples, the
    # merged lexicon retrains on the pooled dozen
    X = rng.random((12, 6))
    X[:, 3] = [0.8, 0.9, 0.7, 0.2, 0.1, 0.3] * 2  # 3 pos + 3 neg per half
    y = (X[:, 3] > 0.5).astype(int)

    def teach(rows, seed):
        lex = Lexicon(rng_seed=seed)
        pos = [X[i] for i in rows if y[i]]
        neg = [X[i] for i in rows if not y[i]]
        train_word(lex, "light", pos, neg)
        return lex

    a = teach(range(0, 6), 5)
    b = teach(range(6, 12), 5)
    merged = merge_lexicons(a, b)

    def acc(lex):
        hits = 0
        for s in range(100):
            scene = np.random.default_rng(1000 + s).random((4, 6))
            target = int(np.argmax(scene[:, 3]))
            scores = [lex.response("light", x) for x in scene]
            hits += int(np.argmax(scores)) == target
        return hits / 100

    assert acc(merged) >= max(acc(a), acc(b))


def test_merge_schema_mismatch():
    a, b = Lexicon(), Lexicon()
    b.schema_version = 2
    with pytest.raises(SchemaVersionError):
        merge_lexicons(a, b)


def test_save_load_round_trip_bit_identical(tmp_path, rng):
    lex = Lexicon(rng_seed=42)
    for i in range(3):
        update_online(lex, f"w{i}", rng.random(6), i % 2)
    train_word(lex, "big", [np.ones(6)], list(rng.random((8, 6))))
    path = tmp_path / "lex.json"
    save_lexicon(lex, path)
    loaded = load_lexicon(path)
    assert loaded.rng_seed == 42
    for tok, clf in lex.words.items():
        other = loaded.words[tok]
        assert np.array_equal(clf.weights, other.weights)
        assert clf.bias == other.bias
        assert clf.pos_count == other.pos_count and clf.neg_count == other.neg_count
        for (xa, ya), (xb, yb) in zip(clf.buffer, other.buffer):
            assert np.array_equal(xa, xb) and ya == yb
    # saving the loaded copy reproduces the same bytes
    path2 = tmp_path / "again.json"
    save_lexicon(loaded, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_load_reports_line_and_column(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "schema_version": 1,\n  "words": }\n')
    with pytest.raises(LexiconParseError) as err:
        load_lexicon(path)
    assert err.value.line == 3 and err.value.column is not None


def test_load_rejects_nan_and_bad_schema(tmp_path):
    path = tmp_path / "nan.json"
    path.write_text('{"schema_version": 1, "rng_seed": 0, "words": {"w": '
                    '{"weights": [NaN,0,0,0,0,0], "bias": 0, "buffer": []}}}')
    with pytest.raises(LexiconParseError):
        load_lexicon(path)
    path.write_text('{"schema_version": 7, "rng_seed": 0, "words": {}}')
    with pytest.raises(SchemaVersionError):
        load_lexicon(path)


def test_load_validates_entries(tmp_path):
    path = tmp_path / "bad.json"
    doc = {"schema_version": 1, "rng_seed": 0,
           "words": {"w": {"weights": [0, 0, 0], "bias": 0.0, "buffer": []}}}
    path.write_text(json.dumps(doc))
    with pytest.raises(LexiconParseError):
        load_lexicon(path)
    doc["words"]["w"] = {"weights": [0] * 6, "bias": 0.0,
                         "buffer": [{"x": [0] * 6, "y": 3}]}
    path.write_text(json.dumps(doc))
    with pytest.raises(LexiconParseError):
        load_lexicon(path)
