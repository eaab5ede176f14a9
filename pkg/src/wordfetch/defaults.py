"""Default arena config and vocabulary used by curricula, the CLI, and tests."""

_ANY_SHAPE = ["cube", "ball", "cone", "brick"]

DEFAULT_ARENA_CONFIG = {
    "objects": [
        {"shape": _ANY_SHAPE, "count": 4, "area_range": [50, 400], "albedo_range": [0.0, 1.0]},
    ],
    "station_count": "auto",
    "bounds": [100, 100],
    "noise_sigma": 0.0,
}

# thresholds leave a margin band between each antonym pair, so the
# synthetic speaker never labels borderline objects
DEFAULT_GRAMMAR_SPEC = {
    "attributes": {
        "big": {"feature": "size", "op": ">=", "threshold": 0.6},
        "small": {"feature": "size", "op": "<=", "threshold": 0.4},
        "round": {"feature": "cornerness", "op": "<=", "threshold": 0.25},
        "boxy": {"feature": "cornerness", "op": ">=", "threshold": 0.75},
        "long": {"feature": "elongation", "op": ">=", "threshold": 0.5},
        "short": {"feature": "elongation", "op": "<=", "threshold": 0.25},
        "dark": {"feature": "intensity", "op": "<=", "threshold": 0.35},
        "light": {"feature": "intensity", "op": ">=", "threshold": 0.65},
        "left": {"feature": "lateral", "op": "<=", "threshold": -0.2, "frame": "speaker"},
        "right": {"feature": "lateral", "op": ">=", "threshold": 0.2, "frame": "speaker"},
        "near": {"feature": "depth", "op": "<=", "threshold": 0.4, "frame": "speaker"},
        "far": {"feature": "depth", "op": ">=", "threshold": 0.6, "frame": "speaker"},
    },
    "articles": ["the"],
    "heads": ["one", "thing"],
}
