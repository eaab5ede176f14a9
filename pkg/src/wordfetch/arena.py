"""Deterministic tabletop world with a narrow-view agent.

Objects sit in a central disc; the agent inspects the table from stations
on a surrounding ring, seeing at most the two nearest objects inside a 60
degree half-angle cone each time. Detection is oracle-perfect by default
(optionally Gaussian-noised) but reports only features, never identity
beyond a bookkeeping id.

All geometry is 2D top-down. Feature lateral/depth components are computed
in a chosen reference frame: the agent's current station or the speaker's
pose. The view cone, by contrast, is always the agent's.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArenaConstructionError, ConfigurationError, InvalidInputError, InvalidObjectError
from .features import as_feature_array

CONE_HALF_ANGLE = math.pi / 3  # 60 degrees
VIEW_RANGE_FRACTION = 0.4  # of the arena diagonal
OBJECT_DISC_FRACTION = 0.18  # of min(bounds), around the center
STATION_RING_FRACTION = 0.35  # of min(bounds)
MAX_VISIBLE = 2

AGENT_FRAME = "agent"
SPEAKER_FRAME = "speaker"

# shape → (corner_count, default aspect ratio range major/minor)
SHAPE_DEFS = {
    "cube": (8, (1.0, 1.0)),
    "ball": (0, (1.0, 1.0)),
    "cone": (1, (1.0, 1.0)),
    "brick": (8, (2.0, 4.0)),
}


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float  # radians, world frame

    def forward(self):
        return (math.cos(self.heading), math.sin(self.heading))

    def right(self):
        return (math.sin(self.heading), -math.cos(self.heading))


@dataclass
class SimObject:
    object_id: int
    shape: str
    footprint_area: float
    major_axis: float
    minor_axis: float
    corner_count: int
    albedo: float
    position: tuple


@dataclass
class Arena:
    objects: list
    stations: list  # Pose per inspection point
    speaker_pose: Pose
    start_pose: Pose
    rng_seed: int
    bounds: tuple  # (width, height)
    view_range: float
    max_area: float
    noise_sigma: float = 0.0

    def object_by_id(self, object_id):
        for obj in self.objects:
            if obj.object_id == object_id:
                return obj
        raise InvalidInputError(f"no object with id {object_id}")

    def frame_pose(self, frame, station_index=None):
        if frame == SPEAKER_FRAME:
            return self.speaker_pose
        if frame == AGENT_FRAME:
            if station_index is None:
                raise InvalidInputError("agent frame needs a station index")
            return self.stations[station_index]
        raise InvalidInputError(f"unknown frame {frame!r}")


@dataclass
class Percept:
    station_index: int
    visible: list  # [(object_id, feature_vector)], depth ascending, length <= cap


@dataclass
class ArenaState:
    """Mutable per-episode agent state; one episode owns it exclusively."""

    pose: Pose
    visited: set = field(default_factory=set)
    steps: int = 0
    station_index: int = None


def load_arena_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            config = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"bad arena config {path}: {exc}") from None
    validate_arena_config(config)
    return config


def validate_arena_config(config):
    if not isinstance(config, dict) or not config.get("objects"):
        raise ConfigurationError("arena config must name at least one object")
    for entry in config["objects"]:
        shape = entry.get("shape")
        shapes = shape if isinstance(shape, (list, tuple)) else [shape]
        if not shapes or any(s not in SHAPE_DEFS for s in shapes):
            raise ConfigurationError(f"unknown shape {shape!r}")
        for key in ("area_range", "albedo_range"):
            rng = entry.get(key)
            if (
                not isinstance(rng, (list, tuple))
                or len(rng) != 2
                or not all(isinstance(v, (int, float)) for v in rng)
                or rng[0] > rng[1]
            ):
                raise ConfigurationError(f"object entry needs a valid {key}, got {rng!r}")
    bounds = config.get("bounds", [100.0, 100.0])
    if len(bounds) != 2 or min(bounds) <= 0:
        raise ConfigurationError(f"bad bounds {bounds!r}")
    return config


def _make_object(object_id, entry, rng):
    shape = entry["shape"]
    if isinstance(shape, (list, tuple)):
        shape = shape[int(rng.integers(len(shape)))]
    corners, aspect_default = SHAPE_DEFS[shape]
    area = float(rng.uniform(*entry["area_range"]))
    albedo = float(rng.uniform(*entry["albedo_range"]))
    aspect = float(rng.uniform(*entry.get("aspect_range", aspect_default)))
    # footprint modeled as an ellipse-ish blob: area = major * minor
    minor = math.sqrt(area / aspect)
    major = minor * aspect
    return SimObject(
        object_id=object_id,
        shape=shape,
        footprint_area=area,
        major_axis=major,
        minor_axis=minor,
        corner_count=corners,
        albedo=albedo,
        position=(0.0, 0.0),
    )


def build_arena(config, seed):
    """Deterministically instantiate a config at a seed.

    Objects are scattered in the central disc with a minimum separation;
    ring stations are added (or densified) until the union of station
    percepts covers every object id.
    """
    validate_arena_config(config)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF]))
    width, height = (float(v) for v in config.get("bounds", [100.0, 100.0]))
    center = (width / 2.0, height / 2.0)
    view_range = VIEW_RANGE_FRACTION * math.hypot(width, height)
    disc = OBJECT_DISC_FRACTION * min(width, height)
    ring = STATION_RING_FRACTION * min(width, height)
    noise_sigma = float(config.get("noise_sigma", 0.0))

    entries = []
    for entry in config["objects"]:
        entries.extend([entry] * int(entry.get("count", 1)))

    objects = [_make_object(i, entry, rng) for i, entry in enumerate(entries)]
    max_area = max(hi for e in config["objects"] for hi in [float(e["area_range"][1])])

    # scatter with minimum separation; give up on separation, not placement
    min_sep = 4.0
    placed = []
    for obj in objects:
        for _ in range(100):
            r = disc * math.sqrt(float(rng.uniform(0, 1)))
            theta = float(rng.uniform(0, 2 * math.pi))
            pos = (center[0] + r * math.cos(theta), center[1] + r * math.sin(theta))
            if all(math.dist(pos, q) >= min_sep for q in placed):
                break
        placed.append(pos)
        obj.position = pos

    speaker_angle = -math.pi / 2
    speaker_pos = (
        center[0] + ring * math.cos(speaker_angle),
        center[1] + ring * math.sin(speaker_angle),
    )
    speaker_pose = Pose(speaker_pos[0], speaker_pos[1], _heading_to(speaker_pos, center))
    start_pose = speaker_pose  # the agent begins at the speaker's side

    station_count = config.get("station_count", "auto")
    auto = station_count == "auto"
    n_stations = max(3, len(objects)) if auto else int(station_count)
    if n_stations < 1:
        raise ConfigurationError("station_count must be >= 1")
    offset = float(rng.uniform(0, 2 * math.pi))
    stations = []
    for k in range(n_stations):
        angle = offset + 2 * math.pi * k / n_stations
        pos = (center[0] + ring * math.cos(angle), center[1] + ring * math.sin(angle))
        stations.append(Pose(pos[0], pos[1], _heading_to(pos, center)))

    arena = Arena(
        objects=objects,
        stations=stations,
        speaker_pose=speaker_pose,
        start_pose=start_pose,
        rng_seed=int(seed),
        bounds=(width, height),
        view_range=view_range,
        max_area=max_area,
        noise_sigma=noise_sigma,
    )

    # densify with dedicated stations until every object shows up in some percept
    for _ in range(2 * len(objects) + 1):
        missing = _uncovered(arena)
        if not missing:
            break
        if not auto:
            raise ArenaConstructionError(
                f"objects {sorted(missing)} not perceivable from any of the "
                f"{len(arena.stations)} fixed stations"
            )
        obj = arena.object_by_id(min(missing))
        to_center = _unit(center, obj.position)
        pos = (obj.position[0] + 6.0 * to_center[0], obj.position[1] + 6.0 * to_center[1])
        pos = (min(max(pos[0], 0.0), width), min(max(pos[1], 0.0), height))
        arena.stations.append(Pose(pos[0], pos[1], _heading_to(pos, obj.position)))
    else:
        raise ArenaConstructionError("could not cover every object with a station")
    if _uncovered(arena):
        raise ArenaConstructionError("could not cover every object with a station")
    return arena


def _heading_to(src, dst):
    return math.atan2(dst[1] - src[1], dst[0] - src[0])


def _unit(dst, src):
    d = math.dist(src, dst)
    if d == 0:
        return (1.0, 0.0)
    return ((dst[0] - src[0]) / d, (dst[1] - src[1]) / d)


def _uncovered(arena):
    seen = set()
    for idx in range(len(arena.stations)):
        for oid, _ in _select_visible(arena, idx, MAX_VISIBLE):
            seen.add(oid)
    return {obj.object_id for obj in arena.objects} - seen


def extract_features(obj, frame_pose, view_range, max_area):
    """Feature vector for one object relative to a frame origin pose."""
    if obj.major_axis <= 0:
        raise InvalidObjectError(f"object {obj.object_id} has degenerate axes")
    dx = (obj.position[0] - frame_pose.x, obj.position[1] - frame_pose.y)
    right = frame_pose.right()
    lateral_offset = dx[0] * right[0] + dx[1] * right[1]
    distance = math.hypot(*dx)
    size = min(max(obj.footprint_area / max_area, 0.0), 1.0)
    elongation = 1.0 - obj.minor_axis / obj.major_axis
    cornerness = min(obj.corner_count, 8) / 8.0
    intensity = min(max(obj.albedo, 0.0), 1.0)
    lateral = min(max(lateral_offset / view_range, -1.0), 1.0)
    depth = min(max(distance / view_range, 0.0), 1.0)
    return as_feature_array([size, elongation, cornerness, intensity, lateral, depth])


def _in_cone(arena, station_pose, obj):
    dx = (obj.position[0] - station_pose.x, obj.position[1] - station_pose.y)
    distance = math.hypot(*dx)
    if distance > arena.view_range:
        return False
    if distance == 0:
        return True
    fwd = station_pose.forward()
    cos_angle = (dx[0] * fwd[0] + dx[1] * fwd[1]) / distance
    return cos_angle >= math.cos(CONE_HALF_ANGLE)


def _select_visible(arena, station_index, max_visible):
    """(object_id, station distance) of the nearest in-cone objects."""
    pose = arena.stations[station_index]
    hits = [
        (math.dist((pose.x, pose.y), obj.position), obj.object_id)
        for obj in arena.objects
        if _in_cone(arena, pose, obj)
    ]
    hits.sort()
    if max_visible is not None:
        hits = hits[:max_visible]
    return [(oid, d) for d, oid in hits]


def percept_at(arena, station_index, frame=AGENT_FRAME, max_visible=MAX_VISIBLE):
    """What the agent detects from one station, featurized in ``frame``."""
    if not 0 <= station_index < len(arena.stations):
        raise IndexError(f"station index {station_index} out of range")
    frame_pose = arena.frame_pose(frame, station_index)
    visible = []
    for oid, _ in _select_visible(arena, station_index, max_visible):
        obj = arena.object_by_id(oid)
        x = extract_features(obj, frame_pose, arena.view_range, arena.max_area)
        if arena.noise_sigma > 0:
            x = _noisy(x, arena, station_index, oid)
        visible.append((oid, x))
    visible.sort(key=lambda item: (item[1][5], item[0]))  # depth ascending
    return Percept(station_index=station_index, visible=visible)


def _noisy(x, arena, station_index, object_id):
    seq = np.random.SeedSequence(
        [arena.rng_seed & 0xFFFFFFFF, 0x5E1F, station_index, object_id]
    )
    noise = np.random.default_rng(seq).normal(0.0, arena.noise_sigma, size=len(x))
    noisy = np.clip(x + noise, [0, 0, 0, 0, -1, 0], [1, 1, 1, 1, 1, 1])
    return as_feature_array(noisy)


def advance(arena, state):
    """Move the agent to the nearest unvisited station.

    Returns the new station index, or None when every station has been
    visited (the exhaustion signal; the caller falls back to a commit).
    """
    remaining = [i for i in range(len(arena.stations)) if i not in state.visited]
    if not remaining:
        return None
    nearest = min(
        remaining,
        key=lambda i: (math.dist((state.pose.x, state.pose.y), (arena.stations[i].x, arena.stations[i].y)), i),
    )
    state.visited.add(nearest)
    state.pose = arena.stations[nearest]
    state.station_index = nearest
    state.steps += 1
    return nearest


def arena_to_dict(arena):
    return {
        "bounds": list(arena.bounds),
        "rng_seed": arena.rng_seed,
        "view_range": arena.view_range,
        "noise_sigma": arena.noise_sigma,
        "speaker_pose": _pose_dict(arena.speaker_pose),
        "start_pose": _pose_dict(arena.start_pose),
        "stations": [_pose_dict(p) for p in arena.stations],
        "objects": [
            {
                "object_id": o.object_id,
                "shape": o.shape,
                "footprint_area": o.footprint_area,
                "major_axis": o.major_axis,
                "minor_axis": o.minor_axis,
                "corner_count": o.corner_count,
                "albedo": o.albedo,
                "position": list(o.position),
            }
            for o in arena.objects
        ],
    }


def _pose_dict(pose):
    return {"x": pose.x, "y": pose.y, "heading": pose.heading}
