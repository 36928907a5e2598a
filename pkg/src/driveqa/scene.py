"""Object-centric scene database: canonical loading and derived semantics.

A scene is a sequence of key frames, each holding the ego state and the
objects visible at that instant.  Object positions and velocities are stored
in the ego's bird's-eye-view frame of the same key frame (x forward, y left,
meters); the ego entry carries the world pose needed to chain frames
together.  Everything downstream (labels, trajectories, question templates)
reads from this structure and never mutates it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    HorizonOutOfRange,
    MalformedInput,
    SchemaViolation,
    TrackGap,
    UnknownObject,
)


class Category(str, Enum):
    VEHICLE = "vehicle"
    PEDESTRIAN = "pedestrian"
    CYCLIST = "cyclist"
    OTHER = "other"


class MotionStatus(str, Enum):
    MOVING = "moving"
    STOPPED = "stopped"
    PARKED = "parked"


class Turn(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    STRAIGHT = "straight"


class Trend(str, Enum):
    APPROACH = "approach"
    STAY_AWAY = "stay_away"
    STATIC = "static"


class Merge(str, Enum):
    MERGE_IN = "merge_in"
    MERGE_OUT = "merge_out"
    NONE = "none"


class RelativePosition(str, Enum):
    FRONT = "front"
    FRONT_LEFT = "front_left"
    FRONT_RIGHT = "front_right"
    LEFT = "left"
    RIGHT = "right"
    REAR = "rear"


@dataclass(frozen=True)
class BBox:
    """Axis-aligned image-plane box in pixels, xyxy."""

    x1: float
    y1: float
    x2: float
    y2: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)


@dataclass(frozen=True)
class EgoEntry:
    """Ego world pose and speed at one key frame."""

    position: tuple[float, float]
    heading: float
    speed: float


@dataclass(frozen=True)
class ObjectEntry:
    """One object observation; geometry in the frame's ego BEV coordinates.

    `velocity` is the object's ground velocity expressed in the ego axes of
    the same frame (a car rolling alongside the ego has nonzero velocity;
    a parked one has zero even while the ego moves past it).
    """

    object_id: str
    category: Category
    bbox: BBox
    position: tuple[float, float]
    velocity: tuple[float, float]
    attributes: frozenset[str] = frozenset()


@dataclass(frozen=True)
class KeyFrame:
    timestamp: float
    ego: EgoEntry
    objects: tuple[ObjectEntry, ...]

    def get(self, object_id: str) -> ObjectEntry | None:
        for obj in self.objects:
            if obj.object_id == object_id:
                return obj
        return None


@dataclass(frozen=True)
class SceneSequence:
    """Immutable key-framed scene; safe for concurrent read access."""

    scene_id: str
    frames: tuple[KeyFrame, ...]
    frame_period: float
    source_tag: str = ""

    def object_ids(self) -> list[str]:
        """Distinct object ids in first-appearance order."""
        seen: dict[str, None] = {}
        for frame in self.frames:
            for obj in frame.objects:
                seen.setdefault(obj.object_id, None)
        return list(seen)

    def observed_throughout(self, object_id: str, start: int, end: int) -> bool:
        """Whether the object appears in every frame of [start, end]."""
        return all(self.frames[g].get(object_id) is not None for g in range(start, end + 1))


@dataclass(frozen=True)
class Trajectory:
    """Future positions in the ego BEV frame of the query key frame."""

    points: tuple[tuple[float, float], ...]
    stride: float

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("trajectory needs at least 2 points")
        if self.stride <= 0:
            raise ValueError("trajectory stride must be positive")


@dataclass(frozen=True)
class DerivedLabels:
    """Semantic labels for one object at one frame, over a fixed horizon."""

    motion_status: MotionStatus
    turn: Turn
    trend: Trend
    merge: Merge
    distance_to_ego: float
    relative_position: RelativePosition


@dataclass(frozen=True)
class LabelThresholds:
    """Tunable constants behind the label rules.

    stop_speed: mean-speed bound (m/s) below which an object counts as
        stopped over the trailing window, and bound for parked at every frame.
    trailing_window: seconds of history used for the stopped test.
    turn_angle_deg: net heading change beyond which a turn is declared.
    trend_deadband: meters of distance change ignored as jitter.
    corridor_width: full width (m) of the ego-lane proxy corridor.
    min_heading_speed: speed below which an object's heading is undefined.
    """

    stop_speed: float = 0.5
    trailing_window: float = 1.0
    turn_angle_deg: float = 15.0
    trend_deadband: float = 0.5
    corridor_width: float = 3.5
    min_heading_speed: float = 0.1


DEFAULT_THRESHOLDS = LabelThresholds()

_CATEGORIES = {c.value for c in Category}

_SCENE_KEYS = {"scene_id", "frame_period", "frames", "source_tag"}
_FRAME_KEYS = {"timestamp", "ego", "objects"}
_EGO_KEYS = {"position", "heading", "speed"}
_OBJECT_KEYS = {"id", "category", "bbox", "position", "velocity", "attributes"}


def _require(cond: bool, path: str, message: str):
    if not cond:
        raise SchemaViolation(path, message)


def _check_keys(obj: dict, allowed: set[str], path: str, lenient: bool):
    if not lenient:
        unknown = set(obj) - allowed
        if unknown:
            raise SchemaViolation(path, f"unknown keys {sorted(unknown)}")


def _number(value, path: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), path, "expected a number")
    out = float(value)
    _require(math.isfinite(out), path, "must be finite")
    return out


def _pair(value, path: str) -> tuple[float, float]:
    _require(isinstance(value, (list, tuple)) and len(value) == 2, path, "expected [x, y]")
    return (_number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]"))


def _parse_bbox(value, path: str) -> BBox:
    _require(isinstance(value, (list, tuple)) and len(value) == 4, path, "expected [x1, y1, x2, y2]")
    x1, y1, x2, y2 = (_number(v, f"{path}[{i}]") for i, v in enumerate(value))
    _require(x1 < x2, path, "requires x1 < x2")
    _require(y1 < y2, path, "requires y1 < y2")
    _require(min(x1, y1, x2, y2) >= 0, path, "coordinates must be non-negative")
    return BBox(x1, y1, x2, y2)


def _parse_object(raw, path: str, lenient: bool) -> ObjectEntry:
    _require(isinstance(raw, dict), path, "expected an object entry")
    _check_keys(raw, _OBJECT_KEYS, path, lenient)
    for key in ("id", "category", "bbox", "position", "velocity"):
        _require(key in raw, path, f"missing key '{key}'")
    _require(isinstance(raw["id"], str) and raw["id"], f"{path}.id", "must be a non-empty string")
    _require(raw["category"] in _CATEGORIES, f"{path}.category", f"must be one of {sorted(_CATEGORIES)}")
    attributes = raw.get("attributes", [])
    _require(
        isinstance(attributes, list) and all(isinstance(a, str) for a in attributes),
        f"{path}.attributes",
        "must be a list of strings",
    )
    return ObjectEntry(
        object_id=raw["id"],
        category=Category(raw["category"]),
        bbox=_parse_bbox(raw["bbox"], f"{path}.bbox"),
        position=_pair(raw["position"], f"{path}.position"),
        velocity=_pair(raw["velocity"], f"{path}.velocity"),
        attributes=frozenset(attributes),
    )


def _parse_ego(raw, path: str, lenient: bool) -> EgoEntry:
    _require(isinstance(raw, dict), path, "expected an ego entry")
    _check_keys(raw, _EGO_KEYS, path, lenient)
    for key in _EGO_KEYS:
        _require(key in raw, path, f"missing key '{key}'")
    heading = _number(raw["heading"], f"{path}.heading")
    _require(-math.pi < heading <= math.pi, f"{path}.heading", "must lie in (-pi, pi]")
    speed = _number(raw["speed"], f"{path}.speed")
    _require(speed >= 0, f"{path}.speed", "must be non-negative")
    return EgoEntry(position=_pair(raw["position"], f"{path}.position"), heading=heading, speed=speed)


def load_scene(data: bytes | str | dict, lenient: bool = False) -> SceneSequence:
    """Parse one canonical scene document into a validated SceneSequence.

    Rejects malformed input rather than repairing it: JSON syntax errors
    raise MalformedInput, invariant breaches raise SchemaViolation with the
    path of the offending field.  Unknown keys are rejected unless
    `lenient` is set.
    """
    if isinstance(data, (bytes, str)):
        try:
            raw = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"invalid JSON: {exc}") from exc
    else:
        raw = data
    _require(isinstance(raw, dict), "$", "top level must be a JSON object")
    _check_keys(raw, _SCENE_KEYS, "$", lenient)
    for key in ("scene_id", "frame_period", "frames"):
        _require(key in raw, "$", f"missing key '{key}'")
    _require(isinstance(raw["scene_id"], str) and raw["scene_id"], "$.scene_id", "must be a non-empty string")
    frame_period = _number(raw["frame_period"], "$.frame_period")
    _require(frame_period > 0, "$.frame_period", "must be positive")
    _require(isinstance(raw["frames"], list), "$.frames", "expected an array")
    _require(len(raw["frames"]) >= 1, "$.frames", "scene must contain at least one frame")
    source_tag = raw.get("source_tag", "")
    _require(isinstance(source_tag, str), "$.source_tag", "must be a string")

    frames: list[KeyFrame] = []
    categories: dict[str, Category] = {}
    for i, rf in enumerate(raw["frames"]):
        path = f"$.frames[{i}]"
        _require(isinstance(rf, dict), path, "expected a frame object")
        _check_keys(rf, _FRAME_KEYS, path, lenient)
        for key in _FRAME_KEYS:
            _require(key in rf, path, f"missing key '{key}'")
        timestamp = _number(rf["timestamp"], f"{path}.timestamp")
        if frames:
            _require(timestamp > frames[-1].timestamp, f"{path}.timestamp", "timestamps must strictly increase")
        ego = _parse_ego(rf["ego"], f"{path}.ego", lenient)
        _require(isinstance(rf["objects"], list), f"{path}.objects", "expected an array")
        objects: list[ObjectEntry] = []
        seen_ids: set[str] = set()
        for j, ro in enumerate(rf["objects"]):
            obj = _parse_object(ro, f"{path}.objects[{j}]", lenient)
            _require(obj.object_id not in seen_ids, f"{path}.objects[{j}].id", "duplicate object id in frame")
            seen_ids.add(obj.object_id)
            prior = categories.get(obj.object_id)
            _require(
                prior is None or prior == obj.category,
                f"{path}.objects[{j}].category",
                f"category changed from '{prior.value if prior else ''}'",
            )
            categories[obj.object_id] = obj.category
            objects.append(obj)
        frames.append(KeyFrame(timestamp=timestamp, ego=ego, objects=tuple(objects)))

    return SceneSequence(
        scene_id=raw["scene_id"],
        frames=tuple(frames),
        frame_period=frame_period,
        source_tag=source_tag,
    )


def load_scene_file(path, lenient: bool = False) -> SceneSequence:
    with open(path, "rb") as fh:
        return load_scene(fh.read(), lenient=lenient)


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def world_position(frame: KeyFrame, obj: ObjectEntry) -> np.ndarray:
    """Object position in world coordinates."""
    return np.asarray(frame.ego.position) + _rotation(frame.ego.heading) @ np.asarray(obj.position)


def _to_frame(anchor: KeyFrame, world: np.ndarray) -> np.ndarray:
    """Express a world point in the anchor frame's ego BEV coordinates."""
    return _rotation(-anchor.ego.heading) @ (world - np.asarray(anchor.ego.position))


def _wrap_angle(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = math.remainder(theta, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def _object_world_heading(frame: KeyFrame, obj: ObjectEntry) -> float | None:
    """Heading of the object's ground velocity, None when nearly still."""
    vx, vy = obj.velocity
    if math.hypot(vx, vy) < DEFAULT_THRESHOLDS.min_heading_speed:
        return None
    return _wrap_angle(frame.ego.heading + math.atan2(vy, vx))


def _check_window(scene: SceneSequence, at_frame: int, horizon: int):
    if not 0 <= at_frame < len(scene.frames):
        raise HorizonOutOfRange(f"frame {at_frame} outside scene of {len(scene.frames)} frames")
    if horizon < 1 or at_frame + horizon >= len(scene.frames):
        raise HorizonOutOfRange(
            f"window [{at_frame}, {at_frame + horizon}] exceeds scene of {len(scene.frames)} frames"
        )


def motion_status_at(
    obj_id: str,
    scene: SceneSequence,
    at_frame: int,
    thresholds: LabelThresholds = DEFAULT_THRESHOLDS,
) -> MotionStatus:
    """Motion status of one object at one frame; needs no future frames."""
    if scene.frames[at_frame].get(obj_id) is None:
        raise UnknownObject(f"object '{obj_id}' not present at frame {at_frame}")
    speeds_all = [
        math.hypot(*frame.get(obj_id).velocity)
        for frame in scene.frames
        if frame.get(obj_id) is not None
    ]
    if all(s < thresholds.stop_speed for s in speeds_all):
        return MotionStatus.PARKED
    t_at = scene.frames[at_frame].timestamp
    window = [
        math.hypot(*scene.frames[g].get(obj_id).velocity)
        for g in range(at_frame + 1)
        if scene.frames[g].get(obj_id) is not None
        and t_at - scene.frames[g].timestamp < thresholds.trailing_window
    ]
    mean_speed = sum(window) / len(window)
    return MotionStatus.STOPPED if mean_speed < thresholds.stop_speed else MotionStatus.MOVING


def ego_motion_status(
    scene: SceneSequence,
    at_frame: int,
    thresholds: LabelThresholds = DEFAULT_THRESHOLDS,
) -> MotionStatus:
    """Ego motion status by the same speed rules as objects."""
    if all(frame.ego.speed < thresholds.stop_speed for frame in scene.frames):
        return MotionStatus.PARKED
    t_at = scene.frames[at_frame].timestamp
    window = [
        scene.frames[g].ego.speed
        for g in range(at_frame + 1)
        if t_at - scene.frames[g].timestamp < thresholds.trailing_window
    ]
    mean_speed = sum(window) / len(window)
    return MotionStatus.STOPPED if mean_speed < thresholds.stop_speed else MotionStatus.MOVING


def relative_position_of(position: tuple[float, float]) -> RelativePosition:
    """Bearing sector of an ego-frame position: 60-degree slices, front at +/-30."""
    bearing = math.degrees(math.atan2(position[1], position[0]))
    if abs(bearing) <= 30:
        return RelativePosition.FRONT
    if 30 < bearing <= 90:
        return RelativePosition.FRONT_LEFT
    if -90 <= bearing < -30:
        return RelativePosition.FRONT_RIGHT
    if 90 < bearing <= 150:
        return RelativePosition.LEFT
    if -150 <= bearing < -90:
        return RelativePosition.RIGHT
    return RelativePosition.REAR


def ego_turn(
    scene: SceneSequence,
    at_frame: int,
    horizon: int,
    thresholds: LabelThresholds = DEFAULT_THRESHOLDS,
) -> Turn:
    """Turn label for the ego from its own heading change over the horizon."""
    _check_window(scene, at_frame, horizon)
    net = math.degrees(
        _wrap_angle(scene.frames[at_frame + horizon].ego.heading - scene.frames[at_frame].ego.heading)
    )
    if net > thresholds.turn_angle_deg:
        return Turn.LEFT
    if net < -thresholds.turn_angle_deg:
        return Turn.RIGHT
    return Turn.STRAIGHT


def derive_labels(
    obj_id: str,
    scene: SceneSequence,
    at_frame: int,
    horizon: int,
    thresholds: LabelThresholds = DEFAULT_THRESHOLDS,
) -> DerivedLabels:
    """Derive the semantic labels that feed the question templates.

    Pure function of its arguments.  Rules:

    * motion_status: parked when the object's speed stays below
      ``stop_speed`` at every frame of the scene where it is observed;
      stopped when its mean speed over the trailing ``trailing_window``
      seconds is below ``stop_speed``; moving otherwise.
    * turn: net world-heading change from ``at_frame`` to the end of the
      horizon, counterclockwise-positive; beyond ``turn_angle_deg`` either
      way declares a turn.  Headings come from the velocity vector and fall
      back to straight when the object is too slow for a defined heading.
    * trend: ego distance at the horizon end versus now, with a
      ``trend_deadband`` meter dead-band.
    * merge: first crossing of the ego corridor boundary (full width
      ``corridor_width``, centered on the ego's forward axis, evaluated in
      each frame's own ego coordinates) during the horizon.
    * relative_position: 60-degree sectors of the bearing angle, front
      spanning +/-30 degrees.

    When the object is unobserved at intermediate or final frames, the
    horizon-dependent labels use its last observation inside the window.
    """
    _check_window(scene, at_frame, horizon)
    frame = scene.frames[at_frame]
    obj = frame.get(obj_id)
    if obj is None:
        raise UnknownObject(f"object '{obj_id}' not present at frame {at_frame}")

    motion = motion_status_at(obj_id, scene, at_frame, thresholds)

    window_obs = [
        (g, scene.frames[g].get(obj_id))
        for g in range(at_frame, at_frame + horizon + 1)
        if scene.frames[g].get(obj_id) is not None
    ]
    end_g, end_obj = window_obs[-1]

    turn = Turn.STRAIGHT
    h0 = _object_world_heading(frame, obj)
    h1 = _object_world_heading(scene.frames[end_g], end_obj)
    if h0 is not None and h1 is not None:
        net = math.degrees(_wrap_angle(h1 - h0))
        if net > thresholds.turn_angle_deg:
            turn = Turn.LEFT
        elif net < -thresholds.turn_angle_deg:
            turn = Turn.RIGHT

    d_now = math.hypot(*obj.position)
    d_end = math.hypot(*end_obj.position)
    if d_end < d_now - thresholds.trend_deadband:
        trend = Trend.APPROACH
    elif d_end > d_now + thresholds.trend_deadband:
        trend = Trend.STAY_AWAY
    else:
        trend = Trend.STATIC

    half_width = thresholds.corridor_width / 2.0
    merge = Merge.NONE
    inside_prev = abs(obj.position[1]) <= half_width
    for _, o in window_obs[1:]:
        inside = abs(o.position[1]) <= half_width
        if inside != inside_prev:
            merge = Merge.MERGE_IN if inside else Merge.MERGE_OUT
            break
        inside_prev = inside

    sector = relative_position_of(obj.position)

    return DerivedLabels(
        motion_status=motion,
        turn=turn,
        trend=trend,
        merge=merge,
        distance_to_ego=d_now,
        relative_position=sector,
    )


def future_trajectory(obj_id: str, scene: SceneSequence, at_frame: int, horizon: int) -> Trajectory:
    """Object BEV positions over the next `horizon` key frames.

    All points are expressed in the ego frame of `at_frame`, so a
    world-static object yields a constant sequence whatever the ego does.
    Raises TrackGap when the object is unobserved anywhere in the window.
    """
    _check_window(scene, at_frame, horizon)
    anchor = scene.frames[at_frame]
    if anchor.get(obj_id) is None:
        raise UnknownObject(f"object '{obj_id}' not present at frame {at_frame}")
    points: list[tuple[float, float]] = []
    for g in range(at_frame, at_frame + horizon + 1):
        obj = scene.frames[g].get(obj_id)
        if obj is None:
            raise TrackGap(f"object '{obj_id}' missing at frame {g}")
        if g == at_frame:
            continue
        p = _to_frame(anchor, world_position(scene.frames[g], obj))
        points.append((float(p[0]), float(p[1])))
    return Trajectory(points=tuple(points), stride=scene.frame_period)


def ego_future_trajectory(scene: SceneSequence, at_frame: int, horizon: int) -> Trajectory:
    """Ego positions over the next `horizon` key frames, in the ego frame of `at_frame`."""
    _check_window(scene, at_frame, horizon)
    anchor = scene.frames[at_frame]
    points = []
    for g in range(at_frame + 1, at_frame + horizon + 1):
        p = _to_frame(anchor, np.asarray(scene.frames[g].ego.position))
        points.append((float(p[0]), float(p[1])))
    return Trajectory(points=tuple(points), stride=scene.frame_period)
