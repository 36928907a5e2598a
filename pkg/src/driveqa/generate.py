"""Dataset generation: fill the template registry from a scene database.

For every key frame, every applicable template is instantiated for every
eligible target: each object for single-object templates, seeded subsets
for multi-object ones, and one record per frame for ego and scenario
targets.  Prediction and reasoning templates need `horizon` future frames
and only consider objects observed across the whole window.  Output order
is (frame, registry order, target order), so runs are reproducible.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, replace
from importlib import resources

from . import scene as sc
from .chains import ReasoningChain, format_loc, format_mot, make_step, parse_chain, serialize
from .errors import EmptyScene, TemplateInputMismatch
from .templates import Task, Target, TemplateSpec, list_templates, phrases, skeleton, wording_version


@dataclass(frozen=True)
class GenerationConfig:
    """Tunables for generation; defaults follow the documented conventions."""

    horizon: int = 6
    multi_subset_cap: int | None = 8
    near_distance: float = 10.0
    risk_distance: float = 20.0
    thresholds: sc.LabelThresholds = sc.DEFAULT_THRESHOLDS

    def __post_init__(self):
        if self.horizon < 2:
            raise ValueError("horizon must be at least 2 key frames")
        if self.multi_subset_cap is not None and self.multi_subset_cap < 1:
            raise ValueError("multi_subset_cap must be positive or None")


@dataclass(frozen=True)
class QARecord:
    record_id: str
    scene_id: str
    frame_index: int
    task: Task
    sub_task: str
    target: Target
    question: str
    reference: ReasoningChain
    referred_object_ids: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "scene_id": self.scene_id,
            "frame_index": self.frame_index,
            "task": self.task.value,
            "sub_task": self.sub_task,
            "target": self.target.value,
            "question": self.question,
            "reference": serialize(self.reference),
            "referred_object_ids": list(self.referred_object_ids),
        }


def record_from_json_dict(doc: dict) -> QARecord:
    return QARecord(
        record_id=doc["record_id"],
        scene_id=doc["scene_id"],
        frame_index=int(doc["frame_index"]),
        task=Task(doc["task"]),
        sub_task=doc["sub_task"],
        target=Target(doc["target"]),
        question=doc["question"],
        reference=parse_chain(doc["reference"]),
        referred_object_ids=tuple(doc.get("referred_object_ids", [])),
    )


def records_to_jsonl(records) -> str:
    return "".join(
        json.dumps(r.to_json_dict(), ensure_ascii=False, separators=(",", ":")) + "\n"
        for r in records
    )


def records_from_jsonl(text: str) -> list[QARecord]:
    records = []
    for line in text.splitlines():
        if line.strip():
            records.append(record_from_json_dict(json.loads(line)))
    return records


@dataclass(frozen=True)
class MemberInfo:
    """Per-object inputs for multi-object and scenario chains."""

    obj_id: str
    category: sc.Category
    labels: sc.DerivedLabels | None
    status: sc.MotionStatus
    future_status: sc.MotionStatus | None = None
    bbox: sc.BBox | None = None
    traj: sc.Trajectory | None = None


@dataclass(frozen=True)
class ScenarioInfo:
    """Frame-level aggregates for scenario chains."""

    total_objects: int
    vehicles: int = 0
    parked: int = 0
    near: int = 0
    front: int = 0
    eligible_total: int = 0
    turn_right: int = 0
    approach: int = 0
    merging: int = 0
    nearest: MemberInfo | None = None
    any_risky: bool = False


@dataclass(frozen=True)
class EgoInfo:
    """Ego-side inputs for ego-target chains."""

    speed: float
    status: sc.MotionStatus
    future_status: sc.MotionStatus | None = None
    turn: sc.Turn = sc.Turn.STRAIGHT
    traj: sc.Trajectory | None = None
    any_risky: bool = False


@dataclass(frozen=True)
class ChainExtras:
    """Everything beyond DerivedLabels a builder may need."""

    obj_id: str = "o0"
    category: sc.Category = sc.Category.OTHER
    bbox: sc.BBox | None = None
    future_status: sc.MotionStatus | None = None
    members: tuple[MemberInfo, ...] = ()
    scenario: ScenarioInfo | None = None
    ego: EgoInfo | None = None
    near_distance: float = 10.0


_P = phrases


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _join(items: list[str]) -> str:
    if len(items) == 1:
        return items[0]
    return ", ".join(items[:-1]) + " and " + items[-1]


def _yes_no(flag: bool) -> str:
    return _P()["yes"] if flag else _P()["no"]


def _subset_phrase(ids: list[str]) -> str:
    p = _P()
    if not ids:
        return p["subset_none"]
    if len(ids) == 1:
        return p["subset_one"].format(list=ids[0])
    return p["subset_many"].format(list=_join(ids))


def _loc(bbox: sc.BBox | None) -> str:
    if bbox is None:
        raise TemplateInputMismatch("template requires a bounding box")
    return format_loc(bbox)


def _mot(traj: sc.Trajectory | None) -> str:
    if traj is None:
        raise TemplateInputMismatch("template requires a trajectory")
    return format_mot(traj.points)


def _need_labels(labels: sc.DerivedLabels | None) -> sc.DerivedLabels:
    if labels is None:
        raise TemplateInputMismatch("template requires derived labels")
    return labels


def _need_members(extras: ChainExtras) -> tuple[MemberInfo, ...]:
    if not extras.members:
        raise TemplateInputMismatch("multi-object template requires member info")
    return extras.members


def _need_scenario(extras: ChainExtras) -> ScenarioInfo:
    if extras.scenario is None:
        raise TemplateInputMismatch("scenario template requires scenario info")
    return extras.scenario


def _need_ego(extras: ChainExtras) -> EgoInfo:
    if extras.ego is None:
        raise TemplateInputMismatch("ego template requires ego info")
    return extras.ego


def _intent_key(labels: sc.DerivedLabels) -> str:
    if labels.merge != sc.Merge.NONE:
        return labels.merge.value
    if labels.turn != sc.Turn.STRAIGHT:
        return f"turn_{labels.turn.value}"
    if labels.trend == sc.Trend.APPROACH:
        return "approach"
    return "default"


def _control_key(labels: sc.DerivedLabels) -> str:
    if labels.motion_status == sc.MotionStatus.PARKED:
        return "parked"
    if labels.merge != sc.Merge.NONE:
        return "merge"
    if labels.turn != sc.Turn.STRAIGHT:
        return f"turn_{labels.turn.value}"
    if labels.trend == sc.Trend.APPROACH:
        return "approach"
    return "default"


def is_risky(labels: sc.DerivedLabels, near_distance: float = 10.0, risk_distance: float = 20.0) -> bool:
    """Deterministic risk rule: merging in, closing in nearby, or very close."""
    return (
        labels.merge == sc.Merge.MERGE_IN
        or (labels.trend == sc.Trend.APPROACH and labels.distance_to_ego < risk_distance)
        or labels.distance_to_ego < near_distance
    )


def _slots_single(labels: sc.DerivedLabels, traj, extras: ChainExtras) -> dict:
    p = _P()
    slots = {
        "obj": extras.obj_id,
        "category": extras.category.value,
        "status": p["motion_status"][labels.motion_status.value],
        "distance": _fmt(labels.distance_to_ego),
        "sector": p["relative_position"][labels.relative_position.value],
        "turn_phrase": p["turn"][labels.turn.value],
        "trend_phrase": p["trend"][labels.trend.value],
        "merge_phrase": p["merge"][labels.merge.value],
        "intent": p["intent"][_intent_key(labels)],
    }
    if extras.bbox is not None:
        slots["loc"] = format_loc(extras.bbox)
    if traj is not None:
        slots["mot"] = format_mot(traj.points)
    if extras.future_status is not None:
        slots["future_status"] = p["motion_status"][extras.future_status.value]
    return slots


def _fill(builder: str, slots: dict, variant: str | None = None) -> ReasoningChain:
    steps = []
    for line in skeleton(variant or builder):
        try:
            steps.append(make_step(line.format(**slots)))
        except KeyError as exc:
            raise TemplateInputMismatch(f"builder '{builder}' missing input {exc}") from exc
    return ReasoningChain(steps=tuple(steps))


def build_chain(
    obj_labels: sc.DerivedLabels | None,
    traj: sc.Trajectory | None,
    template: TemplateSpec,
    extras: ChainExtras | None = None,
) -> ReasoningChain:
    """Construct the reference chain for one record.

    Perception templates yield one step, prediction templates two
    (perceive, then predict) and reasoning templates three (perceive,
    predict, conclude).  Geometry slots embed canonical `<LOC>`/`<MOT>`
    tokens.  Raises TemplateInputMismatch when the inputs cannot satisfy
    the template, e.g. a trajectory-demanding template without `traj`.
    """
    extras = extras or ChainExtras()
    builder = template.answer_builder
    p = _P()

    if template.target == Target.SINGLE_OBJECT:
        labels = _need_labels(obj_labels)
        needs_traj = template.task != Task.PERCEPTION and builder != "moving_strategy_single"
        if needs_traj and traj is None:
            raise TemplateInputMismatch(f"builder '{builder}' requires a trajectory")
        slots = _slots_single(labels, traj, extras)
        if builder == "risk_single":
            risky = is_risky(labels, extras.near_distance)
            slots["risk_conclusion"] = p["risk_positive"] if risky else p["risk_negative"]
        elif builder == "control_single":
            action, reason = p["control_actions"][_control_key(labels)]
            slots.update(action=action, action_reason=reason)
        return _fill(builder, slots)

    if template.target == Target.EGO:
        ego = _need_ego(extras)
        slots = {
            "speed": _fmt(ego.speed),
            "status": p["motion_status"][ego.status.value],
            "turn_phrase": p["turn"][ego.turn.value],
            "intent": p["intent"][f"turn_{ego.turn.value}" if ego.turn != sc.Turn.STRAIGHT else "default"],
        }
        if ego.traj is not None:
            slots["mot"] = format_mot(ego.traj.points)
        if ego.future_status is not None:
            slots["future_status"] = p["motion_status"][ego.future_status.value]
        if builder == "control_ego":
            key = "risk" if ego.any_risky else (f"turn_{ego.turn.value}" if ego.turn != sc.Turn.STRAIGHT else "default")
            action, reason = p["ego_actions"][key]
            slots.update(action=action, action_reason=reason)
        if builder in ("motion_ego", "driving_strategy_ego", "control_ego") and ego.traj is None:
            raise TemplateInputMismatch(f"builder '{builder}' requires the ego trajectory")
        return _fill(builder, slots)

    if template.target == Target.MULTI_OBJECTS:
        members = _need_members(extras)
        slots: dict = {}
        if builder == "category_multi":
            vehicles = sum(1 for m in members if m.category == sc.Category.VEHICLE)
            slots.update(yes_no=_yes_no(vehicles > 0), count=str(vehicles))
        elif builder == "attribute_multi":
            hit = [m.obj_id for m in members if m.status == sc.MotionStatus.STOPPED]
            slots["subset_phrase"] = _subset_phrase(hit)
        elif builder == "distance_multi":
            best = min(members, key=lambda m: _need_labels(m.labels).distance_to_ego)
            slots.update(obj=best.obj_id, distance=_fmt(best.labels.distance_to_ego))
        elif builder == "position_multi":
            hit = [m.obj_id for m in members if _need_labels(m.labels).relative_position == sc.RelativePosition.LEFT]
            slots["subset_phrase"] = _subset_phrase(hit)
        elif builder == "moving_strategy_multi":
            clauses = [f"object {m.obj_id} is {p['motion_status'][m.status.value]}" for m in members]
            hit = [m.obj_id for m in members if m.future_status == sc.MotionStatus.STOPPED]
            slots.update(status_list=_join(clauses), subset_phrase=_subset_phrase(hit))
        elif builder == "turn_multi":
            sectors = [p["relative_position"][_need_labels(m.labels).relative_position.value] for m in members]
            hit = [m.obj_id for m in members if _need_labels(m.labels).turn == sc.Turn.LEFT]
            slots.update(sector_list=_join(sectors), subset_phrase=_subset_phrase(hit))
        elif builder == "trend_multi":
            distances = [_fmt(_need_labels(m.labels).distance_to_ego) for m in members]
            hit = [m.obj_id for m in members if _need_labels(m.labels).trend == sc.Trend.APPROACH]
            slots.update(distance_list=_join(distances), subset_phrase=_subset_phrase(hit))
        elif builder == "merge_multi":
            sectors = [p["relative_position"][_need_labels(m.labels).relative_position.value] for m in members]
            hit = [m.obj_id for m in members if _need_labels(m.labels).merge != sc.Merge.NONE]
            slots.update(sector_list=_join(sectors), subset_phrase=_subset_phrase(hit))
        else:
            raise TemplateInputMismatch(f"unknown multi-object builder '{builder}'")
        return _fill(builder, slots)

    info = _need_scenario(extras)
    if builder == "category_scenario":
        slots = {"count": str(info.vehicles)}
    elif builder == "attribute_scenario":
        slots = {"yes_no": _yes_no(info.parked > 0), "count": str(info.parked)}
    elif builder == "distance_scenario":
        slots = {"yes_no": _yes_no(info.near > 0), "count": str(info.near), "near": f"{extras.near_distance:g}"}
    elif builder == "position_scenario":
        slots = {"yes_no": _yes_no(info.front > 0), "count": str(info.front)}
    elif builder == "turn_scenario":
        slots = {"count_total": str(info.eligible_total), "yes_no": _yes_no(info.turn_right > 0), "count": str(info.turn_right)}
    elif builder == "trend_scenario":
        slots = {"count_total": str(info.eligible_total), "yes_no": _yes_no(info.approach > 0), "count": str(info.approach)}
    elif builder == "merge_scenario":
        slots = {"count_total": str(info.eligible_total), "yes_no": _yes_no(info.merging > 0), "count": str(info.merging)}
    elif builder == "risk_scenario":
        conclusion = _P()["scenario_risk_positive"] if info.any_risky else _P()["scenario_risk_negative"]
        if info.nearest is None:
            return _fill(builder, {"risk_conclusion": conclusion}, variant="risk_scenario_empty")
        m = info.nearest
        labels = _need_labels(m.labels)
        slots = {
            "count_total": str(info.eligible_total),
            "obj": m.obj_id,
            "distance": _fmt(labels.distance_to_ego),
            "loc": _loc(m.bbox),
            "trend_phrase": _P()["trend"][labels.trend.value],
            "merge_phrase": _P()["merge"][labels.merge.value],
            "mot": _mot(m.traj),
            "risk_conclusion": conclusion,
        }
    else:
        raise TemplateInputMismatch(f"unknown scenario builder '{builder}'")
    return _fill(builder, slots)


def _derive_seed(seed: int, scene_id: str, frame: int, builder: str) -> int:
    digest = hashlib.sha256(f"{seed}|{scene_id}|{frame}|{builder}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _subsets(n: int, cap: int | None, rng: random.Random) -> list[tuple[int, ...]]:
    """Index subsets of size >= 2 in (size, lexicographic) order.

    With a cap and more subsets available than the cap, subsets are drawn
    with the supplied seeded RNG and then reordered canonically.
    """
    total = (1 << n) - n - 1
    if n < 2 or total <= 0:
        return []
    if cap is None or total <= cap:
        all_subsets = []
        for mask in range(1 << n):
            members = tuple(i for i in range(n) if mask >> i & 1)
            if len(members) >= 2:
                all_subsets.append(members)
        all_subsets.sort(key=lambda s: (len(s), s))
        return all_subsets
    chosen: set[tuple[int, ...]] = set()
    while len(chosen) < cap:
        size = rng.randint(2, n)
        chosen.add(tuple(sorted(rng.sample(range(n), size))))
    return sorted(chosen, key=lambda s: (len(s), s))


def _record_id(scene_id: str, frame: int, template: TemplateSpec, suffix: str) -> str:
    sub = template.sub_task.lower().replace(" ", "_")
    return f"{scene_id}/f{frame:03d}/{template.task.value}.{sub}.{template.target.value}/{suffix}"


def generate(
    scene: sc.SceneSequence,
    tasks: set[Task] | None = None,
    seed: int = 0,
    cfg: GenerationConfig = GenerationConfig(),
) -> list[QARecord]:
    """Instantiate every applicable template for every eligible target.

    Deterministic for fixed (scene, tasks, seed, cfg): output is ordered by
    frame, then registry order, then object/subset order, and all sampling
    is keyed by (seed, scene, frame, builder).
    """
    tasks = tasks or {Task.PERCEPTION, Task.PREDICTION, Task.REASONING}
    thresholds = cfg.thresholds
    n_frames = len(scene.frames)
    records: list[QARecord] = []

    for f in range(n_frames):
        frame = scene.frames[f]
        horizon_ok = f + cfg.horizon <= n_frames - 1
        frame_objects = list(frame.objects)

        eligible: list[sc.ObjectEntry] = []
        labels_by_id: dict[str, sc.DerivedLabels] = {}
        members_by_id: dict[str, MemberInfo] = {}
        ego_info = None
        scenario_pred = None
        if horizon_ok:
            eligible = [
                o for o in frame_objects
                if scene.observed_throughout(o.object_id, f, f + cfg.horizon)
            ]
            for o in eligible:
                labels = sc.derive_labels(o.object_id, scene, f, cfg.horizon, thresholds)
                labels_by_id[o.object_id] = labels
                members_by_id[o.object_id] = MemberInfo(
                    obj_id=o.object_id,
                    category=o.category,
                    labels=labels,
                    status=labels.motion_status,
                    future_status=sc.motion_status_at(o.object_id, scene, f + cfg.horizon, thresholds),
                    bbox=o.bbox,
                    traj=sc.future_trajectory(o.object_id, scene, f, cfg.horizon),
                )
            any_risky = any(
                is_risky(labels_by_id[o.object_id], cfg.near_distance, cfg.risk_distance)
                for o in eligible
            )
            nearest = min(
                (members_by_id[o.object_id] for o in eligible),
                key=lambda m: m.labels.distance_to_ego,
                default=None,
            )
            scenario_pred = ScenarioInfo(
                total_objects=len(frame_objects),
                eligible_total=len(eligible),
                turn_right=sum(1 for o in eligible if labels_by_id[o.object_id].turn == sc.Turn.RIGHT),
                approach=sum(1 for o in eligible if labels_by_id[o.object_id].trend == sc.Trend.APPROACH),
                merging=sum(1 for o in eligible if labels_by_id[o.object_id].merge != sc.Merge.NONE),
                nearest=nearest,
                any_risky=any_risky,
            )
            ego_info = EgoInfo(
                speed=frame.ego.speed,
                status=sc.ego_motion_status(scene, f, thresholds),
                future_status=sc.ego_motion_status(scene, f + cfg.horizon, thresholds),
                turn=sc.ego_turn(scene, f, cfg.horizon, thresholds),
                traj=sc.ego_future_trajectory(scene, f, cfg.horizon),
                any_risky=any_risky,
            )

        statuses = {o.object_id: sc.motion_status_at(o.object_id, scene, f, thresholds) for o in frame_objects}
        distances = {o.object_id: math.hypot(*o.position) for o in frame_objects}
        sectors = {o.object_id: sc.relative_position_of(o.position) for o in frame_objects}
        scenario_perc = ScenarioInfo(
            total_objects=len(frame_objects),
            vehicles=sum(1 for o in frame_objects if o.category == sc.Category.VEHICLE),
            parked=sum(1 for o in frame_objects if statuses[o.object_id] == sc.MotionStatus.PARKED),
            near=sum(1 for o in frame_objects if distances[o.object_id] < cfg.near_distance),
            front=sum(1 for o in frame_objects if sectors[o.object_id] == sc.RelativePosition.FRONT),
        )

        for template in list_templates():
            if template.task not in tasks:
                continue
            is_perception = template.task == Task.PERCEPTION
            if not is_perception and not horizon_ok:
                continue

            if template.target == Target.SINGLE_OBJECT:
                pool = frame_objects if is_perception else eligible
                for o in pool:
                    if is_perception:
                        labels = _perception_labels(o, statuses, distances, sectors)
                        traj = None
                        extras = ChainExtras(
                            obj_id=o.object_id, category=o.category, bbox=o.bbox,
                            near_distance=cfg.near_distance,
                        )
                    else:
                        labels = labels_by_id[o.object_id]
                        member = members_by_id[o.object_id]
                        traj = member.traj
                        extras = ChainExtras(
                            obj_id=o.object_id, category=o.category, bbox=o.bbox,
                            future_status=member.future_status,
                            near_distance=cfg.near_distance,
                        )
                    records.append(QARecord(
                        record_id=_record_id(scene.scene_id, f, template, o.object_id),
                        scene_id=scene.scene_id,
                        frame_index=f,
                        task=template.task,
                        sub_task=template.sub_task,
                        target=template.target,
                        question=template.question_text,
                        reference=build_chain(labels, traj, template, extras),
                        referred_object_ids=(o.object_id,),
                    ))

            elif template.target == Target.MULTI_OBJECTS:
                pool = frame_objects if is_perception else eligible
                rng = random.Random(_derive_seed(seed, scene.scene_id, f, template.answer_builder))
                for subset in _subsets(len(pool), cfg.multi_subset_cap, rng):
                    members = []
                    for i in subset:
                        o = pool[i]
                        if is_perception:
                            members.append(MemberInfo(
                                obj_id=o.object_id, category=o.category,
                                labels=_perception_labels(o, statuses, distances, sectors),
                                status=statuses[o.object_id],
                            ))
                        else:
                            members.append(members_by_id[o.object_id])
                    extras = ChainExtras(members=tuple(members), near_distance=cfg.near_distance)
                    suffix = "+".join(m.obj_id for m in members)
                    records.append(QARecord(
                        record_id=_record_id(scene.scene_id, f, template, suffix),
                        scene_id=scene.scene_id,
                        frame_index=f,
                        task=template.task,
                        sub_task=template.sub_task,
                        target=template.target,
                        question=template.question_text,
                        reference=build_chain(None, None, template, extras),
                        referred_object_ids=tuple(m.obj_id for m in members),
                    ))

            elif template.target == Target.EGO:
                extras = ChainExtras(ego=ego_info, near_distance=cfg.near_distance)
                records.append(QARecord(
                    record_id=_record_id(scene.scene_id, f, template, "ego"),
                    scene_id=scene.scene_id,
                    frame_index=f,
                    task=template.task,
                    sub_task=template.sub_task,
                    target=template.target,
                    question=template.question_text,
                    reference=build_chain(None, None, template, extras),
                ))

            else:
                info = scenario_perc if is_perception else scenario_pred
                extras = ChainExtras(scenario=info, near_distance=cfg.near_distance)
                records.append(QARecord(
                    record_id=_record_id(scene.scene_id, f, template, "scene"),
                    scene_id=scene.scene_id,
                    frame_index=f,
                    task=template.task,
                    sub_task=template.sub_task,
                    target=template.target,
                    question=template.question_text,
                    reference=build_chain(None, None, template, extras),
                ))

    if not records:
        raise EmptyScene(
            f"scene '{scene.scene_id}' has no frames eligible for tasks {sorted(t.value for t in tasks)}"
        )
    return records


def _perception_labels(o: sc.ObjectEntry, statuses, distances, sectors) -> sc.DerivedLabels:
    """Labels for perception templates; horizon-dependent fields are inert."""
    return sc.DerivedLabels(
        motion_status=statuses[o.object_id],
        turn=sc.Turn.STRAIGHT,
        trend=sc.Trend.STATIC,
        merge=sc.Merge.NONE,
        distance_to_ego=distances[o.object_id],
        relative_position=sectors[o.object_id],
    )


def dataset_stats(records) -> dict:
    """Counts per (task, target) in the benchmark's breakdown layout."""
    table = {
        task.value: {target.value: 0 for target in Target}
        for task in Task
    }
    for r in records:
        table[r.task.value][r.target.value] += 1
    totals_by_task = {task: sum(row.values()) for task, row in table.items()}
    totals_by_target = {
        target.value: sum(table[task.value][target.value] for task in Task)
        for target in Target
    }
    return {
        "by_task_target": table,
        "task_totals": totals_by_task,
        "target_totals": totals_by_target,
        "total": sum(totals_by_task.values()),
        "wording_version": wording_version(),
    }


@dataclass(frozen=True)
class AugmentationRequest:
    """Offline payload for an external rewriting model; never sent anywhere."""

    system_prompt: str
    exemplars: tuple[tuple[str, str], ...]
    user_content: str

    def to_json_dict(self) -> dict:
        return {
            "system_prompt": self.system_prompt,
            "exemplars": [{"content": c, "response": r} for c, r in self.exemplars],
            "user_content": self.user_content,
        }


def _augmentation_bundle() -> dict:
    with resources.files("driveqa.data").joinpath("augmentation_prompt.json").open("rb") as fh:
        return json.load(fh)


def emit_augmentation_prompt(record: QARecord) -> AugmentationRequest:
    """Package the fixed system prompt, bundled exemplars and the raw pair."""
    bundle = _augmentation_bundle()
    return AugmentationRequest(
        system_prompt=bundle["system_prompt"],
        exemplars=tuple((e["content"], e["response"]) for e in bundle["examples"]),
        user_content=f"Question: {record.question}\nAnswer: {serialize(record.reference)}",
    )


def merge_augmented(records: list[QARecord], responses: dict[str, dict]) -> list[QARecord]:
    """Fold externally augmented pairs back into a dataset.

    `responses` maps record_id to {"question"?, "reference"?}; replacement
    references must parse under the strict grammar.  Unknown record ids are
    an error so silently dropped augmentations cannot pass unnoticed.
    """
    by_id = {r.record_id: r for r in records}
    unknown = set(responses) - set(by_id)
    if unknown:
        raise KeyError(f"responses reference unknown record ids: {sorted(unknown)[:5]}")
    out = []
    for record in records:
        response = responses.get(record.record_id)
        if response is None:
            out.append(record)
            continue
        question = response.get("question", record.question)
        if not isinstance(question, str) or not question.strip():
            raise ValueError(f"{record.record_id}: augmented question must be a non-empty string")
        reference = record.reference
        if "reference" in response:
            reference = parse_chain(response["reference"])
        out.append(replace(record, question=question, reference=reference))
    return out
