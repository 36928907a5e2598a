"""Batch evaluation and dataset splitting.

Evaluation joins a reference dataset with a prediction file by record id,
scores every record under both the semantic and the visually-adapted
metric, pools visual elements for geometric quality, runs the caption
baselines corpus-wide, and emits a self-describing report: the config echo
embedded in a report is enough to reproduce it (modulo the timing field).
A record whose prediction is missing or unparseable scores zero and is
flagged, never silently dropped.
"""

from __future__ import annotations

import json
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import __version__
from .captions import Corpus, bleu4, cider, rouge_l_corpus
from .chains import ElementKind, ReasoningChain, parse_chain, serialize
from .config import ToolkitConfig
from .embeddings import Embedder, TextSimilarity
from .errors import CorpusTooSmall, DriveQAError, SingleScene
from .generate import QARecord
from .geometry import evaluate_elements
from .reasoning_score import ScoreBreakdown, ScoreMode, score
from .templates import Task, Target

_METEOR_NOTE = "meteor is not computed: it depends on external synonym resources"


@dataclass(frozen=True)
class EvalRecordPair:
    record_id: str
    task: Task
    target: Target
    reference: ReasoningChain
    prediction: ReasoningChain | None
    error: str | None = None


def load_predictions(text: str) -> dict[str, str]:
    """Prediction JSONL: one {"record_id", "prediction"} object per line."""
    out: dict[str, str] = {}
    for i, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        doc = json.loads(line)
        record_id = doc["record_id"]
        if record_id in out:
            raise ValueError(f"line {i + 1}: duplicate prediction for record '{record_id}'")
        out[record_id] = doc.get("prediction", "")
    return out


def pair_records(
    references: list[QARecord],
    predictions: dict[str, str],
    lenient: bool = True,
) -> list[EvalRecordPair]:
    """Join predictions onto references; prediction ids must be a subset."""
    ref_ids = {r.record_id for r in references}
    stray = set(predictions) - ref_ids
    if stray:
        raise KeyError(f"predictions reference unknown record ids: {sorted(stray)[:5]}")
    pairs = []
    for record in references:
        raw = predictions.get(record.record_id)
        prediction = None
        error = None
        if raw is None:
            error = "missing prediction"
        else:
            try:
                prediction = parse_chain(raw, lenient=lenient)
            except DriveQAError as exc:
                error = f"unparseable prediction: {exc}"
        pairs.append(EvalRecordPair(
            record_id=record.record_id,
            task=record.task,
            target=record.target,
            reference=record.reference,
            prediction=prediction,
            error=error,
        ))
    return pairs


def _zero_breakdown(mode: ScoreMode, provider_id: str) -> ScoreBreakdown:
    return ScoreBreakdown(
        alignment_h_to_r=(), alignment_r_to_h=(), ra=0.0, rd=0.0, ms=0.0,
        total=0.0, mode=mode, provider_id=provider_id,
    )


def _breakdown_dict(b: ScoreBreakdown) -> dict:
    return {"ra": b.ra, "rd": b.rd, "ms": b.ms, "total": b.total}


def _record_elements(record_id: str, chain: ReasoningChain | None):
    """Elements of a chain keyed by record-scoped per-kind order."""
    out = []
    counters = {ElementKind.LOC: 0, ElementKind.MOT: 0}
    if chain is None:
        return out
    for step in chain.steps:
        for element in step.elements:
            out.append((f"{record_id}#{element.kind.value}{counters[element.kind]}", element))
            counters[element.kind] += 1
    return out


def _median_abs_coord(elements) -> float | None:
    values = []
    for _, element in elements:
        if element.kind == ElementKind.MOT:
            values.extend(abs(c) for point in element.payload for c in point)
        else:
            values.extend(abs(c) for c in element.payload)
    if not values:
        return None
    values.sort()
    return values[len(values) // 2]


def evaluate_pairs(
    pairs: list[EvalRecordPair],
    cfg: ToolkitConfig,
    embedder: Embedder,
) -> dict:
    """Score every pair and assemble the full report dictionary."""
    started = time.monotonic()
    sim = TextSimilarity(embedder)
    texts = []
    for pair in pairs:
        texts.extend(step.text for step in pair.reference.steps)
        if pair.prediction is not None:
            texts.extend(step.text for step in pair.prediction.steps)
    if texts:
        sim.prewarm(texts)
    provider_id = embedder.provider_id

    def score_pair(pair: EvalRecordPair) -> dict:
        flags = []
        if pair.prediction is None:
            flags.append("missing_prediction")
            semantic = _zero_breakdown(ScoreMode.SEMANTIC, provider_id)
            visual = _zero_breakdown(ScoreMode.VISUAL_ADAPTED, provider_id)
        else:
            semantic = score(pair.prediction, pair.reference, cfg.metric, sim,
                             ScoreMode.SEMANTIC, provider_id)
            visual = score(pair.prediction, pair.reference, cfg.metric, sim,
                           ScoreMode.VISUAL_ADAPTED, provider_id)
        return {
            "record_id": pair.record_id,
            "task": pair.task.value,
            "target": pair.target.value,
            "flags": flags,
            "error": pair.error,
            "semantic": _breakdown_dict(semantic),
            "visual_adapted": _breakdown_dict(visual),
        }

    workers = cfg.evaluate.workers or os.cpu_count() or 1
    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(score_pair, pairs))
    else:
        rows = [score_pair(pair) for pair in pairs]
    rows.sort(key=lambda row: row["record_id"])

    aggregates: dict = {}
    for row in rows:
        task_block = aggregates.setdefault(row["task"], {})
        for key in (row["target"], "_all"):
            cell = task_block.setdefault(key, {"count": 0, "adrscore": 0.0, "adrscore_s": 0.0})
            cell["count"] += 1
            cell["adrscore"] += row["semantic"]["total"]
            cell["adrscore_s"] += row["visual_adapted"]["total"]
    overall = {"count": 0, "adrscore": 0.0, "adrscore_s": 0.0}
    for task_block in aggregates.values():
        overall["count"] += task_block["_all"]["count"]
        overall["adrscore"] += task_block["_all"]["adrscore"]
        overall["adrscore_s"] += task_block["_all"]["adrscore_s"]
        for cell in task_block.values():
            cell["adrscore"] /= cell["count"]
            cell["adrscore_s"] /= cell["count"]
    if overall["count"]:
        overall["adrscore"] /= overall["count"]
        overall["adrscore_s"] /= overall["count"]
    aggregates["_overall"] = overall

    pred_elements = []
    ref_elements = []
    by_id = {pair.record_id: pair for pair in pairs}
    for row in rows:
        pair = by_id[row["record_id"]]
        pred_elements.extend(_record_elements(pair.record_id, pair.prediction))
        ref_elements.extend(_record_elements(pair.record_id, pair.reference))
    summary = evaluate_elements(pred_elements, ref_elements, cfg.evaluate.iou_threshold)
    warnings = []
    pred_scale = _median_abs_coord(pred_elements)
    ref_scale = _median_abs_coord(ref_elements)
    if pred_scale and ref_scale and max(pred_scale, ref_scale) > 100 * max(min(pred_scale, ref_scale), 1e-12):
        warnings.append(
            f"element coordinate scales differ by more than 100x (pred median {pred_scale:.3g}, "
            f"ref median {ref_scale:.3g}); units may be mixed"
        )

    corpus = Corpus.from_texts(
        (
            serialize(by_id[row["record_id"]].prediction) if by_id[row["record_id"]].prediction else "",
            [serialize(by_id[row["record_id"]].reference)],
        )
        for row in rows
    ) if rows else None
    captions: dict = {"meteor": None, "meteor_note": _METEOR_NOTE}
    if corpus is not None:
        captions["bleu4"] = bleu4(corpus)
        captions["rouge_l"] = rouge_l_corpus(corpus)
        try:
            captions["cider"] = cider(corpus)
        except CorpusTooSmall as exc:
            captions["cider"] = None
            captions["cider_note"] = str(exc)

    return {
        "toolkit_version": __version__,
        "provider_id": provider_id,
        "config": cfg.echo(),
        "records": rows,
        "aggregates": aggregates,
        "visual": {
            "box_accuracy": summary.box_accuracy,
            "mean_ade": summary.mean_ade,
            "matched": summary.matched,
            "missing": summary.missing,
            "surplus": summary.surplus,
            "length_mismatched": summary.length_mismatched,
        },
        "captions": captions,
        "errors": [
            {"record_id": row["record_id"], "message": row["error"]}
            for row in rows if row["error"]
        ],
        "warnings": warnings,
        "timing_seconds": time.monotonic() - started,
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


_CSV_COLUMNS = [
    "record_id", "task", "target", "flagged",
    "adrscore", "ra", "rd", "ms",
    "adrscore_s", "ra_s", "rd_s", "ms_s",
]


def report_to_csv(report: dict) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for row in report["records"]:
        lines.append(",".join(str(v) for v in [
            row["record_id"], row["task"], row["target"],
            int(bool(row["flags"])),
            row["semantic"]["total"], row["semantic"]["ra"], row["semantic"]["rd"], row["semantic"]["ms"],
            row["visual_adapted"]["total"], row["visual_adapted"]["ra"], row["visual_adapted"]["rd"],
            row["visual_adapted"]["ms"],
        ]))
    return "\n".join(lines) + "\n"


def split_records(records: list[QARecord], ratio: float, seed: int) -> tuple[list[QARecord], list[QARecord]]:
    """Split by scene, never by record, with disjoint scene sets.

    The train share of scenes is round(ratio * scenes), clamped so that a
    fractional ratio always leaves both sides non-empty.
    """
    if not 0.0 <= ratio <= 1.0:
        raise ValueError("ratio must lie in [0, 1]")
    scenes = list(dict.fromkeys(r.scene_id for r in records))
    if len(scenes) < 2 and 0.0 < ratio < 1.0:
        raise SingleScene("cannot split records spanning fewer than two scenes")
    shuffled = scenes[:]
    random.Random(seed).shuffle(shuffled)
    n_train = round(ratio * len(scenes))
    if 0.0 < ratio < 1.0:
        n_train = min(max(n_train, 1), len(scenes) - 1)
    train_scenes = set(shuffled[:n_train])
    train = [r for r in records if r.scene_id in train_scenes]
    val = [r for r in records if r.scene_id not in train_scenes]
    return train, val
