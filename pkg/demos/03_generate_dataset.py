"""Walkthrough: deterministic dataset generation and the scene-level split.

Generates QA records with reference reasoning chains from three synthetic
scenes, prints the task/target statistics table, and splits the dataset by
scene so train and validation never share a scene.
"""

import json

from driveqa.evalrun import split_records
from driveqa.generate import GenerationConfig, dataset_stats, generate, records_to_jsonl
from driveqa.scene import load_scene


def synthetic_scene(scene_id, n_frames=8):
    frames = []
    for f in range(n_frames):
        t = f * 0.5
        frames.append({
            "timestamp": t,
            "ego": {"position": [2.0 * t, 0.0], "heading": 0.0, "speed": 2.0},
            "objects": [
                {"id": "o1", "category": "vehicle", "bbox": [100.0, 120.0, 180.0, 200.0],
                 "position": [12.0 - 1.5 * t, 1.0], "velocity": [-1.5, 0.0], "attributes": []},
                {"id": "o2", "category": "cyclist", "bbox": [300.0, 100.0, 340.0, 220.0],
                 "position": [5.0, 9.0 - 3.0 * t], "velocity": [0.0, -3.0], "attributes": []},
            ],
        })
    return load_scene(json.dumps({"scene_id": scene_id, "frame_period": 0.5, "frames": frames}))


cfg = GenerationConfig(horizon=3)
records = []
for i in range(3):
    records.extend(generate(synthetic_scene(f"scene-{i:03d}"), tasks=None, seed=7, cfg=cfg))

stats = dataset_stats(records)
print(f"{stats['total']} records from 3 scenes (wording {stats['wording_version']})")
print(f"{'task':<12}" + "".join(f"{t:>15}" for t in stats["target_totals"]))
for task, row in stats["by_task_target"].items():
    print(f"{task:<12}" + "".join(f"{row[t]:>15}" for t in row))

print("\na generated record:")
sample = next(r for r in records if r.task.value == "reasoning" and r.target.value == "single_object")
print(json.dumps(sample.to_json_dict(), indent=2)[:700], "...")

# Same inputs, same bytes: regeneration is reproducible.
again = []
for i in range(3):
    again.extend(generate(synthetic_scene(f"scene-{i:03d}"), tasks=None, seed=7, cfg=cfg))
print("\nbyte-identical on regeneration:", records_to_jsonl(records) == records_to_jsonl(again))

# Splitting is by scene id, never by record.
train, val = split_records(records, ratio=0.7, seed=1)
print(f"split: train {len(train)} records / scenes {sorted({r.scene_id for r in train})}")
print(f"       val   {len(val)} records / scenes {sorted({r.scene_id for r in val})}")
