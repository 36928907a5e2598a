"""Shared synthetic scene builders for the test suite."""

import json

from driveqa.scene import load_scene


def make_scene_doc(scene_id="scene-001", n_frames=5, frame_period=0.5):
    """Three-object fixture: approaching car, crossing pedestrian, parked car.

    The ego drives straight at 2 m/s.  Object positions are ego-frame, so
    o1 closes in along the x axis, o2 drifts toward the corridor from the
    left, and o3 sits still behind on the right.
    """
    frames = []
    for f in range(n_frames):
        t = f * frame_period
        frames.append({
            "timestamp": t,
            "ego": {"position": [2.0 * t, 0.0], "heading": 0.0, "speed": 2.0},
            "objects": [
                {"id": "o1", "category": "vehicle", "bbox": [100.0, 120.0, 180.0, 200.0],
                 "position": [10.0 - t, 1.0], "velocity": [-2.0, 0.0], "attributes": ["sedan"]},
                {"id": "o2", "category": "cyclist", "bbox": [300.0, 100.0, 340.0, 220.0],
                 "position": [5.0, 8.0 - 4.0 * t], "velocity": [0.0, -4.0], "attributes": []},
                {"id": "o3", "category": "vehicle", "bbox": [10.0, 130.0, 90.0, 190.0],
                 "position": [-4.0, -3.0], "velocity": [0.0, 0.0], "attributes": ["parked"]},
            ],
        })
    return {"scene_id": scene_id, "frame_period": frame_period,
            "frames": frames, "source_tag": "synthetic"}


def make_scene(scene_id="scene-001", n_frames=5, frame_period=0.5):
    return load_scene(json.dumps(make_scene_doc(scene_id, n_frames, frame_period)))


def make_empty_object_scene_doc(scene_id="scene-empty", n_frames=3):
    frames = [
        {
            "timestamp": f * 0.5,
            "ego": {"position": [0.0, 0.0], "heading": 0.0, "speed": 0.0},
            "objects": [],
        }
        for f in range(n_frames)
    ]
    return {"scene_id": scene_id, "frame_period": 0.5, "frames": frames}


def write_scene_dir(tmp_path, n_scenes=3, n_frames=8):
    """A directory of canonical scene files, one per scene id."""
    scene_dir = tmp_path / "scenes"
    scene_dir.mkdir()
    for i in range(n_scenes):
        doc = make_scene_doc(scene_id=f"scene-{i:03d}", n_frames=n_frames)
        (scene_dir / f"scene{i}.json").write_text(json.dumps(doc), encoding="utf-8")
    return scene_dir
