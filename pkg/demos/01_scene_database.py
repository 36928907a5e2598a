"""Walkthrough: the object-centric scene database.

Builds a tiny two-object scene inline, loads it through the strict
canonical parser, and derives the semantic labels and future trajectories
that the question templates consume.
"""

import json

from driveqa.scene import derive_labels, ego_future_trajectory, future_trajectory, load_scene

# A scene is a list of key frames.  Object geometry lives in each frame's
# ego coordinates (x forward, y left, meters); the ego entry is the world
# pose that stitches frames together.
doc = {
    "scene_id": "demo-scene",
    "frame_period": 0.5,
    "frames": [],
}
for f in range(6):
    t = f * 0.5
    doc["frames"].append({
        "timestamp": t,
        "ego": {"position": [3.0 * t, 0.0], "heading": 0.0, "speed": 3.0},
        "objects": [
            {  # a slower car ahead: ground speed 1 m/s, so the ego closes at 2 m/s
                "id": "car-7", "category": "vehicle",
                "bbox": [420.0, 310.0, 580.0, 420.0],
                "position": [25.0 - 2.0 * t, 0.8],
                "velocity": [1.0, 0.0],
                "attributes": ["sedan"],
            },
            {  # a parked van off to the right
                "id": "van-2", "category": "vehicle",
                "bbox": [40.0, 300.0, 180.0, 450.0],
                "position": [6.0 - 3.0 * t, -7.0],
                "velocity": [0.0, 0.0],
                "attributes": ["parked"],
            },
        ],
    })

scene = load_scene(json.dumps(doc))
print(f"loaded scene '{scene.scene_id}': {len(scene.frames)} frames, objects {scene.object_ids()}")

# Labels are derived per object, per frame, over a horizon of key frames.
for obj_id in scene.object_ids():
    labels = derive_labels(obj_id, scene, at_frame=0, horizon=4)
    print(f"\n{obj_id}:")
    print(f"  motion status     {labels.motion_status.value}")
    print(f"  turn / trend      {labels.turn.value} / {labels.trend.value}")
    print(f"  merge             {labels.merge.value}")
    print(f"  distance to ego   {labels.distance_to_ego:.2f} m")
    print(f"  relative position {labels.relative_position.value}")

# Future trajectories are expressed in the ego frame of the query frame.
traj = future_trajectory("car-7", scene, at_frame=0, horizon=4)
print(f"\ncar-7 future positions (ego frame of t=0): {[tuple(round(c, 2) for c in p) for p in traj.points]}")
ego = ego_future_trajectory(scene, at_frame=0, horizon=4)
print(f"ego future positions:                        {[tuple(round(c, 2) for c in p) for p in ego.points]}")
