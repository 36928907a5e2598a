"""Static question-template registry and the versioned chain wording.

The registry holds 32 rows: 12 perception, 14 prediction and 6 reasoning
templates, each tied to an answer-builder rule.  Question texts and every
sentence skeleton used to phrase reference chains live in the bundled
`data/templates.json`, so regenerating a dataset with the same wording
version reproduces it byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources


class Task(str, Enum):
    PERCEPTION = "perception"
    PREDICTION = "prediction"
    REASONING = "reasoning"


class Target(str, Enum):
    EGO = "ego"
    SINGLE_OBJECT = "single_object"
    MULTI_OBJECTS = "multi_objects"
    SCENARIO = "scenario"


@dataclass(frozen=True)
class TemplateSpec:
    task: Task
    sub_task: str
    target: Target
    question_text: str
    answer_builder: str

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.task.value, self.sub_task, self.target.value)


@lru_cache(maxsize=1)
def _wording() -> dict:
    with resources.files("driveqa.data").joinpath("templates.json").open("rb") as fh:
        return json.load(fh)


def wording_version() -> str:
    return _wording()["version"]


def phrases() -> dict:
    return _wording()["phrases"]


def skeleton(builder: str) -> list[str]:
    return _wording()["skeletons"][builder]


@lru_cache(maxsize=1)
def list_templates() -> tuple[TemplateSpec, ...]:
    """The full registry, in canonical generation order."""
    rows = tuple(
        TemplateSpec(
            task=Task(row["task"]),
            sub_task=row["sub_task"],
            target=Target(row["target"]),
            question_text=row["question"],
            answer_builder=row["answer_builder"],
        )
        for row in _wording()["templates"]
    )
    keys = [r.key for r in rows]
    if len(set(keys)) != len(keys):
        raise ValueError("duplicate (task, sub_task, target) rows in template registry")
    return rows


def templates_for(task: Task | None = None, sub_task: str | None = None,
                  target: Target | None = None) -> list[TemplateSpec]:
    return [
        t for t in list_templates()
        if (task is None or t.task == task)
        and (sub_task is None or t.sub_task == sub_task)
        and (target is None or t.target == target)
    ]


def get_template(task: Task, sub_task: str, target: Target) -> TemplateSpec:
    for t in list_templates():
        if t.key == (task.value, sub_task, target.value):
            return t
    raise KeyError(f"no template for {(task.value, sub_task, target.value)}")
