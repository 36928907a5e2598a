"""Walkthrough: the question-template registry.

32 templates drive dataset generation: 12 perception, 14 prediction and
6 reasoning rows, each targeting the ego, one object, an object subset,
or the whole scenario.
"""

from collections import Counter

from driveqa.templates import Target, Task, list_templates, templates_for

registry = list_templates()
print(f"{len(registry)} templates")
print("per task:", dict(Counter(t.task.value for t in registry)))
print("per target:", dict(Counter(t.target.value for t in registry)))

print("\nreasoning block:")
for template in templates_for(task=Task.REASONING):
    print(f"  [{template.sub_task} / {template.target.value}] {template.question_text}")

print("\nall single-object prediction questions:")
for template in templates_for(task=Task.PREDICTION, target=Target.SINGLE_OBJECT):
    print(f"  [{template.sub_task}] {template.question_text}")
