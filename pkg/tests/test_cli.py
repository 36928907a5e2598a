"""Command-line surface: subcommands, exit codes, file outputs."""

import hashlib
import json

import pytest
from click.testing import CliRunner

from driveqa.cli import main
from fixtures import write_scene_dir


@pytest.fixture
def runner():
    return CliRunner()


def _generate(runner, tmp_path, out_name="ds.jsonl", seed=7, extra=()):
    scene_dir = tmp_path / "scenes"
    if not scene_dir.exists():
        write_scene_dir(tmp_path)
    out = tmp_path / out_name
    result = runner.invoke(main, [
        "generate", "--scene-dir", str(scene_dir), "--seed", str(seed),
        "--out", str(out), "--horizon", "3", *extra,
    ])
    assert result.exit_code == 0, result.output
    return out


class TestGenerateCommand:
    def test_two_runs_are_hash_equal(self, runner, tmp_path):
        first = _generate(runner, tmp_path, "a.jsonl")
        second = _generate(runner, tmp_path, "b.jsonl")
        assert hashlib.sha256(first.read_bytes()).hexdigest() == \
            hashlib.sha256(second.read_bytes()).hexdigest()

    def test_perception_only_mask(self, runner, tmp_path):
        scene_dir = write_scene_dir(tmp_path)
        out = tmp_path / "p.jsonl"
        result = runner.invoke(main, [
            "generate", "--scene-dir", str(scene_dir), "--tasks", "perception",
            "--out", str(out), "--horizon", "3",
        ])
        assert result.exit_code == 0
        stats = json.loads(result.stdout)
        assert stats["task_totals"]["prediction"] == 0
        assert stats["task_totals"]["reasoning"] == 0

    def test_schema_violation_exits_2(self, runner, tmp_path):
        scene_dir = tmp_path / "scenes"
        scene_dir.mkdir()
        (scene_dir / "bad.json").write_text(json.dumps({
            "scene_id": "x", "frame_period": 0.5, "frames": [],
        }))
        result = runner.invoke(main, [
            "generate", "--scene-dir", str(scene_dir), "--out", str(tmp_path / "o.jsonl"),
        ])
        assert result.exit_code == 2

    def test_bad_task_mask_exits_2(self, runner, tmp_path):
        scene_dir = write_scene_dir(tmp_path)
        result = runner.invoke(main, [
            "generate", "--scene-dir", str(scene_dir), "--tasks", "clairvoyance",
            "--out", str(tmp_path / "o.jsonl"),
        ])
        assert result.exit_code == 2


class TestSplitCommand:
    def test_split_files_disjoint(self, runner, tmp_path):
        dataset = _generate(runner, tmp_path)
        result = runner.invoke(main, [
            "split", "--dataset", str(dataset), "--ratio", "0.7", "--seed", "1",
            "--train-out", str(tmp_path / "train.jsonl"),
            "--val-out", str(tmp_path / "val.jsonl"),
        ])
        assert result.exit_code == 0, result.output
        train_scenes = {json.loads(l)["scene_id"] for l in (tmp_path / "train.jsonl").open()}
        val_scenes = {json.loads(l)["scene_id"] for l in (tmp_path / "val.jsonl").open()}
        assert train_scenes and val_scenes
        assert not (train_scenes & val_scenes)


class TestEvaluateCommand:
    def test_identity_evaluation(self, runner, tmp_path):
        dataset = _generate(runner, tmp_path)
        preds = tmp_path / "preds.jsonl"
        with preds.open("w") as fh:
            for line in dataset.open():
                doc = json.loads(line)
                fh.write(json.dumps({
                    "record_id": doc["record_id"], "prediction": doc["reference"],
                }) + "\n")
        report_path = tmp_path / "report.json"
        result = runner.invoke(main, [
            "evaluate", "--references", str(dataset), "--predictions", str(preds),
            "--out-json", str(report_path), "--out-csv", str(tmp_path / "report.csv"),
        ])
        assert result.exit_code == 0, result.output
        summary = json.loads(result.stdout)
        assert summary["adrscore"] == pytest.approx(1.0, abs=1e-9)
        assert summary["adrscore_s"] == pytest.approx(1.0, abs=1e-9)
        report = json.loads(report_path.read_text())
        assert report["toolkit_version"]
        assert report["config"]["tau"] == 15.0
        assert (tmp_path / "report.csv").read_text().count("\n") == len(report["records"]) + 1

    def test_empty_predictions_still_exit_zero(self, runner, tmp_path):
        dataset = _generate(runner, tmp_path)
        preds = tmp_path / "empty.jsonl"
        preds.write_text("")
        result = runner.invoke(main, [
            "evaluate", "--references", str(dataset), "--predictions", str(preds),
        ])
        assert result.exit_code == 0, result.output
        summary = json.loads(result.stdout)
        assert summary["adrscore"] == 0.0
        assert summary["flagged"] == summary["records"]

    def test_unreadable_predictions_exit_2(self, runner, tmp_path):
        dataset = _generate(runner, tmp_path)
        preds = tmp_path / "bad.jsonl"
        preds.write_text('{"record_id": "nonexistent", "prediction": "A."}\n')
        result = runner.invoke(main, [
            "evaluate", "--references", str(dataset), "--predictions", str(preds),
        ])
        assert result.exit_code == 2


class TestStatsCommand:
    def test_stats_match_generate_output(self, runner, tmp_path):
        scene_dir = write_scene_dir(tmp_path)
        out = tmp_path / "ds.jsonl"
        gen_result = runner.invoke(main, [
            "generate", "--scene-dir", str(scene_dir), "--out", str(out), "--horizon", "3",
        ])
        gen_stats = json.loads(gen_result.stdout)
        stats_result = runner.invoke(main, ["stats", "--dataset", str(out), "--as-json"])
        assert stats_result.exit_code == 0
        assert json.loads(stats_result.stdout) == gen_stats

    def test_empty_dataset_gives_zero_table(self, runner, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        result = runner.invoke(main, ["stats", "--dataset", str(empty)])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["total"] == 0

    def test_three_task_fixture_counts(self, runner, tmp_path):
        dataset = _generate(runner, tmp_path)
        lines = dataset.read_text().splitlines()
        chosen = []
        seen = {}
        for line in lines:
            doc = json.loads(line)
            if seen.get(doc["task"], 0) < 2:
                seen[doc["task"]] = seen.get(doc["task"], 0) + 1
                chosen.append(line)
        subset = tmp_path / "six.jsonl"
        subset.write_text("\n".join(chosen) + "\n")
        result = runner.invoke(main, ["stats", "--dataset", str(subset), "--as-json"])
        stats = json.loads(result.stdout)
        assert stats["task_totals"] == {"perception": 2, "prediction": 2, "reasoning": 2}


class TestCheckProvider:
    def test_dead_endpoint_exits_3(self, runner):
        result = runner.invoke(main, ["check-provider", "--endpoint", "http://127.0.0.1:1"])
        assert result.exit_code == 3


class TestAugmentCommands:
    def test_emit_and_merge_round_trip(self, runner, tmp_path):
        dataset = _generate(runner, tmp_path)
        payloads = tmp_path / "aug.jsonl"
        result = runner.invoke(main, [
            "augment-emit", "--dataset", str(dataset), "--out", str(payloads),
        ])
        assert result.exit_code == 0, result.output
        first_payload = json.loads(payloads.read_text().splitlines()[0])
        assert first_payload["system_prompt"]
        assert first_payload["exemplars"]

        first_record = json.loads(dataset.read_text().splitlines()[0])
        responses = tmp_path / "resp.jsonl"
        responses.write_text(json.dumps({
            "record_id": first_record["record_id"],
            "question": "A rewritten question?",
        }) + "\n")
        merged_path = tmp_path / "merged.jsonl"
        result = runner.invoke(main, [
            "augment-merge", "--dataset", str(dataset),
            "--responses", str(responses), "--out", str(merged_path),
        ])
        assert result.exit_code == 0, result.output
        merged_first = json.loads(merged_path.read_text().splitlines()[0])
        assert merged_first["question"] == "A rewritten question?"
