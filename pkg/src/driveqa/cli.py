"""Command-line surface: generate, split, evaluate, stats, check-provider.

Exit codes: 0 success, 2 input error, 3 embedding provider unavailable.
Evaluation exits 0 even when scores are low; it measures, it does not gate.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import ToolkitConfig, load_config, override
from .embeddings import DiskCache, Embedder, OfflineProvider, RemoteProvider
from .errors import DriveQAError, ProviderUnavailable
from .evalrun import (
    evaluate_pairs,
    load_predictions,
    pair_records,
    report_to_csv,
    report_to_json,
    split_records,
)
from .generate import (
    dataset_stats,
    emit_augmentation_prompt,
    generate,
    merge_augmented,
    records_from_jsonl,
    records_to_jsonl,
)
from .scene import load_scene_file
from .templates import Task

EXIT_INPUT_ERROR = 2
EXIT_PROVIDER_UNAVAILABLE = 3


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_dataset(path: str):
    try:
        return records_from_jsonl(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, KeyError, DriveQAError, ValueError) as exc:
        _fail(f"cannot read dataset '{path}': {exc}", EXIT_INPUT_ERROR)


def _resolve_config(config_path: str | None, **overrides) -> ToolkitConfig:
    try:
        cfg = load_config(config_path)
    except (OSError, ValueError) as exc:
        _fail(f"cannot read config '{config_path}': {exc}", EXIT_INPUT_ERROR)
    return override(cfg, **overrides)


def _make_embedder(cfg: ToolkitConfig) -> Embedder:
    if cfg.embedding.provider == "offline":
        provider = OfflineProvider()
    elif cfg.embedding.provider == "remote":
        provider = RemoteProvider(
            cfg.embedding.endpoint,
            batch_size=cfg.embedding.batch_size,
            max_inflight=cfg.embedding.max_inflight,
        )
    else:
        _fail(f"unknown provider '{cfg.embedding.provider}' (expected offline or remote)", EXIT_INPUT_ERROR)
    cache = DiskCache(cfg.embedding.cache_dir) if cfg.embedding.cache_dir else None
    return Embedder(provider, cache)


@click.group()
def main():
    """Driving QA dataset generation and chain-based reasoning evaluation."""


@main.command("generate")
@click.option("--scene-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--tasks", default="perception,prediction,reasoning", show_default=True,
              help="Comma-separated task mask.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--horizon", type=int, help="Override the prediction horizon (key frames).")
@click.option("--lenient", is_flag=True, help="Accept unknown keys in scene files.")
def cmd_generate(scene_dir, tasks, seed, out_path, config_path, horizon, lenient):
    """Generate a QA dataset from every scene file in a directory."""
    cfg = _resolve_config(config_path, horizon=horizon)
    try:
        task_mask = {Task(t.strip()) for t in tasks.split(",") if t.strip()}
    except ValueError as exc:
        _fail(f"bad task mask: {exc}", EXIT_INPUT_ERROR)
    scene_files = sorted(Path(scene_dir).glob("*.json"))
    if not scene_files:
        _fail(f"no scene files (*.json) in '{scene_dir}'", EXIT_INPUT_ERROR)
    records = []
    for scene_file in scene_files:
        try:
            scene = load_scene_file(scene_file, lenient=lenient)
            records.extend(generate(scene, task_mask, seed, cfg.generation))
        except DriveQAError as exc:
            _fail(f"{scene_file}: {exc}", EXIT_INPUT_ERROR)
    Path(out_path).write_text(records_to_jsonl(records), encoding="utf-8")
    stats = dataset_stats(records)
    click.echo(json.dumps(stats, indent=2, sort_keys=True))
    click.echo(f"wrote {stats['total']} records to {out_path}", err=True)


@main.command("split")
@click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--ratio", default=0.7, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--train-out", required=True, type=click.Path(dir_okay=False))
@click.option("--val-out", required=True, type=click.Path(dir_okay=False))
def cmd_split(dataset, ratio, seed, train_out, val_out):
    """Split a dataset by scene into train and validation files."""
    records = _load_dataset(dataset)
    try:
        train, val = split_records(records, ratio, seed)
    except DriveQAError as exc:
        _fail(str(exc), EXIT_INPUT_ERROR)
    Path(train_out).write_text(records_to_jsonl(train), encoding="utf-8")
    Path(val_out).write_text(records_to_jsonl(val), encoding="utf-8")
    train_scenes = len({r.scene_id for r in train})
    val_scenes = len({r.scene_id for r in val})
    click.echo(
        f"train: {len(train)} records / {train_scenes} scenes; "
        f"val: {len(val)} records / {val_scenes} scenes"
    )


@main.command("evaluate")
@click.option("--references", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--predictions", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out-json", type=click.Path(dir_okay=False))
@click.option("--out-csv", type=click.Path(dir_okay=False))
@click.option("--provider", type=click.Choice(["offline", "remote"]))
@click.option("--endpoint", help="Remote provider base URL.")
@click.option("--cache-dir", type=click.Path(file_okay=False))
@click.option("--tau", type=float)
@click.option("--beta", type=float)
@click.option("--iou-threshold", type=float)
def cmd_evaluate(references, predictions, config_path, out_json, out_csv,
                 provider, endpoint, cache_dir, tau, beta, iou_threshold):
    """Evaluate a prediction file against a reference dataset."""
    cfg = _resolve_config(
        config_path, provider=provider, endpoint=endpoint, cache_dir=cache_dir,
        tau=tau, beta=beta, iou_threshold=iou_threshold,
    )
    refs = _load_dataset(references)
    try:
        preds = load_predictions(Path(predictions).read_text(encoding="utf-8"))
        pairs = pair_records(refs, preds, lenient=cfg.evaluate.lenient_predictions)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        _fail(str(exc), EXIT_INPUT_ERROR)
    embedder = _make_embedder(cfg)
    try:
        report = evaluate_pairs(pairs, cfg, embedder)
    except ProviderUnavailable as exc:
        _fail(str(exc), EXIT_PROVIDER_UNAVAILABLE)
    payload = report_to_json(report)
    if out_json:
        Path(out_json).write_text(payload, encoding="utf-8")
    if out_csv:
        Path(out_csv).write_text(report_to_csv(report), encoding="utf-8")
    agg = report["aggregates"]["_overall"]
    click.echo(json.dumps({
        "records": agg["count"],
        "adrscore": agg["adrscore"],
        "adrscore_s": agg["adrscore_s"],
        "flagged": len(report["errors"]),
        "provider_id": report["provider_id"],
    }, indent=2, sort_keys=True))


@main.command("stats")
@click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--as-json", is_flag=True, help="Machine-readable output only.")
def cmd_stats(dataset, as_json):
    """Counts per (task, target) for a dataset file."""
    path = Path(dataset)
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        empty = dataset_stats([])
        click.echo(json.dumps(empty, indent=2, sort_keys=True))
        return
    records = _load_dataset(dataset)
    stats = dataset_stats(records)
    click.echo(json.dumps(stats, indent=2, sort_keys=True))
    if not as_json:
        table = stats["by_task_target"]
        targets = list(next(iter(table.values())))
        header = ["task".ljust(12)] + [t.rjust(14) for t in targets] + ["total".rjust(10)]
        click.echo("".join(header), err=True)
        for task, row in table.items():
            cells = [task.ljust(12)] + [str(row[t]).rjust(14) for t in targets]
            cells.append(str(stats["task_totals"][task]).rjust(10))
            click.echo("".join(cells), err=True)


@main.command("check-provider")
@click.option("--endpoint", required=True, help="Remote provider base URL.")
def cmd_check_provider(endpoint):
    """Ping the remote embedding service's health endpoint."""
    provider = RemoteProvider(endpoint)
    try:
        doc = provider.health()
    except ProviderUnavailable as exc:
        _fail(str(exc), EXIT_PROVIDER_UNAVAILABLE)
    click.echo(json.dumps(doc, indent=2, sort_keys=True))


@main.command("augment-emit")
@click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def cmd_augment_emit(dataset, out_path):
    """Write one augmentation prompt payload per record (offline; no network)."""
    records = _load_dataset(dataset)
    lines = []
    for record in records:
        request = emit_augmentation_prompt(record)
        doc = {"record_id": record.record_id, **request.to_json_dict()}
        lines.append(json.dumps(doc, ensure_ascii=False, separators=(",", ":")))
    Path(out_path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    click.echo(f"wrote {len(lines)} augmentation payloads to {out_path}", err=True)


@main.command("augment-merge")
@click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--responses", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def cmd_augment_merge(dataset, responses, out_path):
    """Fold augmented question/answer responses back into a dataset."""
    records = _load_dataset(dataset)
    try:
        docs = {}
        for line in Path(responses).read_text(encoding="utf-8").splitlines():
            if line.strip():
                doc = json.loads(line)
                docs[doc["record_id"]] = doc
        merged = merge_augmented(records, docs)
    except (json.JSONDecodeError, KeyError, ValueError, DriveQAError) as exc:
        _fail(f"cannot merge responses: {exc}", EXIT_INPUT_ERROR)
    Path(out_path).write_text(records_to_jsonl(merged), encoding="utf-8")
    click.echo(f"wrote {len(merged)} records to {out_path}", err=True)


if __name__ == "__main__":
    main()
