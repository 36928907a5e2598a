"""Toolkit configuration: one INI file holds every tunable.

Sections mirror the subsystems; CLI flags override file values.  A report
echoes the resolved configuration so any evaluation can be reproduced from
its own output.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace

from .generate import GenerationConfig
from .reasoning_score import MetricConfig
from .scene import LabelThresholds


@dataclass(frozen=True)
class EmbeddingConfig:
    provider: str = "offline"
    endpoint: str = "http://localhost:8080"
    cache_dir: str = ""
    batch_size: int = 64
    max_inflight: int = 4


@dataclass(frozen=True)
class EvaluateConfig:
    lenient_predictions: bool = True
    workers: int = 0
    iou_threshold: float = 0.5


@dataclass(frozen=True)
class ToolkitConfig:
    metric: MetricConfig = field(default_factory=MetricConfig)
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    evaluate: EvaluateConfig = field(default_factory=EvaluateConfig)

    def echo(self) -> dict:
        """Flat view of every tunable, embedded in reports."""
        return {
            "tau": self.metric.tau,
            "beta": self.metric.beta,
            "clamp_semantic": self.metric.clamp_semantic,
            "horizon": self.generation.horizon,
            "multi_subset_cap": self.generation.multi_subset_cap,
            "near_distance": self.generation.near_distance,
            "risk_distance": self.generation.risk_distance,
            "stop_speed": self.generation.thresholds.stop_speed,
            "turn_angle_deg": self.generation.thresholds.turn_angle_deg,
            "trend_deadband": self.generation.thresholds.trend_deadband,
            "corridor_width": self.generation.thresholds.corridor_width,
            "provider": self.embedding.provider,
            "endpoint": self.embedding.endpoint,
            "iou_threshold": self.evaluate.iou_threshold,
            "lenient_predictions": self.evaluate.lenient_predictions,
        }


def _get(parser: configparser.ConfigParser, section: str, option: str, conv, fallback):
    if not parser.has_option(section, option):
        return fallback
    raw = parser.get(section, option)
    if conv is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return conv(raw)


def load_config(path: str | None = None) -> ToolkitConfig:
    """Read the INI file (all sections optional) on top of the defaults."""
    base = ToolkitConfig()
    if path is None:
        return base
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)

    metric = MetricConfig(
        tau=_get(parser, "metric", "tau", float, base.metric.tau),
        beta=_get(parser, "metric", "beta", float, base.metric.beta),
        clamp_semantic=_get(parser, "metric", "clamp_semantic", bool, base.metric.clamp_semantic),
    )
    thresholds = LabelThresholds(
        stop_speed=_get(parser, "labels", "stop_speed", float, base.generation.thresholds.stop_speed),
        trailing_window=_get(parser, "labels", "trailing_window", float, base.generation.thresholds.trailing_window),
        turn_angle_deg=_get(parser, "labels", "turn_angle_deg", float, base.generation.thresholds.turn_angle_deg),
        trend_deadband=_get(parser, "labels", "trend_deadband", float, base.generation.thresholds.trend_deadband),
        corridor_width=_get(parser, "labels", "corridor_width", float, base.generation.thresholds.corridor_width),
    )
    cap_raw = _get(parser, "generation", "multi_subset_cap", str, None)
    if cap_raw is None:
        cap = base.generation.multi_subset_cap
    else:
        cap = None if cap_raw.strip().lower() in ("none", "off", "") else int(cap_raw)
    generation = GenerationConfig(
        horizon=_get(parser, "generation", "horizon", int, base.generation.horizon),
        multi_subset_cap=cap,
        near_distance=_get(parser, "generation", "near_distance", float, base.generation.near_distance),
        risk_distance=_get(parser, "generation", "risk_distance", float, base.generation.risk_distance),
        thresholds=thresholds,
    )
    embedding = EmbeddingConfig(
        provider=_get(parser, "embedding", "provider", str, base.embedding.provider),
        endpoint=_get(parser, "embedding", "endpoint", str, base.embedding.endpoint),
        cache_dir=_get(parser, "embedding", "cache_dir", str, base.embedding.cache_dir),
        batch_size=_get(parser, "embedding", "batch_size", int, base.embedding.batch_size),
        max_inflight=_get(parser, "embedding", "max_inflight", int, base.embedding.max_inflight),
    )
    evaluate = EvaluateConfig(
        lenient_predictions=_get(parser, "evaluate", "lenient_predictions", bool, base.evaluate.lenient_predictions),
        workers=_get(parser, "evaluate", "workers", int, base.evaluate.workers),
        iou_threshold=_get(parser, "evaluate", "iou_threshold", float, base.evaluate.iou_threshold),
    )
    return ToolkitConfig(metric=metric, generation=generation, embedding=embedding, evaluate=evaluate)


def override(cfg: ToolkitConfig, **kwargs) -> ToolkitConfig:
    """Apply CLI-style overrides onto a loaded config."""
    metric = cfg.metric
    embedding = cfg.embedding
    evaluate = cfg.evaluate
    generation = cfg.generation
    if "tau" in kwargs and kwargs["tau"] is not None:
        metric = replace(metric, tau=kwargs["tau"])
    if "beta" in kwargs and kwargs["beta"] is not None:
        metric = replace(metric, beta=kwargs["beta"])
    if "provider" in kwargs and kwargs["provider"] is not None:
        embedding = replace(embedding, provider=kwargs["provider"])
    if "endpoint" in kwargs and kwargs["endpoint"] is not None:
        embedding = replace(embedding, endpoint=kwargs["endpoint"])
    if "cache_dir" in kwargs and kwargs["cache_dir"] is not None:
        embedding = replace(embedding, cache_dir=kwargs["cache_dir"])
    if "iou_threshold" in kwargs and kwargs["iou_threshold"] is not None:
        evaluate = replace(evaluate, iou_threshold=kwargs["iou_threshold"])
    if "horizon" in kwargs and kwargs["horizon"] is not None:
        generation = replace(generation, horizon=kwargs["horizon"])
    return ToolkitConfig(metric=metric, generation=generation, embedding=embedding, evaluate=evaluate)
