"""Chain-alignment reasoning metrics.

Given a hypothesis chain of N steps and a reference chain of K steps, each
hypothesis step is aligned to its most similar reference step; the
resulting alignment values drive three scores and their average:

    ra     mean alignment of hypothesis steps into the reference
    rd     the weakest hypothesis step (punishes redundant steps)
    ms     the least-covered reference step (punishes missing steps)
    total  (ra + rd + ms) / 3

In semantic mode step similarity is the cosine of sentence embeddings,
clamped to [0, 1].  In visually-adapted mode, step pairs that both carry
geometry are scored by (tau - MSE) / beta clamped to [0, 1] instead, a pair
where only one side has geometry scores 0, and element-free pairs fall back
to the semantic similarity.  Arithmetic is plain Python floats so results
are reproducible bit-for-bit against a brute-force reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .chains import ReasoningChain, Step
from .errors import EmptyChain
from .geometry import element_mse


class ScoreMode(str, Enum):
    SEMANTIC = "semantic"
    VISUAL_ADAPTED = "visual_adapted"


@dataclass(frozen=True)
class MetricConfig:
    """Normalization constants for the visual similarity and clamping policy."""

    tau: float = 15.0
    beta: float = 10.0
    clamp_semantic: bool = True

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")


@dataclass(frozen=True)
class ScoreBreakdown:
    alignment_h_to_r: tuple[float, ...]
    alignment_r_to_h: tuple[float, ...]
    ra: float
    rd: float
    ms: float
    total: float
    mode: ScoreMode
    provider_id: str = ""


SimilarityFn = Callable[[str, str], float]


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def _paired_element_mse(h: Step, r: Step, cfg: MetricConfig) -> float:
    """Aggregate element MSE for a step pair.

    Elements are paired per kind in order of appearance; every unpaired
    surplus element on either side contributes a penalty of tau, so
    hallucinated or missing geometry drags the similarity toward zero.
    """
    terms: list[float] = []
    for kind in ("loc", "mot"):
        hs = [e for e in h.elements if e.kind.value == kind]
        rs = [e for e in r.elements if e.kind.value == kind]
        for he, re_ in zip(hs, rs):
            terms.append(element_mse(he, re_, gap_penalty=cfg.tau).mse)
        terms.extend(cfg.tau for _ in range(abs(len(hs) - len(rs))))
    return sum(terms) / len(terms)


def step_similarity(h: Step, r: Step, cfg: MetricConfig, sim: SimilarityFn,
                    mode: ScoreMode = ScoreMode.SEMANTIC) -> float:
    """Similarity of one hypothesis step against one reference step, in [0, 1]."""
    if mode == ScoreMode.VISUAL_ADAPTED:
        h_has, r_has = bool(h.elements), bool(r.elements)
        if h_has and r_has:
            return _clamp01((cfg.tau - _paired_element_mse(h, r, cfg)) / cfg.beta)
        if h_has != r_has:
            return 0.0
    value = sim(h.text, r.text)
    return _clamp01(value) if cfg.clamp_semantic else value


def alignment_vector(hyp: ReasoningChain, ref: ReasoningChain, cfg: MetricConfig,
                     sim: SimilarityFn, mode: ScoreMode = ScoreMode.SEMANTIC) -> list[float]:
    """Per-hypothesis-step maximum similarity into the reference."""
    if not hyp.steps or not ref.steps:
        raise EmptyChain("both chains need at least one step")
    return [
        max(step_similarity(h, r, cfg, sim, mode) for r in ref.steps)
        for h in hyp.steps
    ]


def score(hyp: ReasoningChain, ref: ReasoningChain, cfg: MetricConfig, sim: SimilarityFn,
          mode: ScoreMode = ScoreMode.SEMANTIC, provider_id: str = "") -> ScoreBreakdown:
    """Full breakdown of the chain-alignment metrics for one record."""
    forward = alignment_vector(hyp, ref, cfg, sim, mode)
    backward = [
        max(step_similarity(h, r, cfg, sim, mode) for h in hyp.steps)
        for r in ref.steps
    ]
    ra = sum(forward) / len(forward)
    rd = min(forward)
    ms = min(backward)
    return ScoreBreakdown(
        alignment_h_to_r=tuple(forward),
        alignment_r_to_h=tuple(backward),
        ra=ra,
        rd=rd,
        ms=ms,
        total=(ra + rd + ms) / 3.0,
        mode=mode,
        provider_id=provider_id,
    )
