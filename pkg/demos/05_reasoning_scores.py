"""Walkthrough: chain-alignment scoring, semantic and visually adapted.

Scores three hypothesis chains against one reference: a faithful answer, a
padded answer with a redundant step, and an answer whose geometry is off.
The visually-adapted mode swaps text similarity for geometric error
whenever both steps carry elements, so sloppy boxes and trajectories cost
points that wording alone would hide.
"""

from driveqa.chains import parse_chain
from driveqa.embeddings import Embedder, OfflineProvider, TextSimilarity
from driveqa.reasoning_score import MetricConfig, ScoreMode, score

sim = TextSimilarity(Embedder(OfflineProvider()))
cfg = MetricConfig()  # tau=15, beta=10

reference = parse_chain(
    "The referred object o1 is a vehicle at the front, located at "
    "<LOC>(412.00,308.00,577.00,420.00). Its future trajectory is "
    "<MOT>[(21.00,0.80),(19.50,0.80),(18.00,0.80)]. "
    "Therefore it poses a risk to the ego vehicle's normal driving."
)

candidates = {
    "faithful": (
        "The referred object o1 is a vehicle at the front, located at "
        "<LOC>(412.00,308.00,577.00,420.00). Its future trajectory is "
        "<MOT>[(21.00,0.80),(19.50,0.80),(18.00,0.80)]. "
        "Therefore it poses a risk to the ego vehicle's normal driving."
    ),
    "padded with an unrelated step": (
        "The referred object o1 is a vehicle at the front, located at "
        "<LOC>(412.00,308.00,577.00,420.00). The weather is clear today. "
        "Its future trajectory is <MOT>[(21.00,0.80),(19.50,0.80),(18.00,0.80)]. "
        "Therefore it poses a risk to the ego vehicle's normal driving."
    ),
    "geometry off by several meters": (
        "The referred object o1 is a vehicle at the front, located at "
        "<LOC>(412.00,308.00,577.00,420.00). Its future trajectory is "
        "<MOT>[(27.00,4.80),(25.50,4.80),(24.00,4.80)]. "
        "Therefore it poses a risk to the ego vehicle's normal driving."
    ),
}

print(f"{'candidate':<36}{'semantic':>10}{'visual':>10}")
for name, text in candidates.items():
    hyp = parse_chain(text)
    semantic = score(hyp, reference, cfg, sim, ScoreMode.SEMANTIC)
    visual = score(hyp, reference, cfg, sim, ScoreMode.VISUAL_ADAPTED)
    print(f"{name:<36}{semantic.total:>10.3f}{visual.total:>10.3f}")

print("\nbreakdown for the padded candidate:")
padded = parse_chain(candidates["padded with an unrelated step"])
result = score(padded, reference, cfg, sim, ScoreMode.SEMANTIC)
print(f"  per-step alignment into reference: {[round(a, 3) for a in result.alignment_h_to_r]}")
print(f"  ra={result.ra:.3f} (mean), rd={result.rd:.3f} (weakest step), ms={result.ms:.3f} (coverage)")
