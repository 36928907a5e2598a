"""Chain-alignment metrics: worked cases, properties, brute-force equivalence."""

import random

import pytest

from driveqa.chains import ElementKind, ReasoningChain, Step, VisualElement
from driveqa.errors import EmptyChain
from driveqa.reasoning_score import (
    MetricConfig,
    ScoreMode,
    alignment_vector,
    score,
    step_similarity,
)
from oracles.brute_score import brute_force_score

CFG = MetricConfig()


def _chain(prefix, n):
    return ReasoningChain(steps=tuple(Step(text=f"{prefix}{i}") for i in range(n)))


def _table_sim(table):
    """Similarity stub keyed by the step texts 'h{i}' / 'r{j}'."""

    def sim(a, b):
        if a.startswith("h"):
            return table[int(a[1:])][int(b[1:])]
        return table[int(b[1:])][int(a[1:])]

    return sim


STUB = [[0.2, 0.9, 0.1], [0.4, 0.3, 0.8]]


class TestAlignmentVector:
    def test_identical_chains_align_to_one(self, offline_embedder):
        from driveqa.embeddings import TextSimilarity

        sim = TextSimilarity(offline_embedder)
        chain = ReasoningChain(steps=(Step(text="the car stops"), Step(text="the light is red")))
        alpha = alignment_vector(chain, chain, CFG, sim)
        assert alpha == pytest.approx([1.0, 1.0], abs=1e-9)

    def test_stub_table(self):
        alpha = alignment_vector(_chain("h", 2), _chain("r", 3), CFG, _table_sim(STUB))
        assert alpha == [0.9, 0.8]

    def test_single_step_hypothesis(self):
        alpha = alignment_vector(_chain("h", 1), _chain("r", 3), CFG, _table_sim(STUB))
        assert len(alpha) == 1


class TestWorkedScore:
    def test_stub_breakdown(self):
        result = score(_chain("h", 2), _chain("r", 3), CFG, _table_sim(STUB))
        assert result.ra == pytest.approx(0.85, abs=1e-12)
        assert result.rd == pytest.approx(0.80, abs=1e-12)
        assert result.ms == pytest.approx(0.40, abs=1e-12)
        assert result.total == pytest.approx(0.683333, abs=1e-6)

    def test_identity_is_one(self, offline_embedder):
        from driveqa.embeddings import TextSimilarity

        sim = TextSimilarity(offline_embedder)
        chain = ReasoningChain(steps=(Step(text="a vehicle ahead"), Step(text="it will stop")))
        result = score(chain, chain, CFG, sim)
        for value in (result.ra, result.rd, result.ms, result.total):
            assert value == pytest.approx(1.0, abs=1e-9)

    def test_empty_chain_raises(self):
        with pytest.raises((EmptyChain, ValueError)):
            score(ReasoningChain(steps=()), _chain("r", 2), CFG, _table_sim(STUB))

    def test_breakdown_invariants(self):
        result = score(_chain("h", 2), _chain("r", 3), CFG, _table_sim(STUB))
        assert result.ra == sum(result.alignment_h_to_r) / len(result.alignment_h_to_r)
        assert result.rd == min(result.alignment_h_to_r)
        assert result.ms == min(result.alignment_r_to_h)
        assert result.total == (result.ra + result.rd + result.ms) / 3.0


def _loc(x1, y1, x2, y2):
    return VisualElement(ElementKind.LOC, (float(x1), float(y1), float(x2), float(y2)))


def _mot(*points):
    return VisualElement(ElementKind.MOT, tuple((float(a), float(b)) for a, b in points))


def _no_sim(a, b):
    raise AssertionError("semantic similarity must not be consulted for geometric pairs")


BASE_BOX = _loc(0, 0, 10, 10)
# per-coordinate shifts chosen so the mean squared difference is exact
MSE_BOXES = {
    0.0: _loc(0, 0, 10, 10),
    5.0: _loc(1, 1, 13, 13),
    10.0: _loc(2, 4, 12, 14),
    15.0: _loc(1, 3, 15, 15),
    25.0: _loc(5, 5, 15, 15),
}


class TestVisualSimilarity:
    @pytest.mark.parametrize("mse,expected", [
        (0.0, 1.0), (5.0, 1.0), (10.0, 0.5), (15.0, 0.0), (25.0, 0.0),
    ])
    def test_normalization_constants(self, mse, expected):
        h = Step(text="box", elements=(BASE_BOX,))
        r = Step(text="box", elements=(MSE_BOXES[mse],))
        value = step_similarity(h, r, CFG, _no_sim, ScoreMode.VISUAL_ADAPTED)
        assert value == pytest.approx(expected, abs=1e-9)

    def test_one_sided_geometry_scores_zero(self):
        h = Step(text="there is a box", elements=(BASE_BOX,))
        r = Step(text="there is a box")
        assert step_similarity(h, r, CFG, _no_sim, ScoreMode.VISUAL_ADAPTED) == 0.0
        assert step_similarity(r, h, CFG, _no_sim, ScoreMode.VISUAL_ADAPTED) == 0.0

    def test_element_free_pair_falls_back_to_semantic(self):
        h = Step(text="plain text")
        r = Step(text="plain text")
        assert step_similarity(h, r, CFG, lambda a, b: 0.7, ScoreMode.VISUAL_ADAPTED) == 0.7

    def test_surplus_element_penalized(self):
        h = Step(text="two boxes", elements=(BASE_BOX, _loc(20, 20, 30, 30)))
        r = Step(text="one box", elements=(BASE_BOX,))
        # pair MSE 0 plus one surplus at tau: M = tau / 2 -> s = (tau - tau/2) / beta
        expected = (CFG.tau - CFG.tau / 2) / CFG.beta
        assert step_similarity(h, r, CFG, _no_sim, ScoreMode.VISUAL_ADAPTED) == pytest.approx(expected, abs=1e-12)

    def test_trajectory_pairs_compare_by_kind(self):
        h = Step(text="path", elements=(_mot((0, 0), (1, 0)),))
        r = Step(text="path", elements=(_mot((0, 0), (1, 0)),))
        assert step_similarity(h, r, CFG, _no_sim, ScoreMode.VISUAL_ADAPTED) == 1.0

    def test_semantic_clamp(self):
        h = Step(text="h")
        r = Step(text="r")
        assert step_similarity(h, r, CFG, lambda a, b: -0.4) == 0.0
        relaxed = MetricConfig(clamp_semantic=False)
        assert step_similarity(h, r, relaxed, lambda a, b: -0.4) == -0.4


class TestProperties:
    def test_bounds_on_random_tables(self):
        rng = random.Random(11)
        for _ in range(200):
            n, k = rng.randint(1, 5), rng.randint(1, 5)
            table = [[rng.uniform(-0.3, 1.2) for _ in range(k)] for _ in range(n)]
            result = score(_chain("h", n), _chain("r", k), CFG, _table_sim(table))
            for value in (result.ra, result.rd, result.ms, result.total,
                          *result.alignment_h_to_r, *result.alignment_r_to_h):
                assert 0.0 <= value <= 1.0

    def test_reference_permutation_invariance(self):
        rng = random.Random(5)
        table = [[rng.random() for _ in range(4)] for _ in range(3)]
        base = score(_chain("h", 3), _chain("r", 4), CFG, _table_sim(table))
        perm = [2, 0, 3, 1]

        def permuted_sim(a, b):
            if a.startswith("h"):
                return table[int(a[1:])][perm[int(b[1:])]]
            return table[int(b[1:])][perm[int(a[1:])]]

        shuffled = score(_chain("h", 3), _chain("r", 4), CFG, permuted_sim)
        assert sorted(shuffled.alignment_h_to_r) == sorted(base.alignment_h_to_r)
        assert shuffled.alignment_h_to_r == base.alignment_h_to_r
        assert (shuffled.ra, shuffled.rd, shuffled.ms, shuffled.total) == (
            base.ra, base.rd, base.ms, base.total)

    def test_hypothesis_permutation_invariance(self):
        rng = random.Random(6)
        table = [[rng.random() for _ in range(3)] for _ in range(4)]
        base = score(_chain("h", 4), _chain("r", 3), CFG, _table_sim(table))
        perm = [3, 1, 0, 2]

        def permuted_sim(a, b):
            if a.startswith("h"):
                return table[perm[int(a[1:])]][int(b[1:])]
            return table[perm[int(b[1:])]][int(a[1:])]

        shuffled = score(_chain("h", 4), _chain("r", 3), CFG, permuted_sim)
        assert sorted(shuffled.alignment_h_to_r) == sorted(base.alignment_h_to_r)
        assert shuffled.ra == pytest.approx(base.ra, abs=1e-12)
        assert (shuffled.rd, shuffled.ms) == (base.rd, base.ms)
        assert shuffled.total == pytest.approx(base.total, abs=1e-12)

    def test_low_similarity_step_lowers_rd_not_ms(self):
        table = [[0.9, 0.7], [0.6, 0.8]]
        base = score(_chain("h", 2), _chain("r", 2), CFG, _table_sim(table))
        extended = [[0.9, 0.7], [0.6, 0.8], [0.1, 0.2]]
        worse = score(_chain("h", 3), _chain("r", 2), CFG, _table_sim(extended))
        assert worse.rd < base.rd
        assert worse.ms >= base.ms

    def test_duplicating_hypothesis_step_changes_nothing(self):
        table = [[0.9, 0.7], [0.6, 0.8]]
        base = score(_chain("h", 2), _chain("r", 2), CFG, _table_sim(table))
        duplicated = [[0.9, 0.7], [0.6, 0.8], [0.6, 0.8]]
        dup = score(_chain("h", 3), _chain("r", 2), CFG, _table_sim(duplicated))
        assert dup.rd == base.rd
        assert dup.ms == base.ms

    def test_extra_orthogonal_step_with_offline_provider(self, offline_embedder):
        from driveqa.embeddings import TextSimilarity

        sim = TextSimilarity(offline_embedder)
        ref = ReasoningChain(steps=(
            Step(text="a vehicle approaches from the right"),
            Step(text="the ego vehicle should yield"),
        ))
        hyp = ReasoningChain(steps=ref.steps + (Step(text="zq xv qj wk"),))
        base = score(ref, ref, CFG, sim)
        extended = score(hyp, ref, CFG, sim)
        assert extended.rd < base.rd
        assert extended.ms == pytest.approx(base.ms, abs=1e-12)


class TestBruteForceEquivalence:
    def test_exact_match_on_1000_random_cases(self):
        rng = random.Random(123)
        for _ in range(1000):
            n, k = rng.randint(1, 5), rng.randint(1, 5)
            table = [[rng.random() for _ in range(k)] for _ in range(n)]
            mine = score(_chain("h", n), _chain("r", k), CFG, _table_sim(table))
            oracle = brute_force_score(n, k, lambda i, j: table[i][j])
            assert list(mine.alignment_h_to_r) == oracle["alignment_h_to_r"]
            assert list(mine.alignment_r_to_h) == oracle["alignment_r_to_h"]
            assert mine.ra == oracle["ra"]
            assert mine.rd == oracle["rd"]
            assert mine.ms == oracle["ms"]
            assert mine.total == oracle["total"]
