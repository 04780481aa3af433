"""Tests for ground-truth labelling and edge scorer / GCN training."""

import numpy as np
import pytest

from kfmot.association import build_training_set, label_detections, loss_and_gradients, train_edge_scorer
from kfmot.association.scorer import edge_probabilities
from kfmot.association.training import (
    LevelSample,
    TrainingSet,
    combine_training_sets,
    edge_statistics,
    tracklet_label,
    training_accuracy,
)
from kfmot.core.exceptions import TrainingError
from kfmot.models.association import (
    EdgeScorer,
    FocalLossConfig,
    LevelGraph,
    TrackerConfig,
    Tracklet,
    TrackletMember,
    TrainingSchedule,
)
from kfmot.models.fusion import FusionConfig, FusionMode, GcnLayer
from kfmot.models.segmentation import SegmentationStrategy

BOX_A = (0.0, 0.0, 40.0, 100.0)
BOX_B = (300.0, 0.0, 40.0, 100.0)


def direct_set(levels_data, fusion=None) -> TrainingSet:
    """Training set from explicit (level, X, y) triples, bypassing graph building."""
    samples = [LevelSample(LevelGraph(level=level, window=4), np.asarray(X, dtype=float), np.asarray(y, dtype=int))
               for level, X, y in levels_data]
    return TrainingSet(samples=samples, fusion=fusion or FusionConfig(mode=FusionMode.NONE), frames={})


def separable_set() -> TrainingSet:
    X = [[1.0, 0.25, 0.0, 1.0]] * 3 + [[-1.0, 0.25, 0.0, 1.0]] * 3
    return direct_set([(1, X, [1, 1, 1, 0, 0, 0])])


def close_enough(analytic, numeric):
    return np.all(np.abs(analytic - numeric) <= 1e-4 * np.maximum(np.abs(analytic), np.abs(numeric)) + 1e-8)


@pytest.fixture
def two_object_scene(rng, make_frames, make_tracks):
    """Two stationary objects over 8 frames with noisy features, plus their ground truth."""
    base = {1: rng.normal(size=3), 2: rng.normal(size=3)}
    frames = {
        t: [(BOX_A, base[1] + 0.3 * rng.normal(size=3)), (BOX_B, base[2] + 0.3 * rng.normal(size=3))]
        for t in range(1, 9)
    }
    seq = make_frames(frames, length=8)
    gt = make_tracks({1: [(t, BOX_A) for t in range(1, 9)], 2: [(t, BOX_B) for t in range(1, 9)]})
    return seq, gt


class TestLabels:
    def test_detections_take_overlapping_identity(self, make_frames, make_tracks):
        seq = make_frames({1: [(BOX_A, (1, 0)), (BOX_B, (0, 1)), ((900, 0, 40, 100), (1, 1))]}, length=1)
        gt = make_tracks({5: [(1, (2.0, 0.0, 40.0, 100.0))], 8: [(1, BOX_B)]})
        assert label_detections(seq, gt) == {(1, 0): 5, (1, 1): 8, (1, 2): -1}

    def test_low_overlap_stays_unlabelled(self, make_frames, make_tracks):
        seq = make_frames({1: [(BOX_A, (1, 0))]}, length=1)
        gt = make_tracks({3: [(1, (30.0, 0.0, 40.0, 100.0))]})
        assert label_detections(seq, gt) == {(1, 0): -1}

    def test_tracklet_majority_vote(self):
        members = [TrackletMember(frame, 0, BOX_A, 1.0) for frame in range(1, 6)]
        t = Tracklet(track_id=0, members=members, feature=np.zeros(2))
        assert tracklet_label(t, {(1, 0): 4, (2, 0): 4, (3, 0): 2, (4, 0): -1, (5, 0): -1}) == 4
        assert tracklet_label(t, {(1, 0): 4, (2, 0): 2}) == 2
        assert tracklet_label(t, {}) == -1


class TestBuildTrainingSet:
    def test_true_links_are_positive(self, two_object_scene):
        seq, gt = two_object_scene
        ts = build_training_set(seq, gt, SegmentationStrategy.from_lengths((2, 2, 2, 2)),
                                TrackerConfig(levels=2), FusionConfig(mode=FusionMode.NONE))
        assert len(ts.samples) == 2
        level_one = ts.samples[0]
        assert len(level_one.graph.nodes) == 8
        nodes = level_one.graph.nodes
        for edge, label in zip(level_one.graph.edges, level_one.labels):
            same = nodes[edge.source].members[0].box == nodes[edge.target].members[0].box
            assert label == int(same)
        assert ts.num_positive == 6
        # forced merges join each identity into one tracklet before level 2
        assert len(ts.samples[1].graph.nodes) == 2
        assert len(ts.samples[1].labels) == 0


class TestTraining:
    def test_zero_iterations_keep_initial_weights(self):
        scorer = EdgeScorer.prior(1)
        result = train_edge_scorer(separable_set(), scorer, FocalLossConfig(), TrainingSchedule(iterations=0))
        np.testing.assert_allclose(result.scorer.raw_weights(), scorer.raw_weights(), atol=1e-12)
        assert result.losses == []

    def test_separable_edges_converge(self):
        result = train_edge_scorer(separable_set(), EdgeScorer.zeros(1), FocalLossConfig(),
                                   TrainingSchedule(iterations=2000, learning_rate=1.0))
        assert result.losses[-1] < 1e-3
        assert result.scorer.weights[0, 0] > 0
        assert training_accuracy(separable_set(), result.scorer) == 1.0

    def test_small_steps_do_not_raise_loss(self):
        result = train_edge_scorer(separable_set(), EdgeScorer.zeros(1), FocalLossConfig(),
                                   TrainingSchedule(iterations=300, learning_rate=1e-2))
        assert all(b <= a * 1.01 for a, b in zip(result.losses, result.losses[1:]))

    def test_input_scorer_is_not_modified(self):
        scorer = EdgeScorer.zeros(1)
        train_edge_scorer(separable_set(), scorer, FocalLossConfig(), TrainingSchedule(iterations=10))
        np.testing.assert_array_equal(scorer.weights, np.zeros((1, 5)))

    def test_upper_levels_wait_for_unfreezing(self, rng):
        X = rng.normal(size=(6, 4))
        ts = direct_set([(1, X, [1, 0, 1, 0, 1, 0]), (2, X, [0, 1, 0, 1, 0, 1])])
        schedule = TrainingSchedule(iterations=5, learning_rate=0.1, unfreeze_every=5)
        result = train_edge_scorer(ts, EdgeScorer.zeros(2), FocalLossConfig(), schedule)
        assert np.any(result.scorer.weights[0] != 0)
        np.testing.assert_array_equal(result.scorer.weights[1], np.zeros(5))
        assert result.scorer.frozen == [False, False]

        longer = train_edge_scorer(ts, EdgeScorer.zeros(2), FocalLossConfig(),
                                   schedule.model_copy(update={"iterations": 6}))
        assert np.any(longer.scorer.weights[1] != 0)

    def test_empty_label_set(self):
        with pytest.raises(TrainingError):
            train_edge_scorer(direct_set([(1, np.zeros((0, 4)), [])]), EdgeScorer.zeros(1), FocalLossConfig(),
                              TrainingSchedule(iterations=1))

    def test_deterministic(self, two_object_scene):
        seq, gt = two_object_scene
        fusion = FusionConfig(mode=FusionMode.GCN, m=1)
        runs = []
        for _ in range(2):
            ts = build_training_set(seq, gt, SegmentationStrategy.from_lengths((2, 2, 2, 2)),
                                    TrackerConfig(levels=2), fusion, GcnLayer.identity(3))
            runs.append(train_edge_scorer(ts, EdgeScorer.zeros(2), FocalLossConfig(),
                                          TrainingSchedule(iterations=50, learning_rate=0.1), GcnLayer.identity(3)))
        np.testing.assert_array_equal(runs[0].scorer.weights, runs[1].scorer.weights)
        np.testing.assert_array_equal(runs[0].layer.W, runs[1].layer.W)
        assert runs[0].losses == runs[1].losses


class TestStandardization:
    def test_reparametrisation_keeps_scores(self, rng):
        X = rng.normal(size=(7, 4)) * [1.0, 30.0, 0.1, 2.0]
        scorer = EdgeScorer(weights=rng.normal(size=(2, 5)))
        moved = scorer.with_standardization(rng.normal(size=4), rng.uniform(0.2, 5.0, size=4))
        for level in (1, 2):
            np.testing.assert_allclose(edge_probabilities(X, level, moved), edge_probabilities(X, level, scorer))
        np.testing.assert_allclose(moved.raw_weights(), scorer.raw_weights())

    def test_statistics_cover_labelled_edges(self):
        ts = direct_set([(1, [[0.0, 1.0, 5.0, 0.0], [2.0, 1.0, 7.0, 0.0]], [1, 0]), (2, np.zeros((0, 4)), [])])
        mean, std = edge_statistics(ts)
        np.testing.assert_array_equal(mean, [1.0, 1.0, 6.0, 0.0])
        np.testing.assert_array_equal(std, [1.0, 1.0, 1.0, 1.0])

    def test_scaled_feature_trains_to_same_decisions(self, rng):
        X = rng.normal(size=(40, 4))
        y = (X[:, 0] - 0.8 * X[:, 1] + 0.3 * rng.normal(size=40) > 0).astype(int)
        scaled = X * [1.0, 100.0, 1.0, 1.0]
        schedule = TrainingSchedule(iterations=300, learning_rate=0.5)
        plain = train_edge_scorer(direct_set([(1, X, y)]), EdgeScorer.zeros(1), FocalLossConfig(), schedule)
        wide = train_edge_scorer(direct_set([(1, scaled, y)]), EdgeScorer.zeros(1), FocalLossConfig(), schedule)
        np.testing.assert_allclose(plain.losses, wide.losses, rtol=1e-9)
        np.testing.assert_allclose(edge_probabilities(scaled, 1, wide.scorer), edge_probabilities(X, 1, plain.scorer),
                                   atol=1e-9)
        assert training_accuracy(direct_set([(1, X, y)]), plain.scorer) > 0.8

    def test_unscaled_gap_is_not_ignored(self, rng):
        # only the large-valued column separates the classes
        X = np.column_stack([np.zeros(30), rng.uniform(0.0, 200.0, size=30), np.zeros(30), np.zeros(30)])
        y = (X[:, 1] < 100.0).astype(int)
        result = train_edge_scorer(direct_set([(1, X, y)]), EdgeScorer.zeros(1), FocalLossConfig(),
                                   TrainingSchedule(iterations=500, learning_rate=0.5))
        assert training_accuracy(direct_set([(1, X, y)]), result.scorer) >= 0.8
        assert result.scorer.raw_weights()[0, 1] < 0


class TestCombinedSets:
    def test_levels_are_pooled(self):
        first = direct_set([(1, [[1.0, 0.0, 0.0, 0.0]], [1]), (2, [[0.0, 1.0, 0.0, 0.0]], [0])])
        second = direct_set([(1, [[2.0, 0.0, 0.0, 0.0], [3.0, 0.0, 0.0, 0.0]], [0, 1])])
        combined = combine_training_sets([first, second])
        assert [s.graph.level for s in combined.samples] == [1, 2]
        np.testing.assert_array_equal(combined.samples[0].features[:, 0], [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(combined.samples[0].labels, [1, 0, 1])
        assert combined.num_edges == 4 and combined.num_positive == 2

    def test_nothing_to_combine(self):
        with pytest.raises(TrainingError):
            combine_training_sets([])

    def test_pooled_set_cannot_train_gcn_weights(self, two_object_scene):
        seq, gt = two_object_scene
        fusion = FusionConfig(mode=FusionMode.GCN, m=1)
        ts = build_training_set(seq, gt, SegmentationStrategy.from_lengths((2, 2, 2, 2)),
                                TrackerConfig(levels=2), fusion, GcnLayer.identity(3))
        combined = combine_training_sets([ts, ts])
        assert combined.num_edges == 2 * ts.num_edges
        with pytest.raises(TrainingError):
            train_edge_scorer(combined, EdgeScorer.zeros(2), FocalLossConfig(), TrainingSchedule(iterations=1),
                              GcnLayer.identity(3))
        result = train_edge_scorer(combined, EdgeScorer.zeros(2), FocalLossConfig(), TrainingSchedule(iterations=5))
        assert result.layer is None


class TestGradients:
    def test_scorer_gradient_matches_central_differences(self, rng):
        step = 1e-5
        cfg = FocalLossConfig()
        for _ in range(100):
            ts = direct_set([
                (1, rng.normal(size=(5, 4)), rng.integers(0, 2, size=5)),
                (2, rng.normal(size=(3, 4)), rng.integers(0, 2, size=3)),
            ])
            scorer = EdgeScorer(weights=rng.normal(scale=0.5, size=(2, 5)), feature_mean=rng.normal(size=4),
                                feature_std=rng.uniform(0.5, 2.0, size=4))
            _, analytic, grad_W = loss_and_gradients(ts, scorer, cfg, depth=2)
            assert grad_W is None

            numeric = np.zeros_like(scorer.weights)
            for index in np.ndindex(scorer.weights.shape):
                plus, minus = scorer.copy(), scorer.copy()
                plus.weights[index] += step
                minus.weights[index] -= step
                numeric[index] = (loss_and_gradients(ts, plus, cfg, 2)[0]
                                  - loss_and_gradients(ts, minus, cfg, 2)[0]) / (2 * step)
            assert close_enough(analytic, numeric)

    def test_depth_limits_levels(self, rng):
        ts = direct_set([(1, rng.normal(size=(4, 4)), [1, 0, 1, 0]), (2, rng.normal(size=(4, 4)), [0, 1, 1, 0])])
        loss_one, grad_one, _ = loss_and_gradients(ts, EdgeScorer.zeros(2), FocalLossConfig(), depth=1)
        loss_two, _, _ = loss_and_gradients(ts, EdgeScorer.zeros(2), FocalLossConfig(), depth=2)
        np.testing.assert_array_equal(grad_one[1], np.zeros(5))
        assert loss_two == pytest.approx(2 * loss_one)

    def test_gcn_gradient_matches_central_differences(self, two_object_scene, rng):
        seq, gt = two_object_scene
        step = 1e-5
        fusion = FusionConfig(mode=FusionMode.GCN, m=1, a=0.4)
        ts = build_training_set(seq, gt, SegmentationStrategy.from_lengths((2, 2, 2, 2)),
                                TrackerConfig(levels=2), fusion, GcnLayer.identity(3))
        cfg = FocalLossConfig()
        for _ in range(10):
            layer = GcnLayer(W=np.eye(3) + rng.normal(scale=0.3, size=(3, 3)))
            scorer = EdgeScorer(weights=rng.normal(scale=0.5, size=(2, 5)), feature_mean=rng.normal(size=4),
                                feature_std=rng.uniform(0.5, 2.0, size=4))
            _, grad_scorer, grad_W = loss_and_gradients(ts, scorer, cfg, 2, layer)

            numeric_W = np.zeros_like(layer.W)
            for index in np.ndindex(layer.W.shape):
                bump = np.zeros_like(layer.W)
                bump[index] = step
                upper = loss_and_gradients(ts, scorer, cfg, 2, layer.with_weights(layer.W + bump))[0]
                lower = loss_and_gradients(ts, scorer, cfg, 2, layer.with_weights(layer.W - bump))[0]
                numeric_W[index] = (upper - lower) / (2 * step)
            assert close_enough(grad_W, numeric_W)

            numeric_app = np.zeros(2)
            for level in range(2):
                plus, minus = scorer.copy(), scorer.copy()
                plus.weights[level, 0] += step
                minus.weights[level, 0] -= step
                numeric_app[level] = (loss_and_gradients(ts, plus, cfg, 2, layer)[0]
                                      - loss_and_gradients(ts, minus, cfg, 2, layer)[0]) / (2 * step)
            assert close_enough(grad_scorer[:, 0], numeric_app)

    def test_joint_training_moves_gcn_weights(self, two_object_scene):
        seq, gt = two_object_scene
        fusion = FusionConfig(mode=FusionMode.GCN, m=1)
        ts = build_training_set(seq, gt, SegmentationStrategy.from_lengths((2, 2, 2, 2)),
                                TrackerConfig(levels=2), fusion, GcnLayer.identity(3))
        result = train_edge_scorer(ts, EdgeScorer.zeros(2), FocalLossConfig(),
                                   TrainingSchedule(iterations=20, learning_rate=0.5), GcnLayer.identity(3))
        assert not np.array_equal(result.layer.W, np.eye(3))
