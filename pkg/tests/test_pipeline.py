"""End-to-end tracking tests on small hand-built scenes."""

import numpy as np
import pytest

from kfmot.association import track_sequence
from kfmot.core.exceptions import ConfigurationError, DataValidationError
from kfmot.evaluation import evaluate
from kfmot.io.mot_files import write_results
from kfmot.models.association import EdgeScorer, TrackerConfig
from kfmot.models.fusion import FusionConfig, FusionMode, GcnLayer
from kfmot.models.scenario import ScenarioConfig, ScenarioKind
from kfmot.models.segmentation import QConfig, SegmentationStrategy
from kfmot.segmentation import equal_segmentation, train_kfe
from kfmot.synth import generate

BOX_A = (100.0, 100.0, 40.0, 100.0)
BOX_B = (400.0, 100.0, 40.0, 100.0)
NO_FUSION = FusionConfig(mode=FusionMode.NONE)


def track(seq, lengths, fusion=NO_FUSION, layer=None, tracker=None):
    tracker = tracker or TrackerConfig()
    return track_sequence(seq, SegmentationStrategy.from_lengths(lengths), fusion, layer,
                          EdgeScorer.prior(tracker.levels), tracker)


class TestTrackSequence:
    def test_single_object_becomes_one_track(self, make_frames, make_tracks):
        seq = make_frames({t: [(BOX_A, (1.0, 0.0))] for t in range(1, 11)}, length=10)
        tracks = track(seq, (2, 2, 2, 2, 2))
        assert list(tracks.tracks) == [1]
        assert [b.frame for b in tracks.tracks[1]] == list(range(1, 11))

        report = evaluate(tracks, make_tracks({4: [(t, BOX_A) for t in range(1, 11)]}))
        assert (report.hota, report.idf1, report.mota) == (1.0, 1.0, 1.0)
        assert report.ids == 0

    def test_occlusion_gap_is_bridged(self, make_frames):
        frames = {t: [(BOX_A, (0.0, 1.0))] for t in (1, 2, 3, 7, 8, 9, 10)}
        seq = make_frames(frames, length=10)
        tracks = track(seq, (3, 3, 3, 1))
        assert len(tracks.tracks) == 1
        assert [b.frame for b in tracks.tracks[1]] == [1, 2, 3, 7, 8, 9, 10]

    def test_one_level_cannot_reach_across_gap(self, make_frames):
        frames = {t: [(BOX_A, (0.0, 1.0))] for t in (1, 2, 3, 7, 8, 9, 10)}
        seq = make_frames(frames, length=10)
        tracks = track(seq, (3, 3, 3, 1), tracker=TrackerConfig(levels=1))
        assert [[b.frame for b in boxes] for boxes in tracks.tracks.values()] == [[1, 2, 3], [7, 8, 9, 10]]

    @pytest.mark.parametrize("fusion", [NO_FUSION, FusionConfig()])
    def test_distinct_objects_stay_apart(self, make_frames, fusion):
        seq = make_frames({t: [(BOX_A, (1.0, 0.0)), (BOX_B, (0.0, 1.0))] for t in range(1, 9)}, length=8)
        layer = GcnLayer.identity(2) if fusion.mode == FusionMode.GCN else None
        tracks = track(seq, (2, 2, 2, 2), fusion, layer)
        assert len(tracks.tracks) == 2
        assert {b.box for b in tracks.tracks[1]} == {BOX_A}
        assert {b.box for b in tracks.tracks[2]} == {BOX_B}

    def test_track_ids_follow_first_appearance(self, make_frames):
        frames = {t: [(BOX_B, (0.0, 1.0))] for t in range(1, 5)}
        frames.update({t: frames.get(t, []) + [(BOX_A, (1.0, 0.0))] for t in range(3, 5)})
        seq = make_frames(frames, length=4)
        tracks = track(seq, (2, 2))
        assert tracks.tracks[1][0].box == BOX_B
        assert tracks.tracks[2][0].frame == 3

    def test_empty_sequence(self, make_frames):
        seq = make_frames({}, length=4)
        assert track(seq, (2, 2)).tracks == {}

    def test_repeat_runs_match(self):
        out = generate(ScenarioConfig(kind=ScenarioKind.OCCLUSION, num_objects=3, length=30, feature_noise=0.1,
                                      box_noise=1.0, seed=5))
        seq = out.detections
        strategy = equal_segmentation(seq, 5, QConfig())
        layer = GcnLayer.identity(seq.feature_dim)
        runs = [
            write_results(track_sequence(seq, strategy, FusionConfig(), layer, EdgeScorer.prior(3), TrackerConfig()))
            for _ in range(2)
        ]
        assert runs[0] == runs[1]

    def test_fusing_every_level_keeps_objects_whole(self, make_frames):
        frames = {t: [(BOX_A, (1.0, 0.1)), (BOX_B, (0.1, 1.0))] for t in range(1, 13) if t not in (5, 6)}
        seq = make_frames(frames, length=12)
        tracker = TrackerConfig(fuse_every_level=True)
        tracks = track(seq, (3, 3, 3, 3), FusionConfig(), GcnLayer.identity(2), tracker)
        assert len(tracks.tracks) == 2
        assert all(len(boxes) == 10 for boxes in tracks.tracks.values())

    def test_strategy_length_mismatch(self, make_frames):
        seq = make_frames({1: [(BOX_A, (1.0, 0.0))]}, length=6)
        with pytest.raises(DataValidationError):
            track(seq, (2, 2))

    def test_scorer_missing_a_level(self, make_frames):
        seq = make_frames({1: [(BOX_A, (1.0, 0.0))]}, length=2)
        with pytest.raises(ConfigurationError):
            track_sequence(seq, SegmentationStrategy.from_lengths((2,)), NO_FUSION, None, EdgeScorer.prior(2),
                           TrackerConfig(levels=3))

    def test_inputs_are_untouched(self, make_frames):
        seq = make_frames({t: [(BOX_A, (1.0, 0.0))] for t in range(1, 5)}, length=4)
        before = {t: [d.feature for d in ds] for t, ds in seq.frames.items()}
        scorer = EdgeScorer.prior(3)
        track_sequence(seq, SegmentationStrategy.from_lengths((2, 2)), FusionConfig(), GcnLayer.identity(2),
                       scorer, TrackerConfig())
        assert {t: [d.feature for d in ds] for t, ds in seq.frames.items()} == before
        np.testing.assert_array_equal(scorer.weights, EdgeScorer.prior(3).weights)


@pytest.mark.parametrize("length", [10, 30, 60])
def test_clean_single_object_scene_scores_perfectly(length):
    out = generate(ScenarioConfig(kind=ScenarioKind.OCCLUSION, num_objects=1, length=length, seed=length))
    seq = out.detections
    assert [obj for obj, _, _ in out.scenario.occlusion_gaps] == [1]
    strategy = train_kfe(seq, QConfig(max_len=6, episodes=2000, seed=length))
    tracks = track_sequence(seq, strategy, NO_FUSION, None, EdgeScorer.prior(3), TrackerConfig())
    report = evaluate(tracks, out.gt, name=seq.name)
    assert (report.hota, report.idf1, report.mota) == (pytest.approx(1.0), pytest.approx(1.0), pytest.approx(1.0))
    assert report.ids == 0
    assert len(tracks.tracks) == 1
