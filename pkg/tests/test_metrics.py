"""Tests for IoU matching, CLEAR-MOT, IDF1 and HOTA."""

import math

import pytest

from kfmot.evaluation import (
    combine_reports,
    compute_hota,
    compute_idf1,
    compute_mota,
    evaluate,
    iou,
    match_frame,
    write_report_csv,
)
from kfmot.models.detection import TrackSet
from kfmot.models.metrics import ALPHAS


def relabel(tracks: TrackSet, mapping) -> TrackSet:
    return TrackSet(tracks={mapping[track_id]: boxes for track_id, boxes in tracks.tracks.items()})


def shift(tracks: TrackSet, offset: int) -> TrackSet:
    return TrackSet(tracks={
        track_id: [b.model_copy(update={"frame": b.frame + offset}) for b in boxes]
        for track_id, boxes in tracks.tracks.items()
    })


@pytest.fixture
def two_tracks(make_tracks):
    return make_tracks({
        1: [(t, (10.0 * t, 0.0, 40.0, 100.0)) for t in range(1, 7)],
        2: [(t, (400.0, 5.0 * t, 40.0, 100.0)) for t in range(2, 8)],
    })


@pytest.fixture
def noisy_preds(make_tracks):
    return make_tracks({
        7: [(t, (10.0 * t + 3, 0.0, 40.0, 100.0)) for t in range(1, 4)],
        3: [(t, (10.0 * t, 2.0, 40.0, 100.0)) for t in range(4, 7)],
        9: [(t, (401.0, 5.0 * t, 40.0, 90.0)) for t in range(2, 7)],
        4: [(5, (900.0, 0.0, 40.0, 100.0))],
    })


class TestIou:
    def test_identical(self, box_a):
        assert iou(box_a, box_a) == 1.0

    def test_disjoint(self):
        assert iou((0, 0, 1, 1), (5, 5, 1, 1)) == 0.0

    def test_half_shifted(self):
        assert iou((0, 0, 2, 2), (1, 0, 2, 2)) == pytest.approx(1.0 / 3.0, abs=1e-12)


class TestMatchFrame:
    def test_perfect_overlap(self):
        boxes = [(0, 0, 10, 10), (50, 0, 10, 10)]
        result = match_frame(boxes, boxes, 0.5)
        assert sorted((p, g) for p, g, _ in result.matches) == [(0, 0), (1, 1)]
        assert result.fp == 0 and result.fn == 0

    def test_prediction_without_ground_truth(self):
        result = match_frame([(0, 0, 10, 10)], [], 0.5)
        assert result.fp == 1 and result.fn == 0

    def test_best_overlap_wins(self):
        result = match_frame([(0, 0, 10, 6), (0, 0, 10, 9)], [(0, 0, 10, 10)], 0.5)
        assert [(p, g) for p, g, _ in result.matches] == [(1, 0)]
        assert result.matches[0][2] == pytest.approx(0.9)
        assert result.unmatched_preds == [0]


class TestClear:
    def test_perfect(self, gt_single):
        counts = compute_mota(gt_single, gt_single)
        assert counts.mota == 1.0
        assert (counts.ids, counts.fp, counts.fn) == (0, 0, 0)

    def test_split_track(self, gt_single, split_preds):
        counts = compute_mota(split_preds, gt_single)
        assert (counts.fp, counts.fn, counts.ids) == (0, 0, 1)
        assert counts.mota == pytest.approx(0.75)

    def test_no_predictions(self, gt_single):
        counts = compute_mota(TrackSet(), gt_single)
        assert counts.mota == 0.0
        assert counts.fn == 4

    def test_empty_ground_truth(self, split_preds):
        counts = compute_mota(split_preds, TrackSet())
        assert counts.mota is None
        assert counts.fp == 4

    def test_carry_over_keeps_identity(self, make_tracks):
        gt = make_tracks({1: [(t, (0.0, 0.0, 10.0, 10.0)) for t in (1, 2)]})
        preds = make_tracks({
            5: [(1, (0.0, 0.0, 10.0, 10.0)), (2, (0.0, 0.0, 10.0, 7.0))],
            6: [(2, (0.0, 0.0, 10.0, 10.0))],
        })
        counts = compute_mota(preds, gt)
        assert counts.ids == 0
        assert counts.fp == 1

    def test_return_to_earlier_id_counts_twice(self, make_tracks, box_a):
        gt = make_tracks({1: [(t, box_a) for t in range(1, 4)]})
        preds = make_tracks({1: [(1, box_a), (3, box_a)], 2: [(2, box_a)]})
        assert compute_mota(preds, gt).ids == 2


class TestIdentity:
    def test_perfect(self, gt_single):
        assert compute_idf1(gt_single, gt_single) == 1.0

    def test_split_track(self, gt_single, split_preds):
        report = evaluate(split_preds, gt_single)
        assert (report.idtp, report.idfp, report.idfn) == (2, 2, 2)
        assert report.idf1 == pytest.approx(0.5)

    def test_no_predictions(self, gt_single):
        assert compute_idf1(TrackSet(), gt_single) == 0.0

    def test_empty_ground_truth(self, split_preds):
        assert compute_idf1(split_preds, TrackSet()) is None


class TestHota:
    def test_perfect(self, gt_single):
        result = compute_hota(gt_single, gt_single)
        assert (result.hota, result.deta, result.assa) == (1.0, 1.0, 1.0)
        assert [s.alpha for s in result.per_alpha] == list(ALPHAS)
        assert len(ALPHAS) == 19

    def test_split_track(self, gt_single, split_preds):
        result = compute_hota(split_preds, gt_single)
        assert result.deta == pytest.approx(1.0)
        assert result.assa == pytest.approx(0.5)
        assert result.hota == pytest.approx(math.sqrt(0.5))

    def test_no_predictions(self, gt_single):
        assert compute_hota(TrackSet(), gt_single).hota == 0.0

    def test_empty_ground_truth(self, split_preds):
        result = compute_hota(split_preds, TrackSet())
        assert (result.hota, result.deta, result.assa) == (None, None, None)

    def test_components_compose_per_alpha(self, two_tracks, noisy_preds):
        for score in compute_hota(noisy_preds, two_tracks).per_alpha:
            assert score.hota == math.sqrt(score.deta * score.assa)


class TestInvariances:
    def test_id_permutations(self, two_tracks, noisy_preds):
        reference = evaluate(noisy_preds, two_tracks)
        permuted = evaluate(relabel(noisy_preds, {7: 1, 3: 20, 9: 8, 4: 2}), relabel(two_tracks, {1: 5, 2: 3}))
        for field in ("hota", "deta", "assa", "idf1", "mota"):
            assert getattr(permuted, field) == pytest.approx(getattr(reference, field), abs=1e-12)
        assert (permuted.ids, permuted.fp, permuted.fn) == (reference.ids, reference.fp, reference.fn)

    def test_frame_translation(self, two_tracks, noisy_preds):
        reference = evaluate(noisy_preds, two_tracks)
        assert evaluate(shift(noisy_preds, 10), shift(two_tracks, 10)).row() == reference.row()

    def test_perfect_report(self, two_tracks):
        report = evaluate(two_tracks, two_tracks)
        assert (report.hota, report.deta, report.assa, report.idf1, report.mota) == (1.0, 1.0, 1.0, 1.0, 1.0)
        assert (report.ids, report.fp, report.fn) == (0, 0, 0)

    def test_more_errors_lower_mota(self, two_tracks, make_tracks):
        extra = make_tracks({**{k: [(b.frame, b.box) for b in v] for k, v in two_tracks.tracks.items()},
                             99: [(3, (900.0, 0.0, 40.0, 100.0))]})
        assert compute_mota(extra, two_tracks).mota < compute_mota(two_tracks, two_tracks).mota


class TestReports:
    def test_combine_pools_counts(self, gt_single, split_preds):
        combined = combine_reports([evaluate(split_preds, gt_single, "split"), evaluate(gt_single, gt_single, "same")])
        assert combined.name == "COMBINED"
        assert combined.mota == pytest.approx(1.0 - 1.0 / 8.0)
        assert combined.idf1 == pytest.approx(12.0 / 16.0)
        assert combined.assa == pytest.approx(0.75)
        assert combined.ids == 1

    def test_combine_nothing(self):
        assert combine_reports([]).hota is None

    def test_csv_layout(self, gt_single, split_preds):
        text = write_report_csv([evaluate(split_preds, gt_single, "seq-1")])
        header, row, combined = text.splitlines()
        assert header == "sequence,hota,deta,assa,idf1,mota,ids,fp,fn"
        assert row.startswith("seq-1,")
        assert row.endswith(",1,0,0")
        assert combined.split(",")[1:] == row.split(",")[1:]
        assert combined.startswith("COMBINED,")

    def test_empty_ground_truth_cells_are_blank(self, split_preds):
        row = evaluate(split_preds, TrackSet(), "empty").row()
        assert row[1:6] == ["", "", "", "", ""]
