"""Box overlap and per-frame one-to-one matching."""

from typing import Dict, List, NamedTuple, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..models.detection import Box, TrackSet

# tolerance for IoU values that sit exactly on a threshold
EPS = np.finfo(float).eps


def iou(box_a: Box, box_b: Box) -> float:
    """Intersection over union of two (left, top, width, height) boxes."""
    return float(iou_matrix(np.asarray([box_a], dtype=float), np.asarray([box_b], dtype=float))[0, 0])


def iou_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(N, M) IoU between two stacks of (left, top, width, height) boxes."""
    a = np.asarray(a, dtype=float).reshape(-1, 4)
    b = np.asarray(b, dtype=float).reshape(-1, 4)
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((a.shape[0], b.shape[0]))

    ax1, ay1 = a[:, 0:1], a[:, 1:2]
    ax2, ay2 = ax1 + a[:, 2:3], ay1 + a[:, 3:4]
    bx1, by1 = b[:, 0][None, :], b[:, 1][None, :]
    bx2, by2 = bx1 + b[:, 2][None, :], by1 + b[:, 3][None, :]

    inter_w = np.maximum(0.0, np.minimum(ax2, bx2) - np.maximum(ax1, bx1))
    inter_h = np.maximum(0.0, np.minimum(ay2, by2) - np.maximum(ay1, by1))
    inter = inter_w * inter_h

    union = a[:, 2:3] * a[:, 3:4] + (b[:, 2] * b[:, 3])[None, :] - inter
    return inter / np.maximum(union, EPS)


class FrameMatch(NamedTuple):
    """Matched (pred index, gt index, IoU) triples and the leftovers of one frame."""

    matches: List[Tuple[int, int, float]]
    unmatched_preds: List[int]
    unmatched_gts: List[int]

    @property
    def fp(self) -> int:
        return len(self.unmatched_preds)

    @property
    def fn(self) -> int:
        return len(self.unmatched_gts)


def match_scores(scores: np.ndarray, similarity: np.ndarray, alpha: float) -> List[Tuple[int, int]]:
    """Hungarian maximisation of ``scores``, keeping pairs whose similarity reaches ``alpha``."""
    if scores.size == 0:
        return []
    rows, cols = linear_sum_assignment(scores, maximize=True)
    return [(int(r), int(c)) for r, c in zip(rows, cols) if similarity[r, c] >= alpha - EPS and scores[r, c] > 0]


def match_frame(preds: np.ndarray, gts: np.ndarray, alpha: float) -> FrameMatch:
    """One-to-one matching maximising total IoU over pairs with IoU >= alpha."""
    similarity = iou_matrix(preds, gts)
    return match_similarity(similarity, alpha)


def match_similarity(similarity: np.ndarray, alpha: float) -> FrameMatch:
    num_preds, num_gts = similarity.shape
    scores = np.where(similarity >= alpha - EPS, similarity, 0.0)
    pairs = match_scores(scores, similarity, alpha)
    matched_preds = {p for p, _ in pairs}
    matched_gts = {g for _, g in pairs}
    return FrameMatch(
        matches=[(p, g, float(similarity[p, g])) for p, g in pairs],
        unmatched_preds=[p for p in range(num_preds) if p not in matched_preds],
        unmatched_gts=[g for g in range(num_gts) if g not in matched_gts],
    )


class FrameData(NamedTuple):
    """Ids and boxes of one frame for both sides, plus their IoU matrix (pred rows, gt columns)."""

    frame: int
    gt_ids: List[int]
    gt_boxes: np.ndarray
    pred_ids: List[int]
    pred_boxes: np.ndarray
    similarity: np.ndarray


def _frame_index(tracks: TrackSet) -> Dict[int, Tuple[List[int], np.ndarray]]:
    index = {}
    for frame, entries in tracks.by_frame().items():
        ids = [track_id for track_id, _ in entries]
        boxes = np.array([entry.box for _, entry in entries], dtype=float).reshape(len(entries), 4)
        index[frame] = (ids, boxes)
    return index


def align_frames(preds: TrackSet, gts: TrackSet) -> List[FrameData]:
    """Per-frame view of both track sets over the union of their frames."""
    pred_index = _frame_index(preds)
    gt_index = _frame_index(gts)
    empty: Tuple[List[int], np.ndarray] = ([], np.zeros((0, 4)))
    frames = []
    for frame in sorted(set(pred_index) | set(gt_index)):
        gt_ids, gt_boxes = gt_index.get(frame, empty)
        pred_ids, pred_boxes = pred_index.get(frame, empty)
        frames.append(FrameData(frame, gt_ids, gt_boxes, pred_ids, pred_boxes, iou_matrix(pred_boxes, gt_boxes)))
    return frames


def count_boxes(tracks: TrackSet) -> Dict[int, int]:
    return {track_id: len(boxes) for track_id, boxes in tracks.tracks.items()}
