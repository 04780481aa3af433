"""Identity metrics: global trajectory matching and IDF1."""

from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..models.detection import TrackSet
from .matching import EPS, align_frames


class IdentityCounts(NamedTuple):
    idtp: int
    idfp: int
    idfn: int

    @property
    def idf1(self) -> Optional[float]:
        denominator = 2 * self.idtp + self.idfp + self.idfn
        if denominator == 0:
            return None
        return 2 * self.idtp / denominator


def identity_counts(preds: TrackSet, gts: TrackSet, alpha: float = 0.5) -> IdentityCounts:
    """IDTP/IDFP/IDFN under the trajectory assignment that maximises IDTP."""
    gt_ids = sorted(gts.tracks)
    pred_ids = sorted(preds.tracks)
    num_gt = gts.num_boxes
    num_pred = preds.num_boxes
    if not gt_ids or not pred_ids:
        return IdentityCounts(0, num_pred, num_gt)

    gt_col = {track_id: k for k, track_id in enumerate(gt_ids)}
    pred_row = {track_id: k for k, track_id in enumerate(pred_ids)}
    overlap = np.zeros((len(pred_ids), len(gt_ids)))
    for data in align_frames(preds, gts):
        hits = np.argwhere(data.similarity >= alpha - EPS)
        for p, g in hits:
            overlap[pred_row[data.pred_ids[p]], gt_col[data.gt_ids[g]]] += 1

    rows, cols = linear_sum_assignment(overlap, maximize=True)
    idtp = int(overlap[rows, cols].sum())
    return IdentityCounts(idtp, num_pred - idtp, num_gt - idtp)


def compute_idf1(preds: TrackSet, gts: TrackSet, alpha_match: float = 0.5) -> Optional[float]:
    """IDF1 = 2 IDTP / (2 IDTP + IDFP + IDFN); None without ground truth."""
    if gts.num_boxes == 0:
        return None
    return identity_counts(preds, gts, alpha_match).idf1
