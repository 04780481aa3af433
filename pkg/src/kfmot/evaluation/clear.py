"""CLEAR-MOT counting: FP, FN, identity switches and MOTA."""

import logging
from typing import Dict, NamedTuple, Optional

import numpy as np

from ..models.detection import TrackSet
from .matching import EPS, align_frames, match_scores

logger = logging.getLogger(__name__)

# bonus that keeps a still-valid match from the previous frame ahead of any new pairing
CONTINUITY_BONUS = 1000.0


class ClearCounts(NamedTuple):
    mota: Optional[float]
    ids: int
    fp: int
    fn: int


def clear_counts(preds: TrackSet, gts: TrackSet, alpha: float = 0.5) -> Dict[str, int]:
    """Raw TP/FP/FN/IDS and ground-truth box count."""
    tp = fp = fn = ids = num_gt = 0
    last_pred_for_gt: Dict[int, int] = {}
    previous_frame_pred: Dict[int, int] = {}

    for data in align_frames(preds, gts):
        num_gt += len(data.gt_ids)
        similarity = data.similarity
        scores = np.where(similarity >= alpha - EPS, similarity, 0.0)
        for g, gt_id in enumerate(data.gt_ids):
            carried = previous_frame_pred.get(gt_id)
            if carried is not None and carried in data.pred_ids:
                p = data.pred_ids.index(carried)
                if scores[p, g] > 0:
                    scores[p, g] += CONTINUITY_BONUS
        pairs = match_scores(scores, similarity, alpha)

        current: Dict[int, int] = {}
        for p, g in pairs:
            gt_id, pred_id = data.gt_ids[g], data.pred_ids[p]
            if gt_id in last_pred_for_gt and last_pred_for_gt[gt_id] != pred_id:
                ids += 1
            last_pred_for_gt[gt_id] = pred_id
            current[gt_id] = pred_id
        previous_frame_pred = current

        tp += len(pairs)
        fp += len(data.pred_ids) - len(pairs)
        fn += len(data.gt_ids) - len(pairs)

    return {"tp": tp, "fp": fp, "fn": fn, "ids": ids, "num_gt": num_gt}


def mota_from_counts(fp: int, fn: int, ids: int, num_gt: int) -> Optional[float]:
    if num_gt == 0:
        return None
    return 1.0 - (fn + fp + ids) / num_gt


def compute_mota(preds: TrackSet, gts: TrackSet, alpha_match: float = 0.5) -> ClearCounts:
    """MOTA with its IDS, FP and FN; MOTA is None without ground truth."""
    counts = clear_counts(preds, gts, alpha_match)
    mota = mota_from_counts(counts["fp"], counts["fn"], counts["ids"], counts["num_gt"])
    return ClearCounts(mota, counts["ids"], counts["fp"], counts["fn"])
