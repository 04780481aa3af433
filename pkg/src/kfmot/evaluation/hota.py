"""HOTA with its detection and association components over the alpha grid."""

import math
from collections import defaultdict
from typing import Dict, List, NamedTuple, Optional, Sequence as TypingSequence, Tuple

import numpy as np

from ..models.detection import TrackSet
from ..models.metrics import ALPHAS, AlphaScore
from .matching import FrameData, align_frames, count_boxes, match_similarity


def alpha_score(frames: List[FrameData], gt_counts: Dict[int, int], pred_counts: Dict[int, int],
                alpha: float) -> AlphaScore:
    """Single-pass HOTA components at one threshold."""
    tp = fn = fp = 0
    pair_tp: Dict[Tuple[int, int], int] = defaultdict(int)
    for data in frames:
        matched = match_similarity(data.similarity, alpha)
        for p, g, _ in matched.matches:
            pair_tp[(data.gt_ids[g], data.pred_ids[p])] += 1
        tp += len(matched.matches)
        fp += matched.fp
        fn += matched.fn

    # every TP of a pair shares that pair's association accuracy
    assa_sum = 0.0
    for (gt_id, pred_id), tpa in sorted(pair_tp.items()):
        fna = gt_counts[gt_id] - tpa
        fpa = pred_counts[pred_id] - tpa
        assa_sum += tpa * (tpa / (tpa + fna + fpa))

    deta = tp / (tp + fn + fp) if (tp + fn + fp) > 0 else 0.0
    assa = assa_sum / tp if tp > 0 else 0.0
    return AlphaScore(alpha=alpha, hota=math.sqrt(deta * assa), deta=deta, assa=assa,
                      tp=tp, fn=fn, fp=fp, assa_sum=assa_sum)


def combine_alpha(scores: TypingSequence[AlphaScore]) -> AlphaScore:
    """Sum counts of the same alpha; AssA is TP-weighted."""
    alpha = scores[0].alpha
    tp = sum(s.tp for s in scores)
    fn = sum(s.fn for s in scores)
    fp = sum(s.fp for s in scores)
    assa_sum = sum(s.assa_sum for s in scores)
    deta = tp / (tp + fn + fp) if (tp + fn + fp) > 0 else 0.0
    assa = assa_sum / tp if tp > 0 else 0.0
    return AlphaScore(alpha=alpha, hota=math.sqrt(deta * assa), deta=deta, assa=assa,
                      tp=tp, fn=fn, fp=fp, assa_sum=assa_sum)


def summarize(per_alpha: TypingSequence[AlphaScore]) -> Tuple[float, float, float]:
    """Means of HOTA, DetA and AssA over the alpha grid."""
    return (
        float(np.mean([s.hota for s in per_alpha])),
        float(np.mean([s.deta for s in per_alpha])),
        float(np.mean([s.assa for s in per_alpha])),
    )


class HotaResult(NamedTuple):
    """Top-level HOTA, DetA and AssA (None without ground truth) and the per-alpha scores."""

    hota: Optional[float]
    deta: Optional[float]
    assa: Optional[float]
    per_alpha: List[AlphaScore]


def compute_hota(preds: TrackSet, gts: TrackSet, alphas: TypingSequence[float] = ALPHAS) -> HotaResult:
    frames = align_frames(preds, gts)
    gt_counts = count_boxes(gts)
    pred_counts = count_boxes(preds)
    per_alpha = [alpha_score(frames, gt_counts, pred_counts, alpha) for alpha in alphas]
    if gts.num_boxes == 0:
        return HotaResult(None, None, None, per_alpha)
    return HotaResult(*summarize(per_alpha), per_alpha)
