"""Base-level tracklets: frame-to-frame IoU linking inside one key-frame segment."""

import logging
from typing import Dict, List, Optional, Sequence as TypingSequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..core.exceptions import FrameIndexError
from ..evaluation.matching import iou_matrix
from ..models.association import Tracklet, TrackletMember
from ..models.detection import Sequence
from ..models.segmentation import Segment

logger = logging.getLogger(__name__)

FeatureIndex = Dict[int, np.ndarray]


def feature_index(seq: Sequence) -> FeatureIndex:
    """Frame -> (N, D) feature matrix for every non-empty frame."""
    return {frame: seq.feature_matrix(frame) for frame, detections in seq.frames.items() if detections}


def member_features(members: TypingSequence[TrackletMember], features: FeatureIndex) -> np.ndarray:
    return np.stack([features[m.frame][m.ordinal] for m in members])


def estimate_velocity(members: TypingSequence[TrackletMember]) -> np.ndarray:
    """Least-squares centre velocity; zero for single-frame tracklets."""
    if len(members) < 2:
        return np.zeros(2)
    frames = np.array([m.frame for m in members], dtype=float)
    centers = np.array([(m.box[0] + m.box[2] / 2.0, m.box[1] + m.box[3] / 2.0) for m in members])
    slope, _ = np.polyfit(frames, centers, 1)
    return slope


def make_tracklet(track_id: int, members: List[TrackletMember], features: FeatureIndex) -> Tracklet:
    velocity = estimate_velocity(members)
    return Tracklet(
        track_id=track_id,
        members=members,
        feature=member_features(members, features).mean(axis=0),
        velocity=(float(velocity[0]), float(velocity[1])),
    )


def build_tracklets(seq: Sequence, segment: Segment, fused_features: Optional[FeatureIndex] = None,
                    iou_threshold: float = 0.3, first_id: int = 0) -> List[Tracklet]:
    """Link detections of consecutive frames inside ``segment``.

    Consecutive frames are matched by Hungarian assignment on 1 - IoU and a
    match is kept when IoU >= ``iou_threshold``; unmatched detections open new
    tracklets. A frame without detections ends every open tracklet.
    """
    if segment.first < 1 or segment.last > seq.length:
        raise FrameIndexError(segment.last if segment.last > seq.length else segment.first, seq.length)
    features = fused_features if fused_features is not None else feature_index(seq)

    finished: List[List[TrackletMember]] = []
    active: List[List[TrackletMember]] = []
    for frame in range(segment.first, segment.last + 1):
        detections = seq.detections(frame)
        members = [TrackletMember(frame, k, d.box, d.confidence) for k, d in enumerate(detections)]
        matched_rows = set()
        matched_cols = set()
        if active and members:
            previous = np.array([chain[-1].box for chain in active])
            current = np.array([m.box for m in members])
            overlap = iou_matrix(previous, current)
            rows, cols = linear_sum_assignment(1.0 - overlap)
            for r, c in zip(rows, cols):
                if overlap[r, c] >= iou_threshold:
                    active[r].append(members[c])
                    matched_rows.add(int(r))
                    matched_cols.add(int(c))
        still_active = []
        for r, chain in enumerate(active):
            (still_active if r in matched_rows else finished).append(chain)
        still_active.extend([member] for c, member in enumerate(members) if c not in matched_cols)
        active = still_active
    finished.extend(active)

    finished.sort(key=lambda chain: (chain[0].frame, chain[0].ordinal))
    tracklets = [make_tracklet(first_id + k, chain, features) for k, chain in enumerate(finished)]
    logger.debug(f"Segment [{segment.first},{segment.last}]: {len(tracklets)} tracklets")
    return tracklets


def merge_members(chain: TypingSequence[Tracklet], track_id: int) -> Tracklet:
    """Concatenate temporally ordered tracklets into one."""
    members = [member for tracklet in chain for member in tracklet.members]
    counts = np.array([len(t.members) for t in chain], dtype=float)
    feature = np.sum([t.feature * n for t, n in zip(chain, counts)], axis=0) / counts.sum()
    velocity = estimate_velocity(members)
    return Tracklet(track_id=track_id, members=members, feature=feature,
                    velocity=(float(velocity[0]), float(velocity[1])))


def refresh_features(tracklets: TypingSequence[Tracklet], features: FeatureIndex) -> List[Tracklet]:
    """Recompute pooled features from a new feature index."""
    return [t.model_copy(update={"feature": member_features(t.members, features).mean(axis=0)}) for t in tracklets]
