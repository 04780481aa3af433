"""End-to-end tracking: fusion, per-segment tracklets, then level-by-level merging."""

import logging
from typing import List, Optional

from ..core.exceptions import DataValidationError
from ..fusion.fuse import fuse_frame
from ..models.association import EdgeScorer, TrackerConfig, Tracklet
from ..models.detection import Sequence, TrackBox, TrackSet
from ..models.fusion import FusionConfig, FusionMode, GcnLayer
from ..models.segmentation import SegmentationStrategy
from .graph import build_level_graph
from .merge import match_and_merge
from .scorer import score_edges
from .tracklets import FeatureIndex, build_tracklets, feature_index, refresh_features

logger = logging.getLogger(__name__)


def fuse_index(seq: Sequence, features: FeatureIndex, fusion: FusionConfig,
               layer: Optional[GcnLayer] = None) -> FeatureIndex:
    return {frame: fuse_frame(H, seq.box_matrix(frame), fusion, layer, frame) for frame, H in features.items()}


def to_track_set(tracklets: List[Tracklet]) -> TrackSet:
    """Number tracks 1.. in order of their first detection."""
    ordered = sorted(tracklets, key=lambda t: (t.first_frame, t.members[0].ordinal))
    tracks = {
        track_id: [TrackBox(frame=m.frame, box=m.box, confidence=m.confidence) for m in tracklet.members]
        for track_id, tracklet in enumerate(ordered, start=1)
    }
    return TrackSet(tracks=tracks)


def track_sequence(seq: Sequence, strategy: SegmentationStrategy, fusion: FusionConfig,
                   layer: Optional[GcnLayer], scorer: EdgeScorer, tracker: TrackerConfig) -> TrackSet:
    """Track one sequence with a fixed segmentation, fusion and edge scorer."""
    if strategy.length != seq.length:
        raise DataValidationError(
            f"Segmentation covers {strategy.length} frames, sequence {seq.name} has {seq.length}",
            {"strategy_length": strategy.length, "sequence_length": seq.length},
        )
    scorer.level_weights(tracker.levels)

    features = fuse_index(seq, feature_index(seq), fusion, layer)
    tracklets: List[Tracklet] = []
    for segment in strategy.segments:
        tracklets.extend(build_tracklets(seq, segment, features, tracker.iou_threshold, first_id=len(tracklets)))
    base_count = len(tracklets)

    for level in range(1, tracker.levels + 1):
        if level > 1 and tracker.fuse_every_level and fusion.mode != FusionMode.NONE:
            features = fuse_index(seq, features, fusion, layer)
            tracklets = refresh_features(tracklets, features)
        window = tracker.window(level, strategy.max_segment_length)
        graph = build_level_graph(tracklets, level, window, tracker.max_candidates)
        tracklets = match_and_merge(graph, score_edges(graph, scorer), tracker.merge_threshold)

    result = to_track_set(tracklets)
    logger.info(f"Tracked {seq.name}: {base_count} tracklets -> {len(result.tracks)} tracks "
                f"over {tracker.levels} levels")
    return result
