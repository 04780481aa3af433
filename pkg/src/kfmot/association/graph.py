"""Candidate links between temporally ordered tracklets of one hierarchy level."""

import logging
from typing import List, Sequence as TypingSequence

import numpy as np

from ..evaluation.matching import iou
from ..models.association import CandidateEdge, EdgeFeature, LevelGraph, Tracklet
from ..segmentation.environment import cosine_similarity

logger = logging.getLogger(__name__)


def _center(box) -> np.ndarray:
    return np.array([box[0] + box[2] / 2.0, box[1] + box[3] / 2.0])


def edge_feature(source: Tracklet, target: Tracklet) -> EdgeFeature:
    """Appearance and motion cues for linking ``source`` to the later ``target``."""
    gap = target.first_frame - source.last_frame
    predicted = source.predict_box(target.first_frame)
    observed = target.members[0].box
    scale = (source.members[-1].box[3] + observed[3]) / 2.0
    distance = float(np.linalg.norm(_center(predicted) - _center(observed))) / scale
    return EdgeFeature(
        appearance_sim=cosine_similarity(source.feature, target.feature),
        time_gap=gap,
        center_dist=distance,
        iou_pred=min(1.0, max(0.0, iou(predicted, observed))),
    )


def build_level_graph(tracklets: TypingSequence[Tracklet], level: int, window: int,
                      max_candidates: int) -> LevelGraph:
    """For each tracklet, the K nearest-in-time successors within ``window`` frames.

    Successors at the same gap are ranked by the distance between the
    extrapolated source box and their first box.
    """
    nodes = list(tracklets)
    edges: List[CandidateEdge] = []
    for i, source in enumerate(nodes):
        followers = []
        for j, target in enumerate(nodes):
            gap = target.first_frame - source.last_frame
            if i != j and 1 <= gap <= window:
                predicted = _center(source.predict_box(target.first_frame))
                distance = float(np.linalg.norm(predicted - _center(target.members[0].box)))
                followers.append((gap, distance, j))
        followers.sort()
        for _, _, j in followers[:max_candidates]:
            edges.append(CandidateEdge(i, j, edge_feature(source, nodes[j])))
    logger.debug(f"Level {level}: {len(nodes)} tracklets, {len(edges)} candidate edges (window {window})")
    return LevelGraph(level=level, window=window, nodes=nodes, edges=edges)
