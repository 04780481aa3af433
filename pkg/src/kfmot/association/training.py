"""Supervised training of the edge scorer (and GCN weights) from ground-truth identities.

Level graphs are built once with forced merges: tracklets of the same
ground-truth identity are merged between levels, so the graph structure does
not depend on the weights being trained. Only the appearance similarity
column is recomputed when the GCN weights change.
"""

import logging
from collections import Counter
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import expit

from ..core.exceptions import TrainingError
from ..evaluation.matching import iou_matrix
from ..fusion.fuse import default_layer
from ..fusion.gcn import average_fusion_matrix, propagated_fusion, propagated_gradients
from ..fusion.graph import graph_from_boxes, propagation_matrix
from ..models.association import (
    EDGE_FEATURE_NAMES,
    EdgeScorer,
    FocalLossConfig,
    LevelGraph,
    TrackerConfig,
    Tracklet,
    TrainingSchedule,
)
from ..models.detection import Sequence, TrackSet
from ..models.fusion import FrameGraph, FusionConfig, FusionMode, GcnLayer
from ..models.segmentation import SegmentationStrategy
from .graph import build_level_graph
from .loss import clamp_probability, focal_terms
from .merge import match_and_merge
from .scorer import edge_logits, edge_probabilities
from .tracklets import FeatureIndex, build_tracklets

logger = logging.getLogger(__name__)

DetectionLabels = Dict[Tuple[int, int], int]


class FrameCache(NamedTuple):
    """Raw features, neighbour graph and propagation matrix of one frame."""

    H: np.ndarray
    graph: FrameGraph
    S: np.ndarray


class LevelSample(NamedTuple):
    """One level graph with its (E, 4) scorer inputs and 0/1 edge labels."""

    graph: LevelGraph
    features: np.ndarray
    labels: np.ndarray


class TrainingSet(NamedTuple):
    samples: List[LevelSample]
    fusion: FusionConfig
    frames: Dict[int, FrameCache]

    @property
    def num_edges(self) -> int:
        return sum(len(sample.labels) for sample in self.samples)

    @property
    def num_positive(self) -> int:
        return int(sum(sample.labels.sum() for sample in self.samples))


class TrainingResult(NamedTuple):
    scorer: EdgeScorer
    layer: Optional[GcnLayer]
    losses: List[float]


def label_detections(seq: Sequence, gt: TrackSet, iou_threshold: float = 0.5) -> DetectionLabels:
    """Ground-truth id of every detection, -1 when no box overlaps enough."""
    gt_frames = gt.by_frame()
    labels: DetectionLabels = {}
    for frame, detections in seq.frames.items():
        for ordinal in range(len(detections)):
            labels[(frame, ordinal)] = -1
        entries = gt_frames.get(frame, [])
        if not detections or not entries:
            continue
        overlap = iou_matrix(seq.box_matrix(frame), np.array([entry.box for _, entry in entries]))
        rows, cols = linear_sum_assignment(overlap, maximize=True)
        for r, c in zip(rows, cols):
            if overlap[r, c] >= iou_threshold:
                labels[(frame, int(r))] = entries[c][0]
    return labels


def tracklet_label(tracklet: Tracklet, labels: DetectionLabels) -> int:
    """Majority ground-truth id of the members; ties go to the smaller id."""
    votes = Counter(labels.get((m.frame, m.ordinal), -1) for m in tracklet.members)
    votes.pop(-1, None)
    if not votes:
        return -1
    return min(votes, key=lambda identity: (-votes[identity], identity))


def edge_labels(graph: LevelGraph, labels: DetectionLabels) -> np.ndarray:
    """1 where both ends carry the same known identity."""
    identities = [tracklet_label(t, labels) for t in graph.nodes]
    return np.array([
        1 if identities[e.source] != -1 and identities[e.source] == identities[e.target] else 0
        for e in graph.edges
    ], dtype=int)


def _frame_caches(seq: Sequence, fusion: FusionConfig) -> Dict[int, FrameCache]:
    caches = {}
    for frame, detections in seq.frames.items():
        if detections:
            graph = graph_from_boxes(seq.box_matrix(frame), fusion.m, frame)
            caches[frame] = FrameCache(seq.feature_matrix(frame), graph, propagation_matrix(graph))
    return caches


def _fused_index(ts_frames: Dict[int, FrameCache], fusion: FusionConfig,
                 layer: Optional[GcnLayer]) -> FeatureIndex:
    fused: FeatureIndex = {}
    for frame, cache in ts_frames.items():
        if fusion.mode == FusionMode.GCN:
            fused[frame] = propagated_fusion(cache.S, cache.H, layer, fusion)
        elif fusion.mode == FusionMode.AVERAGE:
            fused[frame] = average_fusion_matrix(cache.H, cache.graph, fusion)
        else:
            fused[frame] = cache.H
    return fused


def build_training_set(seq: Sequence, gt: TrackSet, strategy: SegmentationStrategy, tracker: TrackerConfig,
                       fusion: FusionConfig, layer: Optional[GcnLayer] = None) -> TrainingSet:
    """Level graphs 1..L with edge labels, merging along true links between levels."""
    frames = _frame_caches(seq, fusion)
    if fusion.mode == FusionMode.GCN and layer is None:
        layer = default_layer(seq.feature_dim, fusion)
    fused = _fused_index(frames, fusion, layer)
    labels = label_detections(seq, gt)

    tracklets: List[Tracklet] = []
    for segment in strategy.segments:
        tracklets.extend(build_tracklets(seq, segment, fused, tracker.iou_threshold, first_id=len(tracklets)))

    samples = []
    for level in range(1, tracker.levels + 1):
        window = tracker.window(level, strategy.max_segment_length)
        graph = build_level_graph(tracklets, level, window, tracker.max_candidates)
        y = edge_labels(graph, labels)
        samples.append(LevelSample(graph, graph.feature_matrix(), y))
        gaps = np.array([e.feature.time_gap for e in graph.edges], dtype=float)
        forced = y * (1.0 - gaps / (2.0 * window)) if len(gaps) else y.astype(float)
        tracklets = match_and_merge(graph, forced, 0.5)
        logger.debug(f"Training level {level}: {len(y)} edges, {int(y.sum())} positive")

    ts = TrainingSet(samples=samples, fusion=fusion, frames=frames)
    logger.info(f"Training set for {seq.name}: {ts.num_edges} edges, {ts.num_positive} positive, "
                f"{tracker.levels} levels")
    return ts


def _cosine_and_gradients(u: np.ndarray, v: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0, np.zeros_like(u), np.zeros_like(v)
    c = float(np.dot(u, v) / (norm_u * norm_v))
    grad_u = v / (norm_u * norm_v) - c * u / norm_u ** 2
    grad_v = u / (norm_u * norm_v) - c * v / norm_v ** 2
    return float(np.clip(c, -1.0, 1.0)), grad_u, grad_v


def _pooled(tracklet: Tracklet, fused: FeatureIndex) -> np.ndarray:
    return np.mean([fused[m.frame][m.ordinal] for m in tracklet.members], axis=0)


def loss_and_gradients(ts: TrainingSet, scorer: EdgeScorer, loss_cfg: FocalLossConfig, depth: int,
                       layer: Optional[GcnLayer] = None) -> Tuple[float, np.ndarray, Optional[np.ndarray]]:
    """Summed per-level mean focal loss over levels 1..depth.

    Returns the loss, the gradient for the scorer weights and, when ``layer``
    is given in GCN mode, the gradient for the GCN weights (otherwise None).
    """
    through_gcn = layer is not None and ts.fusion.mode == FusionMode.GCN
    fused = _fused_index(ts.frames, ts.fusion, layer) if through_gcn else None
    upstream: Dict[int, np.ndarray] = {f: np.zeros_like(c.H) for f, c in ts.frames.items()} if through_gcn else {}

    total = 0.0
    grad_scorer = np.zeros_like(scorer.weights)
    for sample in ts.samples[:depth]:
        count = len(sample.labels)
        if count == 0:
            continue
        graph = sample.graph
        weights = scorer.level_weights(graph.level)
        X = sample.features.copy()
        if through_gcn:
            pooled = [_pooled(t, fused) for t in graph.nodes]
            cosines = [_cosine_and_gradients(pooled[e.source], pooled[e.target]) for e in graph.edges]
            X[:, 0] = [c for c, _, _ in cosines]
        Z = scorer.standardize(X)
        p = clamp_probability(expit(edge_logits(Z, weights)))
        loss, dz = focal_terms(p, sample.labels, loss_cfg)
        total += float(loss.mean())
        dz = dz / count
        grad_scorer[graph.level - 1, :-1] = Z.T @ dz
        grad_scorer[graph.level - 1, -1] = dz.sum()
        if through_gcn:
            for edge, (_, grad_u, grad_v), dz_e in zip(graph.edges, cosines, dz):
                scale = dz_e * weights[0] / scorer.feature_std[0]
                for node, grad in ((edge.source, grad_u), (edge.target, grad_v)):
                    members = graph.nodes[node].members
                    share = scale * grad / len(members)
                    for m in members:
                        upstream[m.frame][m.ordinal] += share

    grad_W = None
    if through_gcn:
        grad_W = np.zeros_like(layer.W)
        for frame, cache in ts.frames.items():
            if upstream[frame].any():
                grad_W += propagated_gradients(cache.S, cache.H, layer, upstream[frame], ts.fusion)[0]
    return total, grad_scorer, grad_W


def edge_statistics(ts: TrainingSet) -> Tuple[np.ndarray, np.ndarray]:
    """Per-feature mean and deviation over every labelled edge; constant features keep unit deviation."""
    rows = [sample.features for sample in ts.samples if len(sample.labels)]
    if not rows:
        return np.zeros(len(EDGE_FEATURE_NAMES)), np.ones(len(EDGE_FEATURE_NAMES))
    X = np.vstack(rows)
    std = X.std(axis=0)
    return X.mean(axis=0), np.where(std > 1e-12, std, 1.0)


def combine_training_sets(sets: List[TrainingSet]) -> TrainingSet:
    """Pool the edges of several sequences level by level.

    The pooled set keeps no frame caches, so it trains the scorer alone.
    """
    if not sets:
        raise TrainingError("No training sets to combine")
    levels = max(len(ts.samples) for ts in sets)
    samples = []
    for level in range(1, levels + 1):
        parts = [ts.samples[level - 1] for ts in sets if len(ts.samples) >= level]
        features = [part.features for part in parts if len(part.labels)]
        labels = [part.labels for part in parts if len(part.labels)]
        samples.append(LevelSample(
            graph=LevelGraph(level=level, window=parts[0].graph.window),
            features=np.vstack(features) if features else np.zeros((0, len(EDGE_FEATURE_NAMES))),
            labels=np.concatenate(labels) if labels else np.zeros(0, dtype=int),
        ))
    return TrainingSet(samples=samples, fusion=sets[0].fusion, frames={})


def train_edge_scorer(ts: TrainingSet, scorer: EdgeScorer, loss_cfg: FocalLossConfig, schedule: TrainingSchedule,
                      layer: Optional[GcnLayer] = None) -> TrainingResult:
    """Full-batch gradient descent with level-by-level unfreezing.

    The scorer is first re-expressed against the edge statistics of ``ts``,
    which leaves its scores unchanged. Levels above the current depth stay
    frozen; the GCN weights are updated together with the scorer when
    ``layer`` is given in GCN mode.
    """
    if ts.num_edges == 0:
        raise TrainingError("No labelled edges to train on", details={"levels": len(ts.samples)})
    if layer is not None and ts.fusion.mode == FusionMode.GCN and not ts.frames:
        raise TrainingError("GCN weights need a training set with frame caches")
    scorer = scorer.with_standardization(*edge_statistics(ts))
    levels = scorer.levels
    losses: List[float] = []
    for iteration in range(schedule.iterations):
        depth = min(schedule.depth(iteration, levels), len(ts.samples))
        scorer.frozen = [level > depth for level in range(1, levels + 1)]
        loss, grad_scorer, grad_W = loss_and_gradients(ts, scorer, loss_cfg, depth, layer)
        if not np.isfinite(loss):
            raise TrainingError(f"Loss became non-finite at iteration {iteration}",
                                details={"iteration": iteration, "depth": depth})
        losses.append(loss)
        trainable = ~np.array(scorer.frozen)
        scorer.weights[trainable] -= schedule.learning_rate * grad_scorer[trainable]
        if grad_W is not None:
            layer = layer.with_weights(layer.W - schedule.learning_rate * grad_W)
        if iteration % 100 == 0:
            logger.debug(f"Iteration {iteration}: loss {loss:.6f}, depth {depth}")
    scorer.frozen = [False] * levels
    if losses:
        logger.info(f"Trained edge scorer for {len(losses)} iterations, final loss {losses[-1]:.6f}")
    return TrainingResult(scorer=scorer, layer=layer, losses=losses)


def training_accuracy(ts: TrainingSet, scorer: EdgeScorer, threshold: float = 0.5) -> float:
    """Fraction of labelled edges classified correctly at ``threshold``."""
    correct = 0
    for sample in ts.samples:
        if len(sample.labels):
            predicted = edge_probabilities(sample.features, sample.graph.level, scorer) >= threshold
            correct += int((predicted == sample.labels.astype(bool)).sum())
    return correct / ts.num_edges if ts.num_edges else 0.0
