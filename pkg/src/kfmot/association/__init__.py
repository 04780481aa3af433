"""Hierarchical tracklet association with a focal-loss-trained edge scorer."""

from .files import read_scorer, write_scorer
from .graph import build_level_graph, edge_feature
from .loss import focal_loss, focal_loss_grad
from .merge import match_and_merge, select_links
from .pipeline import track_sequence
from .scorer import score_edges
from .training import (
    TrainingResult,
    TrainingSet,
    build_training_set,
    label_detections,
    loss_and_gradients,
    train_edge_scorer,
)
from .tracklets import build_tracklets

__all__ = [
    "build_tracklets",
    "build_level_graph",
    "edge_feature",
    "score_edges",
    "focal_loss",
    "focal_loss_grad",
    "select_links",
    "match_and_merge",
    "label_detections",
    "build_training_set",
    "loss_and_gradients",
    "train_edge_scorer",
    "TrainingSet",
    "TrainingResult",
    "track_sequence",
    "read_scorer",
    "write_scorer",
]
