"""Apply intra-frame fusion to whole sequences."""

import logging
from typing import Dict, Optional

import numpy as np

from ..models.detection import Sequence
from ..models.fusion import FusionConfig, FusionMode, GcnLayer
from .gcn import average_fusion_matrix, gcn_fusion
from .graph import graph_from_boxes

logger = logging.getLogger(__name__)


def default_layer(dim: int, cfg: FusionConfig) -> GcnLayer:
    return GcnLayer.identity(dim, cfg.activation)


def fuse_frame(H: np.ndarray, boxes: np.ndarray, cfg: FusionConfig, layer: Optional[GcnLayer] = None,
               frame: int = 1) -> np.ndarray:
    """Fused (N, D) features of one frame."""
    if cfg.mode == FusionMode.NONE or len(H) == 0:
        return np.array(H, dtype=float)
    graph = graph_from_boxes(boxes, cfg.m, frame)
    if cfg.mode == FusionMode.AVERAGE:
        return average_fusion_matrix(H, graph, cfg)
    if layer is None:
        layer = default_layer(np.shape(H)[1], cfg)
    return gcn_fusion(graph, H, layer, cfg)


def fuse_sequence(seq: Sequence, cfg: FusionConfig, layer: Optional[GcnLayer] = None) -> Sequence:
    """Replace every detection feature by its fused feature."""
    if cfg.mode == FusionMode.NONE:
        return seq
    if cfg.mode == FusionMode.GCN and layer is None:
        layer = default_layer(seq.feature_dim, cfg)
    fused: Dict[int, np.ndarray] = {}
    for frame, detections in seq.frames.items():
        if detections:
            fused[frame] = fuse_frame(seq.feature_matrix(frame), seq.box_matrix(frame), cfg, layer, frame)
    logger.debug(f"Fused {seq.num_detections} detections of {seq.name} ({cfg.mode.value}, a={cfg.a}, m={cfg.m})")
    return seq.with_features(fused, seq.feature_dim)
