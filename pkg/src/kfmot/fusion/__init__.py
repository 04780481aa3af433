"""Intra-frame feature fusion over nearest-neighbour detection graphs."""

from .files import read_gcn_weights, write_gcn_weights
from .fuse import fuse_frame, fuse_sequence
from .gcn import average_fusion, average_fusion_matrix, gcn_fusion, gcn_gradients, gcn_layer
from .graph import build_frame_graph, graph_from_boxes, propagation_matrix

__all__ = [
    "build_frame_graph",
    "graph_from_boxes",
    "propagation_matrix",
    "average_fusion",
    "average_fusion_matrix",
    "gcn_layer",
    "gcn_fusion",
    "gcn_gradients",
    "fuse_frame",
    "fuse_sequence",
    "read_gcn_weights",
    "write_gcn_weights",
]
