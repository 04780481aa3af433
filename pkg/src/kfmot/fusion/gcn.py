"""Neighbour averaging and single-layer graph-convolution fusion, with exact gradients."""

from typing import Sequence as TypingSequence, Tuple

import numpy as np

from ..core.exceptions import DimensionError
from ..models.fusion import Activation, FrameGraph, FusionConfig, GcnLayer
from .graph import propagation_matrix


def average_fusion(f_v: TypingSequence[float], neighbor_feats: TypingSequence[TypingSequence[float]],
                   cfg: FusionConfig) -> np.ndarray:
    """a * f_v + b * mean(neighbours); f_v unchanged without neighbours."""
    f_v = np.asarray(f_v, dtype=float)
    if len(neighbor_feats) == 0 or cfg.b == 0.0:
        return f_v.copy()
    neighbors = np.asarray(neighbor_feats, dtype=float)
    if neighbors.ndim != 2 or neighbors.shape[1] != f_v.shape[0]:
        raise DimensionError("Neighbour features differ in length from the node feature",
                             f_v.shape[0], neighbors.shape[-1] if neighbors.ndim else None)
    return cfg.a * f_v + cfg.b * neighbors.mean(axis=0)


def average_fusion_matrix(H: np.ndarray, graph: FrameGraph, cfg: FusionConfig) -> np.ndarray:
    """Row-wise :func:`average_fusion` over a whole frame."""
    H = _check_rows(H, graph)
    return np.array([average_fusion(H[i], H[list(adjacent)], cfg) for i, adjacent in enumerate(graph.neighbors)],
                    dtype=float).reshape(H.shape)


def _check_rows(H: np.ndarray, graph: FrameGraph) -> np.ndarray:
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != graph.num_nodes:
        raise DimensionError("Feature rows do not match graph nodes", graph.num_nodes, H.shape)
    return H


def _activate(Z: np.ndarray, activation: Activation) -> np.ndarray:
    if activation == Activation.RELU:
        return np.maximum(Z, 0.0)
    return Z


def _activation_slope(Z: np.ndarray, activation: Activation) -> np.ndarray:
    if activation == Activation.RELU:
        return (Z > 0.0).astype(float)
    return np.ones_like(Z)


def _check_dim(H: np.ndarray, layer: GcnLayer) -> None:
    if H.shape[1] != layer.dim:
        raise DimensionError("Feature length does not match GCN weights", layer.dim, H.shape[1])


def gcn_layer(H: np.ndarray, graph: FrameGraph, layer: GcnLayer) -> np.ndarray:
    """sigma(S H W)."""
    H = _check_rows(H, graph)
    _check_dim(H, layer)
    return _activate(propagation_matrix(graph) @ H @ layer.W, layer.activation)


def propagated_fusion(S: np.ndarray, H: np.ndarray, layer: GcnLayer, cfg: FusionConfig) -> np.ndarray:
    """:func:`gcn_fusion` with a precomputed propagation matrix."""
    if cfg.b == 0.0:
        return H.copy()
    return cfg.a * H + cfg.b * _activate(S @ H @ layer.W, layer.activation)


def propagated_gradients(S: np.ndarray, H: np.ndarray, layer: GcnLayer, upstream: np.ndarray,
                         cfg: FusionConfig) -> Tuple[np.ndarray, np.ndarray]:
    """:func:`gcn_gradients` with a precomputed propagation matrix."""
    SH = S @ H
    G = cfg.b * upstream * _activation_slope(SH @ layer.W, layer.activation)
    grad_W = SH.T @ G
    grad_H = cfg.a * upstream + S.T @ G @ layer.W.T
    return grad_W, grad_H


def gcn_fusion(graph: FrameGraph, H: np.ndarray, layer: GcnLayer, cfg: FusionConfig) -> np.ndarray:
    """a * H + b * gcn_layer(H)."""
    H = _check_rows(H, graph)
    _check_dim(H, layer)
    return propagated_fusion(propagation_matrix(graph), H, layer, cfg)


def gcn_gradients(H: np.ndarray, graph: FrameGraph, layer: GcnLayer, upstream: np.ndarray,
                  cfg: FusionConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients of <upstream, gcn_fusion(H)> with respect to W and H."""
    H = _check_rows(H, graph)
    _check_dim(H, layer)
    upstream = np.asarray(upstream, dtype=float)
    if upstream.shape != H.shape:
        raise DimensionError("Upstream gradient shape differs from the features", H.shape, upstream.shape)
    return propagated_gradients(propagation_matrix(graph), H, layer, upstream, cfg)
