"""Per-frame nearest-neighbour graphs over detections."""

from typing import List

import numpy as np

from ..core.exceptions import DimensionError
from ..models.detection import Detection
from ..models.fusion import FrameGraph


def centers(boxes: np.ndarray) -> np.ndarray:
    boxes = np.asarray(boxes, dtype=float).reshape(-1, 4)
    return boxes[:, :2] + boxes[:, 2:] / 2.0


def graph_from_boxes(boxes: np.ndarray, m: int, frame: int = 1) -> FrameGraph:
    """Link every box to the ``m`` others with the nearest centres.

    Ties go to the smaller ordinal; ``m`` is clamped to N - 1.
    """
    points = centers(boxes)
    count = len(points)
    k = min(m, max(count - 1, 0))
    if k == 0:
        return FrameGraph(frame=frame, num_nodes=count, m=m, neighbors=tuple(() for _ in range(count)))
    distances = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    neighbors = []
    for node in range(count):
        order = np.argsort(distances[node], kind="stable")
        neighbors.append(tuple(int(other) for other in order if other != node)[:k])
    return FrameGraph(frame=frame, num_nodes=count, m=m, neighbors=tuple(neighbors))


def build_frame_graph(dets: List[Detection], m: int) -> FrameGraph:
    if m < 1:
        raise DimensionError(f"Neighbour count must be positive, got {m}", ">= 1", m)
    frame = dets[0].frame if dets else 1
    boxes = np.array([d.box for d in dets], dtype=float).reshape(len(dets), 4)
    return graph_from_boxes(boxes, m, frame)


def propagation_matrix(graph: FrameGraph) -> np.ndarray:
    """S = D^-1/2 (A + I) D^-1/2 over the symmetrised adjacency A."""
    augmented = graph.adjacency() + np.eye(graph.num_nodes)
    scale = 1.0 / np.sqrt(augmented.sum(axis=1))
    return scale[:, None] * augmented * scale[None, :]
