"""Tracking metrics: HOTA, CLEAR-MOT and identity scores."""

from .clear import ClearCounts, compute_mota
from .hota import HotaResult, compute_hota
from .identity import IdentityCounts, compute_idf1, identity_counts
from .matching import FrameMatch, iou, iou_matrix, match_frame
from .report import combine_reports, evaluate, write_report_csv

__all__ = [
    "iou",
    "iou_matrix",
    "match_frame",
    "FrameMatch",
    "compute_mota",
    "ClearCounts",
    "compute_idf1",
    "identity_counts",
    "IdentityCounts",
    "compute_hota",
    "HotaResult",
    "evaluate",
    "combine_reports",
    "write_report_csv",
]
