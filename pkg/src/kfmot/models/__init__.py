"""Data models for the tracking toolkit."""

from .association import (
    EdgeFeature,
    EdgeScorer,
    FocalLossConfig,
    LevelGraph,
    TrackerConfig,
    Tracklet,
    TrainingSchedule,
)
from .config import Config, LoggingConfig, RunConfig, Settings
from .detection import Detection, FeatureTable, FrameFeature, Sequence, TrackBox, TrackSet
from .fusion import Activation, FrameGraph, FusionConfig, FusionMode, GcnLayer
from .metrics import AlphaScore, MetricReport
from .scenario import NoiseConfig, ScenarioConfig, ScenarioKind, SynthOutput
from .segmentation import QConfig, QTablePair, QUpdateTrace, Segment, SegmentationStrategy

__all__ = [
    "Detection",
    "Sequence",
    "TrackBox",
    "TrackSet",
    "FrameFeature",
    "FeatureTable",
    "QConfig",
    "Segment",
    "SegmentationStrategy",
    "QTablePair",
    "QUpdateTrace",
    "FusionConfig",
    "FusionMode",
    "Activation",
    "FrameGraph",
    "GcnLayer",
    "Tracklet",
    "EdgeFeature",
    "LevelGraph",
    "EdgeScorer",
    "FocalLossConfig",
    "TrainingSchedule",
    "TrackerConfig",
    "MetricReport",
    "AlphaScore",
    "ScenarioKind",
    "ScenarioConfig",
    "NoiseConfig",
    "SynthOutput",
    "Config",
    "LoggingConfig",
    "RunConfig",
    "Settings",
]
