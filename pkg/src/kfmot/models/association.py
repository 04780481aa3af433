"""Tracklet association models: tracklets, level graphs, edge scorer and training settings."""

from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.exceptions import ConfigurationError
from .detection import Box

EDGE_FEATURE_NAMES = ("w_app", "w_gap", "w_dist", "w_iou")


class TrackletMember(NamedTuple):
    """Reference to one detection: frame, ordinal within the frame, box and confidence."""

    frame: int
    ordinal: int
    box: Box
    confidence: float


class Tracklet(BaseModel):
    """Short trajectory fragment with pooled appearance and constant-velocity motion."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    track_id: int = Field(..., description="Tracklet id, unique within a level")
    members: List[TrackletMember] = Field(..., min_length=1)
    feature: np.ndarray = Field(..., description="Mean of the member features")
    velocity: Tuple[float, float] = Field(default=(0.0, 0.0), description="Centre velocity in pixels per frame")

    @model_validator(mode="after")
    def validate_members(self) -> "Tracklet":
        for previous, current in zip(self.members, self.members[1:]):
            if current.frame <= previous.frame:
                raise ValueError(f"Tracklet {self.track_id} frames not strictly increasing at {current.frame}")
        return self

    @property
    def first_frame(self) -> int:
        return self.members[0].frame

    @property
    def last_frame(self) -> int:
        return self.members[-1].frame

    @property
    def span(self) -> Tuple[int, int]:
        return self.first_frame, self.last_frame

    @property
    def frames(self) -> List[int]:
        return [member.frame for member in self.members]

    def predict_box(self, frame: int) -> Box:
        """Extrapolate the last box to ``frame`` with the constant-velocity model."""
        left, top, width, height = self.members[-1].box
        steps = frame - self.last_frame
        return left + self.velocity[0] * steps, top + self.velocity[1] * steps, width, height


class EdgeFeature(BaseModel):
    """Appearance and motion cues of one candidate edge."""

    model_config = ConfigDict(frozen=True)

    appearance_sim: float = Field(..., ge=-1.0, le=1.0)
    time_gap: int = Field(..., ge=1)
    center_dist: float = Field(..., ge=0.0, description="Extrapolation error over mean box height")
    iou_pred: float = Field(..., ge=0.0, le=1.0)

    def vector(self, window: int) -> np.ndarray:
        """Scorer input: (sim, gap / window, centre distance, predicted IoU)."""
        return np.array([self.appearance_sim, self.time_gap / window, self.center_dist, self.iou_pred])


class CandidateEdge(NamedTuple):
    source: int
    target: int
    feature: EdgeFeature


class LevelGraph(BaseModel):
    """Tracklets of one hierarchy level and the candidate links between them."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    level: int = Field(..., ge=1)
    window: int = Field(..., ge=1, description="Largest admissible time gap")
    nodes: List[Tracklet] = Field(default_factory=list)
    edges: List[CandidateEdge] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_edges(self) -> "LevelGraph":
        for edge in self.edges:
            if edge.source == edge.target:
                raise ValueError(f"Self edge on node {edge.source}")
            if self.nodes[edge.source].last_frame >= self.nodes[edge.target].first_frame:
                raise ValueError(f"Edge {edge.source}->{edge.target} joins overlapping tracklets")
        return self

    def feature_matrix(self) -> np.ndarray:
        """(E, 4) scorer inputs in edge order."""
        if not self.edges:
            return np.zeros((0, len(EDGE_FEATURE_NAMES)))
        return np.stack([edge.feature.vector(self.window) for edge in self.edges])


class EdgeScorer(BaseModel):
    """Per-level logistic edge classifier: 4 feature weights plus a bias per level.

    Weights act on standardised edge inputs ``(x - feature_mean) / feature_std``.
    The identity statistics make them act on the raw inputs.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: np.ndarray = Field(..., description="(levels, 5) array, last column is the bias")
    frozen: List[bool] = Field(default_factory=list)
    feature_mean: np.ndarray = Field(default_factory=lambda: np.zeros(len(EDGE_FEATURE_NAMES)))
    feature_std: np.ndarray = Field(default_factory=lambda: np.ones(len(EDGE_FEATURE_NAMES)))

    @field_validator("weights")
    @classmethod
    def validate_weights(cls, v: np.ndarray) -> np.ndarray:
        v = np.array(v, dtype=float)
        if v.ndim != 2 or v.shape[1] != len(EDGE_FEATURE_NAMES) + 1:
            raise ValueError(f"Scorer weights must have shape (levels, 5), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("Scorer weights must be finite")
        return v

    @field_validator("feature_mean", "feature_std")
    @classmethod
    def validate_statistics(cls, v: np.ndarray) -> np.ndarray:
        v = np.array(v, dtype=float)
        if v.shape != (len(EDGE_FEATURE_NAMES),) or not np.all(np.isfinite(v)):
            raise ValueError(f"Edge feature statistics must be 4 finite values, got shape {v.shape}")
        return v

    @model_validator(mode="after")
    def validate_frozen(self) -> "EdgeScorer":
        if not self.frozen:
            self.frozen = [False] * self.levels
        if len(self.frozen) != self.levels:
            raise ValueError(f"{len(self.frozen)} frozen flags for {self.levels} levels")
        if np.any(self.feature_std <= 0.0):
            raise ValueError("Edge feature deviations must be positive")
        return self

    @property
    def levels(self) -> int:
        return int(self.weights.shape[0])

    def level_weights(self, level: int) -> np.ndarray:
        if not 1 <= level <= self.levels:
            raise ConfigurationError(f"Edge scorer has no weights for level {level}", key="levels",
                                     details={"level": level, "levels": self.levels})
        return self.weights[level - 1]

    def standardize(self, features: np.ndarray) -> np.ndarray:
        """(E, 4) raw edge inputs in the units the weights expect."""
        return (np.asarray(features, dtype=float) - self.feature_mean) / self.feature_std

    def raw_weights(self) -> np.ndarray:
        """Weights with the statistics folded in, acting on raw edge inputs."""
        raw = self.weights.copy()
        raw[:, :-1] = self.weights[:, :-1] / self.feature_std
        raw[:, -1] = self.weights[:, -1] - raw[:, :-1] @ self.feature_mean
        return raw

    def with_standardization(self, mean: np.ndarray, std: np.ndarray) -> "EdgeScorer":
        """Same edge scores expressed against new statistics."""
        raw = self.raw_weights()
        weights = raw.copy()
        weights[:, :-1] = raw[:, :-1] * std
        weights[:, -1] = raw[:, -1] + raw[:, :-1] @ mean
        return EdgeScorer(weights=weights, frozen=list(self.frozen), feature_mean=mean, feature_std=std)

    def copy(self) -> "EdgeScorer":
        return EdgeScorer(weights=self.weights.copy(), frozen=list(self.frozen),
                          feature_mean=self.feature_mean.copy(), feature_std=self.feature_std.copy())

    @classmethod
    def zeros(cls, levels: int) -> "EdgeScorer":
        return cls(weights=np.zeros((levels, len(EDGE_FEATURE_NAMES) + 1)))

    @classmethod
    def prior(cls, levels: int) -> "EdgeScorer":
        """Hand-set weights that favour similar, close, overlapping successors."""
        row = np.array([4.0, -1.0, -1.0, 2.0, -2.0])
        return cls(weights=np.tile(row, (levels, 1)))


class FocalLossConfig(BaseModel):
    """Focusing and balancing parameters of the focal loss."""

    gamma: float = Field(default=2.0, ge=0.0)
    alpha_f: float = Field(default=0.25, gt=0.0, lt=1.0)


class TrainingSchedule(BaseModel):
    """Gradient-descent settings of the edge scorer."""

    iterations: int = Field(default=2000, ge=0)
    learning_rate: float = Field(default=1e-2, gt=0.0)
    unfreeze_every: int = Field(default=500, ge=1, description="Iterations before the next level unfreezes")
    seed: int = Field(default=0)

    def depth(self, iteration: int, levels: int) -> int:
        """Number of trainable levels at a given iteration."""
        return min(levels, 1 + iteration // self.unfreeze_every)


class TrackerConfig(BaseModel):
    """Hierarchy depth, windows and thresholds of the association stage."""

    levels: int = Field(default=3, ge=1)
    base_window: Optional[int] = Field(default=None, ge=1, description="Level-1 window, None for max segment length")
    max_candidates: int = Field(default=3, ge=1, description="Candidate successors K per tracklet")
    iou_threshold: float = Field(default=0.3, ge=0.0, le=1.0, description="Base-level frame matching IoU")
    merge_threshold: float = Field(default=0.5, ge=0.0, le=1.0, description="Minimum edge score to merge")
    fuse_every_level: bool = Field(default=False, description="Re-apply intra-frame fusion before each level")

    def window(self, level: int, max_segment_length: int) -> int:
        base = self.base_window if self.base_window is not None else max_segment_length
        return max(1, base) * 2 ** (level - 1)
