"""Detection, sequence and trajectory models."""

import math
from typing import Dict, Iterator, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Box = Tuple[float, float, float, float]


def check_box(v: Box) -> Box:
    """Require finite coordinates and a positive extent."""
    if not all(math.isfinite(c) for c in v):
        raise ValueError("Box coordinates must be finite")
    if v[2] <= 0 or v[3] <= 0:
        raise ValueError(f"Box width and height must be positive, got {v[2]}x{v[3]}")
    return v


def detection_sort_key(detection: "Detection") -> Tuple[float, ...]:
    """Canonical within-frame order; defines the ordinal used by feature files."""
    return (*detection.box, detection.confidence, float(detection.det_id))


class Detection(BaseModel):
    """One bounding box in one frame, with its appearance feature."""

    model_config = ConfigDict(frozen=True)

    frame: int = Field(..., ge=1, description="1-based frame index")
    det_id: int = Field(default=-1, description="Identity, -1 when unassigned")
    box: Box = Field(..., description="(left, top, width, height) in pixels")
    confidence: float = Field(default=1.0, ge=0.0, le=1.0, description="Detector confidence")
    feature: Tuple[float, ...] = Field(default=(), description="Appearance feature of length D")

    @field_validator("box")
    @classmethod
    def validate_box(cls, v: Box) -> Box:
        return check_box(v)

    @property
    def center(self) -> Tuple[float, float]:
        left, top, width, height = self.box
        return left + width / 2.0, top + height / 2.0


class Sequence(BaseModel):
    """All detections of one video, grouped by frame."""

    name: str = Field(default="sequence", description="Sequence name")
    length: int = Field(default=0, ge=0, description="Total frame count LN")
    feature_dim: int = Field(default=0, ge=0, description="Feature length D, 0 before features are attached")
    frames: Dict[int, List[Detection]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_frames(self) -> "Sequence":
        """Frame keys must lie in [1, LN] and every feature must have length D."""
        for frame, detections in self.frames.items():
            if not 1 <= frame <= self.length:
                raise ValueError(f"Frame {frame} outside [1, {self.length}]")
            for detection in detections:
                if detection.frame != frame:
                    raise ValueError(f"Detection of frame {detection.frame} filed under frame {frame}")
                if len(detection.feature) != self.feature_dim:
                    raise ValueError(
                        f"Feature of length {len(detection.feature)} in frame {frame}, expected {self.feature_dim}"
                    )
        return self

    def detections(self, frame: int) -> List[Detection]:
        """Detections of one frame in canonical order (empty list if none)."""
        return self.frames.get(frame, [])

    def iter_frames(self) -> Iterator[Tuple[int, List[Detection]]]:
        for frame in range(1, self.length + 1):
            yield frame, self.detections(frame)

    @property
    def num_detections(self) -> int:
        return sum(len(dets) for dets in self.frames.values())

    def feature_matrix(self, frame: int) -> np.ndarray:
        """Stack the features of one frame into an (N, D) array."""
        detections = self.detections(frame)
        if not detections:
            return np.zeros((0, self.feature_dim))
        return np.array([d.feature for d in detections], dtype=float).reshape(len(detections), self.feature_dim)

    def box_matrix(self, frame: int) -> np.ndarray:
        detections = self.detections(frame)
        return np.array([d.box for d in detections], dtype=float).reshape(len(detections), 4)

    def with_features(self, features: Dict[int, np.ndarray], feature_dim: int) -> "Sequence":
        """Return a copy whose detection features are replaced frame by frame.

        ``features`` must hold an (N, feature_dim) matrix for every non-empty frame.
        """
        frames: Dict[int, List[Detection]] = {}
        for frame, detections in self.frames.items():
            matrix = features[frame]
            frames[frame] = [
                d.model_copy(update={"feature": tuple(float(x) for x in row)})
                for d, row in zip(detections, matrix)
            ]
        return Sequence(name=self.name, length=self.length, feature_dim=feature_dim, frames=frames)


class FrameFeature(BaseModel):
    """Pooled appearance feature of a whole frame."""

    model_config = ConfigDict(frozen=True)

    frame: int = Field(..., ge=1)
    vector: Tuple[float, ...] = Field(..., description="D reals")

    @field_validator("vector")
    @classmethod
    def validate_vector(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if not all(math.isfinite(x) for x in v):
            raise ValueError("Frame feature must have finite entries")
        return v

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.vector, dtype=float)


class FeatureTable(BaseModel):
    """Parsed feature file: (frame, ordinal) -> D-vector."""

    dim: int = Field(..., ge=1, description="Declared feature length D")
    vectors: Dict[Tuple[int, int], Tuple[float, ...]] = Field(default_factory=dict)


class TrackBox(BaseModel):
    """One box of one trajectory."""

    model_config = ConfigDict(frozen=True)

    frame: int = Field(..., ge=1)
    box: Box
    confidence: float = Field(default=1.0)

    @field_validator("box")
    @classmethod
    def validate_box(cls, v: Box) -> Box:
        return check_box(v)


class TrackSet(BaseModel):
    """Trajectories keyed by track id."""

    tracks: Dict[int, List[TrackBox]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_tracks(self) -> "TrackSet":
        """Frames strictly increase within a track, so no id repeats in a frame."""
        for track_id, boxes in self.tracks.items():
            for previous, current in zip(boxes, boxes[1:]):
                if current.frame <= previous.frame:
                    raise ValueError(
                        f"Track {track_id} frames not strictly increasing at frame {current.frame}"
                    )
        return self

    @property
    def num_boxes(self) -> int:
        return sum(len(boxes) for boxes in self.tracks.values())

    def by_frame(self) -> Dict[int, List[Tuple[int, TrackBox]]]:
        """Index the boxes by frame, ids ascending within a frame."""
        index: Dict[int, List[Tuple[int, TrackBox]]] = {}
        for track_id in sorted(self.tracks):
            for entry in self.tracks[track_id]:
                index.setdefault(entry.frame, []).append((track_id, entry))
        return index

    @property
    def last_frame(self) -> int:
        return max((boxes[-1].frame for boxes in self.tracks.values() if boxes), default=0)
