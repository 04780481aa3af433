"""Intra-frame fusion models."""

from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Activation(str, Enum):
    IDENTITY = "identity"
    RELU = "relu"


class FusionMode(str, Enum):
    """How a detection's feature is blended with its neighbours."""

    NONE = "none"
    AVERAGE = "average"
    GCN = "gcn"


class FusionConfig(BaseModel):
    """Fusion ratio, neighbour count and mode."""

    a: float = Field(default=0.4, ge=0.0, le=1.0, description="Weight of the detection's own feature")
    m: int = Field(default=4, ge=1, description="Neighbour count per detection")
    mode: FusionMode = Field(default=FusionMode.GCN, description="Fusion operator")
    activation: Activation = Field(default=Activation.IDENTITY, description="GCN activation")

    @property
    def b(self) -> float:
        """Neighbour weight, b = 1 - a."""
        return 1.0 - self.a


class FrameGraph(BaseModel):
    """m-nearest-neighbour graph over the detections of one frame."""

    model_config = ConfigDict(frozen=True)

    frame: int = Field(default=1, ge=1)
    num_nodes: int = Field(..., ge=0)
    m: int = Field(..., ge=1)
    neighbors: Tuple[Tuple[int, ...], ...] = Field(..., description="Neighbour ordinals per node")

    @model_validator(mode="after")
    def validate_neighbors(self) -> "FrameGraph":
        if len(self.neighbors) != self.num_nodes:
            raise ValueError(f"{len(self.neighbors)} neighbour lists for {self.num_nodes} nodes")
        expected = min(self.m, max(self.num_nodes - 1, 0))
        for node, adjacent in enumerate(self.neighbors):
            if len(adjacent) != expected:
                raise ValueError(f"Node {node} has {len(adjacent)} neighbours, expected {expected}")
            if node in adjacent:
                raise ValueError(f"Node {node} lists itself as a neighbour")
            if len(set(adjacent)) != len(adjacent):
                raise ValueError(f"Node {node} has duplicate neighbours")
            if any(not 0 <= other < self.num_nodes for other in adjacent):
                raise ValueError(f"Node {node} has a neighbour outside the frame")
        return self

    def adjacency(self) -> np.ndarray:
        """Symmetrised 0/1 adjacency matrix."""
        matrix = np.zeros((self.num_nodes, self.num_nodes))
        for node, adjacent in enumerate(self.neighbors):
            for other in adjacent:
                matrix[node, other] = 1.0
                matrix[other, node] = 1.0
        return matrix


class GcnLayer(BaseModel):
    """Single graph-convolution layer: D x D weights and an activation."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    W: np.ndarray
    activation: Activation = Field(default=Activation.IDENTITY)

    @field_validator("W")
    @classmethod
    def validate_weights(cls, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"GCN weights must be square, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("GCN weights must be finite")
        return v

    @property
    def dim(self) -> int:
        return int(self.W.shape[0])

    @classmethod
    def identity(cls, dim: int, activation: Activation = Activation.IDENTITY) -> "GcnLayer":
        return cls(W=np.eye(dim), activation=activation)

    @classmethod
    def initialize(cls, dim: int, seed: int = 0, activation: Activation = Activation.IDENTITY) -> "GcnLayer":
        """Identity plus uniform noise in [-0.01, 0.01]."""
        rng = np.random.default_rng(seed)
        return cls(W=np.eye(dim) + rng.uniform(-0.01, 0.01, size=(dim, dim)), activation=activation)

    def with_weights(self, W: np.ndarray) -> "GcnLayer":
        return GcnLayer(W=W, activation=self.activation)
