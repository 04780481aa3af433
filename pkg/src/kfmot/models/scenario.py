"""Synthetic scenario models."""

from enum import Enum
from typing import List, Tuple

from pydantic import BaseModel, Field, model_validator

from .detection import Sequence, TrackSet


class ScenarioKind(str, Enum):
    OCCLUSION = "occlusion"
    LOOKALIKE = "lookalike"
    CROSSING = "crossing"
    RANDOM_WALK = "random_walk"


class NoiseConfig(BaseModel):
    """Detection noise applied on top of ground truth."""

    box_noise: float = Field(default=0.0, ge=0.0, description="Gaussian sigma on box coordinates, pixels")
    feature_noise: float = Field(default=0.0, ge=0.0, description="Gaussian sigma on feature entries")
    miss_rate: float = Field(default=0.0, ge=0.0, lt=1.0, description="Probability of dropping a box")


class ScenarioConfig(BaseModel):
    """Seeded description of one synthetic sequence."""

    kind: ScenarioKind = Field(default=ScenarioKind.OCCLUSION)
    num_objects: int = Field(default=1, ge=1)
    length: int = Field(default=60, ge=1, description="Frame count LN")
    occlusion_gaps: List[Tuple[int, int, int]] = Field(
        default_factory=list, description="(object, first occluded frame, gap length), objects 1-based"
    )
    lookalike_pairs: List[Tuple[int, int]] = Field(default_factory=list, description="Objects sharing a base feature")
    feature_noise: float = Field(default=0.0, ge=0.0)
    box_noise: float = Field(default=0.0, ge=0.0)
    miss_rate: float = Field(default=0.0, ge=0.0, lt=1.0)
    motion_jitter: float = Field(default=0.0, ge=0.0, description="Per-frame Gaussian jitter on the true motion")
    feature_dim: int = Field(default=16, ge=2)
    seed: int = Field(default=0)

    @model_validator(mode="after")
    def validate_scenario(self) -> "ScenarioConfig":
        occluded = {}
        for obj, start, gap in self.occlusion_gaps:
            if not 1 <= obj <= self.num_objects:
                raise ValueError(f"Occlusion gap names object {obj}, only {self.num_objects} objects")
            if gap < 1 or start < 1 or start + gap - 1 > self.length:
                raise ValueError(f"Occlusion gap ({obj},{start},{gap}) outside [1, {self.length}]")
            frames = set(range(start, start + gap))
            if occluded.get(obj, set()) & frames:
                raise ValueError(f"Overlapping occlusion gaps for object {obj}")
            occluded.setdefault(obj, set()).update(frames)
        paired = set()
        for i, j in self.lookalike_pairs:
            if i == j or not (1 <= i <= self.num_objects and 1 <= j <= self.num_objects):
                raise ValueError(f"Invalid lookalike pair ({i},{j})")
            if {i, j} & paired:
                raise ValueError(f"Lookalike pair ({i},{j}) reuses an object of another pair")
            paired.update((i, j))
        return self

    @property
    def noise(self) -> NoiseConfig:
        return NoiseConfig(box_noise=self.box_noise, feature_noise=self.feature_noise, miss_rate=self.miss_rate)


class SynthOutput(BaseModel):
    """Ground truth, degraded detections and the scenario that produced them."""

    gt: TrackSet
    detections: Sequence
    scenario: ScenarioConfig
