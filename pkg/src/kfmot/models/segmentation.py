"""Key-frame segmentation models."""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class QConfig(BaseModel):
    """Hyperparameters of the key-frame Q-learning agent."""

    epsilon: float = Field(default=0.1, ge=0.0, le=1.0, description="Exploration rate")
    learn_rate: float = Field(default=0.1, gt=0.0, le=1.0, description="Q-table learning rate q")
    discount: float = Field(default=0.99, ge=0.0, lt=1.0, description="Discount factor alpha")
    delta: float = Field(default=1.0, description="Reward scale")
    xi: float = Field(default=0.0, description="Reward offset per transition")
    min_len: int = Field(default=1, ge=1, description="Shortest segment u")
    max_len: int = Field(default=8, ge=1, description="Longest segment n")
    episodes: Optional[int] = Field(default=None, ge=1, description="Episode count, None for the default budget")
    episode_cap: int = Field(default=50000, ge=1, description="Upper bound on the default episode count")
    seed: int = Field(default=0, description="Seed of the training RNG stream")
    segment_baseline: bool = Field(
        default=True, description="Subtract the best normalised score per segment from learning rewards"
    )

    @model_validator(mode="after")
    def validate_lengths(self) -> "QConfig":
        if self.min_len > self.max_len:
            raise ValueError(f"min_len {self.min_len} exceeds max_len {self.max_len}")
        return self

    @property
    def num_actions(self) -> int:
        return self.max_len - self.min_len + 1

    def episode_budget(self, length: int) -> int:
        """Explicit episode count, or (LN-u)*(LN-n)*100 clamped to [1, episode_cap].

        n is capped at LN-1 so short sequences keep a usable budget.
        """
        if self.episodes is not None:
            return self.episodes
        longest = min(self.max_len, max(length - 1, self.min_len))
        default = (length - self.min_len) * (length - longest) * 100
        return max(1, min(self.episode_cap, default))


class Segment(BaseModel):
    """Contiguous run of frames [first, last]."""

    model_config = ConfigDict(frozen=True)

    first: int = Field(..., ge=1)
    last: int = Field(..., ge=1)

    @model_validator(mode="after")
    def validate_order(self) -> "Segment":
        if self.first > self.last:
            raise ValueError(f"Segment first {self.first} after last {self.last}")
        return self

    @property
    def length(self) -> int:
        return self.last - self.first + 1


class SegmentationStrategy(BaseModel):
    """Ordered tiling of [1, LN] with its normalised reward score."""

    segments: List[Segment] = Field(default_factory=list)
    score: float = Field(default=0.0, description="Normalised kappa_sum")

    @model_validator(mode="after")
    def validate_tiling(self) -> "SegmentationStrategy":
        if self.segments and self.segments[0].first != 1:
            raise ValueError("Segmentation must start at frame 1")
        for previous, current in zip(self.segments, self.segments[1:]):
            if current.first != previous.last + 1:
                raise ValueError(f"Segment starting at {current.first} does not follow {previous.last}")
        return self

    @property
    def length(self) -> int:
        return self.segments[-1].last if self.segments else 0

    @property
    def lengths(self) -> Tuple[int, ...]:
        return tuple(segment.length for segment in self.segments)

    @property
    def max_segment_length(self) -> int:
        return max(self.lengths, default=1)

    @classmethod
    def from_lengths(cls, lengths: Tuple[int, ...], score: float = 0.0) -> "SegmentationStrategy":
        segments = []
        first = 1
        for length in lengths:
            segments.append(Segment(first=first, last=first + length - 1))
            first += length
        return cls(segments=segments, score=score)


class QTablePair(BaseModel):
    """First-frame and last-frame Q-tables indexed by [cut position, action - u]."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    min_len: int = Field(..., ge=1)
    qt_first: np.ndarray
    qt_last: np.ndarray

    @classmethod
    def zeros(cls, length: int, cfg: QConfig) -> "QTablePair":
        # states 1..LN are cut positions; LN + 1 is terminal and stays zero
        shape = (length + 2, cfg.num_actions)
        return cls(min_len=cfg.min_len, qt_first=np.zeros(shape), qt_last=np.zeros(shape))

    def joint_row(self, state: int) -> np.ndarray:
        return self.qt_first[state] + self.qt_last[state]


class QUpdateTrace(BaseModel):
    """Record of one temporal-difference update."""

    model_config = ConfigDict(frozen=True)

    state: int
    action: int
    reward: float
    next_state: int
    td_term: float = Field(..., description="lambda = reward + discount * max Q(next) - Q(state, action)")
