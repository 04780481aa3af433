"""Segmentation environment: boundary rewards between consecutive segments."""

import logging
from typing import Dict, List, NamedTuple, Sequence as TypingSequence, Tuple

import numpy as np

from ..core.exceptions import DataValidationError, DimensionError
from ..io.mot_files import frame_feature
from ..models.detection import Sequence
from ..models.segmentation import QConfig, Segment

logger = logging.getLogger(__name__)


def cosine_similarity(x: TypingSequence[float], y: TypingSequence[float]) -> float:
    """Cosine of the angle between two vectors; 0 when either has zero norm."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape:
        raise DimensionError("Vectors differ in length", a.shape, b.shape)
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return float(np.clip(np.dot(a, b) / (norm_a * norm_b), -1.0, 1.0))


class StepOutcome(NamedTuple):
    """Result of cutting one segment at the current position."""

    last: int
    next_cut: int
    done: bool
    kappa_first: float
    kappa_last: float


class SegmentationEnv:
    """Frame features of one sequence plus the reward rules of the segmentation task.

    A state is the cut position: the first frame of the segment about to be
    cut. The first-frame reward of a step compares the first frames of the
    current and next segment; the last-frame reward compares the last frames
    of the previous and current segment. Summed over an episode, the two
    streams give the transition rewards of every consecutive segment pair.
    """

    def __init__(self, seq: Sequence, cfg: QConfig):
        self.seq = seq
        self.cfg = cfg
        self.length = seq.length
        self._features: List[np.ndarray] = [np.zeros(seq.feature_dim)]
        self._features.extend(frame_feature(seq, t).array for t in range(1, seq.length + 1))
        self._similarity: Dict[Tuple[int, int], float] = {}

    def similarity(self, t1: int, t2: int) -> float:
        key = (t1, t2) if t1 <= t2 else (t2, t1)
        value = self._similarity.get(key)
        if value is None:
            value = cosine_similarity(self._features[key[0]], self._features[key[1]])
            self._similarity[key] = value
        return value

    def first_half(self, first: int, next_first: int) -> float:
        return (1.0 - self.similarity(first, next_first)) * self.cfg.delta + self.cfg.xi / 2.0

    def last_half(self, last: int, next_last: int) -> float:
        return (1.0 - self.similarity(last, next_last)) * self.cfg.delta + self.cfg.xi / 2.0

    def step(self, cut: int, length: int) -> StepOutcome:
        """Cut [cut, cut + length - 1], clamped to the sequence end."""
        last = min(cut + length - 1, self.length)
        next_cut = last + 1
        done = next_cut > self.length
        kappa_first = 0.0 if done else self.first_half(cut, next_cut)
        kappa_last = 0.0 if cut == 1 else self.last_half(cut - 1, last)
        return StepOutcome(last, next_cut, done, kappa_first, kappa_last)

    def score(self, segments: TypingSequence[Segment]) -> float:
        """Sum of both reward halves over all steps, divided by the segment count."""
        if not segments:
            return 0.0
        kappa_sum = 0.0
        for segment in segments:
            outcome = self.step(segment.first, segment.length)
            kappa_sum = kappa_sum + outcome.kappa_first + outcome.kappa_last
        return kappa_sum / len(segments)


def segment_reward(seg_i: Segment, seg_next: Segment, seq: Sequence, cfg: QConfig) -> Tuple[float, float]:
    """First-frame and last-frame halves of the reward for one segment transition."""
    if seg_next.first != seg_i.last + 1:
        raise DataValidationError(f"Segments [{seg_i.first},{seg_i.last}] and "
                                  f"[{seg_next.first},{seg_next.last}] are not consecutive")
    env = SegmentationEnv(seq, cfg)
    return env.first_half(seg_i.first, seg_next.first), env.last_half(seg_i.last, seg_next.last)


def score_segments(seq: Sequence, segments: TypingSequence[Segment], cfg: QConfig) -> float:
    """Recompute the normalised kappa_sum of a tiling."""
    return SegmentationEnv(seq, cfg).score(segments)
