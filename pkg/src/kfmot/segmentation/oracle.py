"""Exhaustive tiling search and the fixed-length baseline."""

import logging
from typing import List, Tuple

from ..core.exceptions import ConfigurationError, SizeError
from ..models.detection import Sequence
from ..models.segmentation import QConfig, SegmentationStrategy
from .environment import SegmentationEnv

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 16


def enumerate_segmentations(length: int, min_len: int, max_len: int) -> List[Tuple[int, ...]]:
    """All segment-length tuples tiling [1, length], in lexicographic order.

    Every segment but the last has a length in [min_len, max_len]; the last
    may be as short as one frame.
    """
    if length > ENUMERATION_LIMIT:
        raise SizeError(length, ENUMERATION_LIMIT)
    tilings: List[Tuple[int, ...]] = []

    def extend(prefix: Tuple[int, ...], remaining: int) -> None:
        for size in range(1, max_len + 1):
            if size > remaining:
                break
            if size == remaining:
                tilings.append(prefix + (size,))
            elif size >= min_len:
                extend(prefix + (size,), remaining - size)

    if length > 0:
        extend((), length)
    return tilings


def oracle_best_segmentation(seq: Sequence, cfg: QConfig) -> Tuple[SegmentationStrategy, float]:
    """Score every tiling; ties keep the lexicographically smallest."""
    env = SegmentationEnv(seq, cfg)
    best: Tuple[int, ...] = ()
    best_score = float("-inf")
    for lengths in enumerate_segmentations(seq.length, cfg.min_len, cfg.max_len):
        score = env.score(SegmentationStrategy.from_lengths(lengths).segments)
        if score > best_score:
            best, best_score = lengths, score
    if not best:
        return SegmentationStrategy(), 0.0
    logger.debug(f"Oracle for {seq.name}: lengths {best}, kappa_sum {best_score}")
    return SegmentationStrategy.from_lengths(best, best_score), best_score


def equal_segmentation(seq: Sequence, length: int, cfg: QConfig) -> SegmentationStrategy:
    """Fixed-length tiling; the final segment takes whatever frames remain."""
    if length < 1:
        raise ConfigurationError(f"Segment length must be positive, got {length}", key="max_len")
    env = SegmentationEnv(seq, cfg)
    sizes = [length] * (seq.length // length)
    if seq.length % length:
        sizes.append(seq.length % length)
    strategy = SegmentationStrategy.from_lengths(tuple(sizes))
    return strategy.model_copy(update={"score": env.score(strategy.segments)})
