"""Key-frame segmentation: Q-learning agent, reward environment and exhaustive oracle."""

from .agent import KeyFrameTrainer, episode_rollout, greedy_strategy, select_action, train_kfe, update_q
from .environment import SegmentationEnv, cosine_similarity, score_segments, segment_reward
from .files import read_strategy, write_strategy
from .oracle import enumerate_segmentations, equal_segmentation, oracle_best_segmentation

__all__ = [
    "KeyFrameTrainer",
    "SegmentationEnv",
    "cosine_similarity",
    "segment_reward",
    "score_segments",
    "select_action",
    "update_q",
    "episode_rollout",
    "greedy_strategy",
    "train_kfe",
    "enumerate_segmentations",
    "oracle_best_segmentation",
    "equal_segmentation",
    "write_strategy",
    "read_strategy",
]
