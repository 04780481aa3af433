"""Tabular Q-learning agent that cuts a sequence into key-frame segments."""

import logging
import math
from typing import List, Optional, Tuple, Union

import numpy as np

from ..models.detection import Sequence
from ..models.segmentation import QConfig, QTablePair, QUpdateTrace, SegmentationStrategy
from .environment import SegmentationEnv

logger = logging.getLogger(__name__)

SequenceOrEnv = Union[Sequence, SegmentationEnv]


def _env(seq: SequenceOrEnv, cfg: QConfig) -> SegmentationEnv:
    if isinstance(seq, SegmentationEnv):
        return seq
    return SegmentationEnv(seq, cfg)


def select_action(row: np.ndarray, cfg: QConfig, rng: np.random.Generator) -> int:
    """Epsilon-greedy choice of a segment length in [u, n].

    Explores with probability epsilon; otherwise the best action, ties going
    to the shortest length.
    """
    if rng.random() < cfg.epsilon:
        return int(rng.integers(cfg.min_len, cfg.max_len + 1))
    return cfg.min_len + int(np.argmax(row))


def _td_update(table: np.ndarray, state: int, action: int, reward: float, next_state: int,
               cfg: QConfig, best_next: Optional[int]) -> float:
    column = action - cfg.min_len
    if best_next is None:
        bootstrap = float(np.max(table[next_state]))
    else:
        bootstrap = float(table[next_state, best_next - cfg.min_len])
    td_term = reward + cfg.discount * bootstrap - table[state, column]
    table[state, column] += td_term * cfg.learn_rate
    return float(td_term)


def update_q(table: np.ndarray, state: int, action: int, reward: float, next_state: int,
             cfg: QConfig, best_next: Optional[int] = None) -> QUpdateTrace:
    """One temporal-difference step on a single table, in place.

    ``best_next`` fixes the bootstrap action at ``next_state``; by default it
    is the table's own argmax there.
    """
    td_term = _td_update(table, state, action, reward, next_state, cfg, best_next)
    return QUpdateTrace(state=state, action=action, reward=reward, next_state=next_state, td_term=td_term)


def _greedy(row: np.ndarray, cfg: QConfig) -> int:
    return cfg.min_len + int(np.argmax(row))


def _choose_length(tables: QTablePair, cut: int, cfg: QConfig, rng: np.random.Generator) -> int:
    """Reconcile the first-frame and last-frame proposals into one length."""
    first_choice = select_action(tables.qt_first[cut], cfg, rng)
    last_choice = select_action(tables.qt_last[cut], cfg, rng)
    if first_choice != _greedy(tables.qt_first[cut], cfg):
        return first_choice
    if last_choice != _greedy(tables.qt_last[cut], cfg):
        return last_choice
    return _greedy(tables.joint_row(cut), cfg)


def _rollout(env: SegmentationEnv, tables: QTablePair, cfg: QConfig, rng: Optional[np.random.Generator],
             baseline: float = 0.0) -> Tuple[List[int], float]:
    """Run one episode; ``rng=None`` means greedy with no table updates."""
    lengths: List[int] = []
    kappa_sum = 0.0
    cut = 1
    while cut <= env.length:
        if rng is None:
            length = _greedy(tables.joint_row(cut), cfg)
        else:
            length = _choose_length(tables, cut, cfg, rng)
        step = env.step(cut, length)
        if rng is not None:
            best_next = _greedy(tables.joint_row(step.next_cut), cfg)
            _td_update(tables.qt_first, cut, length, step.kappa_first - baseline / 2.0, step.next_cut, cfg, best_next)
            _td_update(tables.qt_last, cut, length, step.kappa_last - baseline / 2.0, step.next_cut, cfg, best_next)
        kappa_sum = kappa_sum + step.kappa_first + step.kappa_last
        lengths.append(step.last - cut + 1)
        cut = step.next_cut
    if not lengths:
        return lengths, 0.0
    return lengths, kappa_sum / len(lengths)


def episode_rollout(seq: SequenceOrEnv, tables: QTablePair, cfg: QConfig, rng: np.random.Generator,
                    baseline: float = 0.0) -> SegmentationStrategy:
    """One training episode from frame 1 to LN, updating both tables.

    ``baseline`` is subtracted from every step's learning reward (half per
    table); the returned score always uses the raw rewards.
    """
    lengths, score = _rollout(_env(seq, cfg), tables, cfg, rng, baseline)
    return SegmentationStrategy.from_lengths(tuple(lengths), score)


def greedy_strategy(seq: SequenceOrEnv, tables: QTablePair, cfg: QConfig) -> SegmentationStrategy:
    """Follow the joint greedy policy without exploring or learning."""
    lengths, score = _rollout(_env(seq, cfg), tables, cfg, None)
    return SegmentationStrategy.from_lengths(tuple(lengths), score)


class KeyFrameTrainer:
    """Runs Q-learning episodes and keeps the best strategy seen."""

    def __init__(self, seq: SequenceOrEnv, cfg: QConfig, tables: Optional[QTablePair] = None):
        self.cfg = cfg
        self.env = _env(seq, cfg)
        self.tables = tables if tables is not None else QTablePair.zeros(self.env.length, cfg)
        self.rng = np.random.default_rng(cfg.seed)
        self.history: List[float] = []
        self.best_history: List[float] = []
        self.best: Optional[SegmentationStrategy] = None

    @property
    def best_score(self) -> float:
        return self.best.score if self.best is not None else -math.inf

    def run(self, episodes: Optional[int] = None) -> SegmentationStrategy:
        if self.env.length == 0:
            return SegmentationStrategy()
        if episodes is None:
            episodes = self.cfg.episode_budget(self.env.length)
            if self.cfg.max_len >= self.env.length:
                logger.warning(f"Longest segment {self.cfg.max_len} reaches the sequence length {self.env.length}, "
                               f"default budget capped at {episodes} episodes")

        for episode in range(episodes):
            baseline = self.best.score if (self.cfg.segment_baseline and self.best is not None) else 0.0
            lengths, score = _rollout(self.env, self.tables, self.cfg, self.rng, baseline)
            self.history.append(score)
            if score > self.best_score:
                self.best = SegmentationStrategy.from_lengths(tuple(lengths), score)
            self.best_history.append(self.best_score)
            if (episode + 1) % 1000 == 0:
                logger.debug(f"Episode {episode + 1}/{episodes}: best kappa_sum {self.best_score:.6f}")

        if self.best is None:
            return SegmentationStrategy()
        logger.info(f"Key-frame training on {self.env.seq.name}: {episodes} episodes, "
                    f"{len(self.best.segments)} segments, kappa_sum {self.best.score:.6f}")
        return self.best


def train_kfe(seq: Sequence, cfg: QConfig) -> SegmentationStrategy:
    """Train from zero tables and return the best strategy of the run."""
    return KeyFrameTrainer(seq, cfg).run()
