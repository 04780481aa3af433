"""Focal loss on edge probabilities and its derivative with respect to the logit."""

from typing import Union

import numpy as np

from ..core.exceptions import DataValidationError, LossDomainError
from ..models.association import FocalLossConfig

ArrayLike = Union[float, np.ndarray]

# callers clamp probabilities into this interval before evaluating the loss
PROBABILITY_FLOOR = 1e-7


def clamp_probability(p: ArrayLike) -> ArrayLike:
    return np.clip(p, PROBABILITY_FLOOR, 1.0 - PROBABILITY_FLOOR)


def _check(p: float, y: int) -> None:
    if not 0.0 < p < 1.0:
        raise LossDomainError(p)
    if y not in (0, 1):
        raise DataValidationError(f"Label must be 0 or 1, got {y}")


def focal_terms(p: np.ndarray, y: np.ndarray, cfg: FocalLossConfig):
    """Element-wise loss and dL/dlogit for arrays of probabilities and labels."""
    p = np.asarray(p, dtype=float)
    positive = np.asarray(y) == 1
    p_t = np.where(positive, p, 1.0 - p)
    alpha_t = np.where(positive, cfg.alpha_f, 1.0 - cfg.alpha_f)
    sign = np.where(positive, 1.0, -1.0)
    log_p_t = np.log(p_t)
    miss = 1.0 - p_t
    loss = -alpha_t * miss ** cfg.gamma * log_p_t
    grad = sign * alpha_t * (cfg.gamma * miss ** cfg.gamma * p_t * log_p_t - miss ** (cfg.gamma + 1.0))
    return loss, grad


def focal_loss(p: float, y: int, cfg: FocalLossConfig) -> float:
    """-alpha_t (1 - p_t)^gamma log(p_t)."""
    _check(p, y)
    loss, _ = focal_terms(np.array([p]), np.array([y]), cfg)
    return float(loss[0])


def focal_loss_grad(p: float, y: int, cfg: FocalLossConfig) -> float:
    """Derivative of the focal loss with respect to the logit of ``p``."""
    _check(p, y)
    _, grad = focal_terms(np.array([p]), np.array([y]), cfg)
    return float(grad[0])
