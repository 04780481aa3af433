"""Logistic edge scoring."""

import numpy as np
from scipy.special import expit

from ..models.association import EdgeScorer, LevelGraph


def edge_logits(features: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Linear layer over (E, 4) edge inputs with a trailing bias weight."""
    return features @ weights[:-1] + weights[-1]


def edge_probabilities(features: np.ndarray, level: int, scorer: EdgeScorer) -> np.ndarray:
    """Probabilities for raw (E, 4) edge inputs of one level."""
    return expit(edge_logits(scorer.standardize(features), scorer.level_weights(level)))


def score_edges(graph: LevelGraph, scorer: EdgeScorer) -> np.ndarray:
    """Edge probabilities in edge order."""
    return edge_probabilities(graph.feature_matrix(), graph.level, scorer)
