"""One-to-one link selection and tracklet merging."""

import logging
from typing import Dict, List, Sequence as TypingSequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..models.association import LevelGraph, Tracklet
from .tracklets import merge_members

logger = logging.getLogger(__name__)


def select_links(graph: LevelGraph, scores: TypingSequence[float], threshold: float) -> List[Tuple[int, int]]:
    """One-to-one assignment over edges scoring at least ``threshold``.

    Each tracklet keeps at most one successor and one predecessor. The
    assignment takes as many links as possible, then the largest total score
    among those, so a higher threshold never yields more links.
    """
    count = len(graph.nodes)
    # scores lie in [0, 1], so one more link always outweighs any score total
    offset = float(count + 1)
    weight = np.zeros((count, count))
    allowed = np.zeros((count, count), dtype=bool)
    for edge, score in zip(graph.edges, scores):
        if score >= threshold and offset + score > weight[edge.source, edge.target]:
            weight[edge.source, edge.target] = offset + score
            allowed[edge.source, edge.target] = True
    if not allowed.any():
        return []
    rows, cols = linear_sum_assignment(weight, maximize=True)
    return sorted((int(r), int(c)) for r, c in zip(rows, cols) if allowed[r, c])


def match_and_merge(graph: LevelGraph, scores: TypingSequence[float], threshold: float) -> List[Tracklet]:
    """Follow the selected links and concatenate each chain into one tracklet.

    A merged tracklet keeps the id of its earliest part; unlinked tracklets
    pass through unchanged.
    """
    links = select_links(graph, scores, threshold)
    successor: Dict[int, int] = dict(links)
    has_predecessor = set(successor.values())

    heads = [i for i in range(len(graph.nodes)) if i not in has_predecessor]
    merged = []
    for head in heads:
        chain = [graph.nodes[head]]
        node = head
        while node in successor:
            node = successor[node]
            chain.append(graph.nodes[node])
        merged.append(merge_members(chain, chain[0].track_id) if len(chain) > 1 else chain[0])
    logger.debug(f"Level {graph.level}: {len(links)} links accepted, {len(graph.nodes)} -> {len(merged)} tracklets")
    return merged
