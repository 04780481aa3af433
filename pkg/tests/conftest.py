"""Shared fixtures: small hand-built sequences and track sets."""

from typing import Dict, List, Optional, Sequence as TypingSequence, Tuple

import numpy as np
import pytest

from kfmot.models.detection import Detection, Sequence, TrackBox, TrackSet, detection_sort_key


def build_sequence(features: TypingSequence[TypingSequence[float]],
                   boxes: Optional[TypingSequence[Tuple[float, float, float, float]]] = None,
                   name: str = "fixture") -> Sequence:
    """One detection per frame with the given features (and boxes, default a fixed box)."""
    frames = {}
    for t, feature in enumerate(features, start=1):
        box = boxes[t - 1] if boxes is not None else (100.0, 100.0, 40.0, 100.0)
        frames[t] = [Detection(frame=t, box=box, feature=tuple(float(x) for x in feature))]
    return Sequence(name=name, length=len(features), feature_dim=len(features[0]), frames=frames)


def build_frames(frames: Dict[int, List[Tuple[Tuple[float, float, float, float], TypingSequence[float]]]],
                 length: int, name: str = "fixture") -> Sequence:
    """Several detections per frame from (box, feature) pairs."""
    built = {}
    dim = 0
    for t, entries in frames.items():
        detections = [Detection(frame=t, box=box, feature=tuple(float(x) for x in feature)) for box, feature in entries]
        built[t] = sorted(detections, key=detection_sort_key)
        dim = len(entries[0][1])
    return Sequence(name=name, length=length, feature_dim=dim, frames=built)


def build_tracks(tracks: Dict[int, List[Tuple[int, Tuple[float, float, float, float]]]]) -> TrackSet:
    return TrackSet(tracks={
        track_id: [TrackBox(frame=frame, box=box) for frame, box in entries] for track_id, entries in tracks.items()
    })


@pytest.fixture
def make_sequence():
    return build_sequence


@pytest.fixture
def make_frames():
    return build_frames


@pytest.fixture
def make_tracks():
    return build_tracks


@pytest.fixture
def basis_sequence() -> Sequence:
    """Six frames whose features are e1, e1, e2, e2, e3, e3."""
    e = np.eye(3)
    return build_sequence([e[0], e[0], e[1], e[1], e[2], e[2]])


@pytest.fixture
def box_a():
    return (0.0, 0.0, 10.0, 20.0)


@pytest.fixture
def gt_single(box_a) -> TrackSet:
    """One object in frames 1-4."""
    return build_tracks({1: [(t, box_a) for t in range(1, 5)]})


@pytest.fixture
def split_preds(box_a) -> TrackSet:
    """The object of ``gt_single`` predicted as two ids, 2 frames each."""
    return build_tracks({1: [(1, box_a), (2, box_a)], 2: [(3, box_a), (4, box_a)]})


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
