"""Seeded synthetic scenes with ground truth: occlusions, lookalikes, crossings, random walks.

Objects move on a 1920x1080 canvas and reflect at its borders. Occlusion
scenes without explicit gaps hide each slow object while a fast one on its
row passes over it; lookalike scenes hide both members of a pair at once and
bring them back in an order their motion cannot tell. All randomness comes
from ``numpy.random.default_rng`` seeded by the scenario.
"""

import logging
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from ..models.detection import Box, Detection, Sequence, TrackBox, TrackSet, detection_sort_key
from ..models.scenario import NoiseConfig, ScenarioConfig, ScenarioKind, SynthOutput

logger = logging.getLogger(__name__)

CANVAS = (1920.0, 1080.0)
MAX_SPEED = 8.0
OCCLUDER_SPEED = (10.0, 14.0)
OCCLUDEE_SPEED = 0.8
# hidden while centres are closer than this share of the closing speed
OCCLUSION_REACH = 0.6
LOOKALIKE_GAP = (9, 15)


def unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def default_gaps(cfg: ScenarioConfig, rng: np.random.Generator, objects: List[int]) -> List[Tuple[int, int, int]]:
    """One mid-sequence gap per listed object, when the sequence is long enough."""
    gaps = []
    for obj in objects:
        gap = int(rng.integers(3, max(3, cfg.length // 6) + 1))
        if cfg.length < gap + 4:
            continue
        start = int(rng.integers(2, cfg.length - gap))
        gaps.append((obj, start, gap))
    return gaps


def default_pairs(cfg: ScenarioConfig) -> List[Tuple[int, int]]:
    return [(i, i + 1) for i in range(1, cfg.num_objects, 2)]


def _reflect(position: float, velocity: float, low: float, high: float) -> Tuple[float, float]:
    if position < low:
        return 2 * low - position, -velocity
    if position > high:
        return 2 * high - position, -velocity
    return position, velocity


class _Mover:
    """Box of fixed size with a velocity, reflected into the canvas."""

    def __init__(self, x: float, y: float, vx: float, vy: float, width: float, height: float):
        self.x, self.y, self.vx, self.vy = x, y, vx, vy
        self.width, self.height = width, height

    @property
    def box(self) -> Tuple[float, float, float, float]:
        return float(self.x), float(self.y), float(self.width), float(self.height)

    def advance(self, rng: np.random.Generator, jitter: float, walk: float) -> None:
        if walk > 0.0:
            self.vx += walk * rng.normal()
            self.vy += walk * rng.normal()
        self.x += self.vx + jitter * rng.normal()
        self.y += self.vy + jitter * rng.normal()
        self.x, self.vx = _reflect(self.x, self.vx, 0.0, CANVAS[0] - self.width)
        self.y, self.vy = _reflect(self.y, self.vy, 0.0, CANVAS[1] - self.height)


def _random_mover(rng: np.random.Generator) -> _Mover:
    width = float(rng.uniform(40.0, 80.0))
    height = 2.5 * width
    return _Mover(
        x=float(rng.uniform(0.0, CANVAS[0] - width)),
        y=float(rng.uniform(0.0, CANVAS[1] - height)),
        vx=float(rng.uniform(-MAX_SPEED, MAX_SPEED)),
        vy=float(rng.uniform(-MAX_SPEED, MAX_SPEED)),
        width=width,
        height=height,
    )


def _crossing_movers(cfg: ScenarioConfig, rng: np.random.Generator) -> List[_Mover]:
    """Objects in pairs on one row, starting at opposite sides and meeting mid-sequence."""
    movers = []
    rows = (cfg.num_objects + 1) // 2
    for k in range(cfg.num_objects):
        width = float(rng.uniform(40.0, 80.0))
        height = 2.5 * width
        row = k // 2
        y = (row + 0.5) * (CANVAS[1] - height) / max(rows, 1)
        span = min(CANVAS[0] - width, 2.0 * MAX_SPEED * cfg.length)
        x0 = (CANVAS[0] - width - span) / 2.0
        speed = span / max(cfg.length - 1, 1)
        if k % 2 == 0:
            movers.append(_Mover(x0, y, speed, 0.0, width, height))
        else:
            movers.append(_Mover(x0 + span, y + 0.2 * height, -speed, 0.0, width, height))
    return movers


def _row_top(row: int, rows: int, height: float) -> float:
    center = (row + 0.5) * CANVAS[1] / max(rows, 1)
    return float(np.clip(center - height / 2.0, 0.0, CANVAS[1] - height))


def _row_mover(rng: np.random.Generator, row: int, rows: int, length: int) -> _Mover:
    """Horizontal mover whose speed keeps it on the canvas for the whole sequence."""
    width = float(rng.uniform(40.0, 80.0))
    height = 2.5 * width
    x = float(rng.uniform(0.0, CANVAS[0] - width))
    vx = float(rng.uniform(-MAX_SPEED, MAX_SPEED))
    room = (CANVAS[0] - width - x) if vx > 0 else x
    vx = float(np.sign(vx) * min(abs(vx), room / max(length - 1, 1)))
    return _Mover(x, _row_top(row, rows, height), vx, 0.0, width, height)


class _PassBy(NamedTuple):
    """Fast occluder overtaking a slow occludee on the same row."""

    occluder: int
    occludee: int
    reach: float


def _pass_by_pair(rng: np.random.Generator, row: int, rows: int, length: int) -> Tuple[_Mover, _Mover, float]:
    width = float(rng.uniform(40.0, 80.0))
    height = 2.5 * width
    top = _row_top(row, rows, height)
    x_slow = float(rng.uniform(0.3, 0.7) * (CANVAS[0] - width))
    v_slow = float(rng.uniform(-OCCLUDEE_SPEED, OCCLUDEE_SPEED))
    speed = float(rng.uniform(*OCCLUDER_SPEED))
    meet = float(rng.uniform(0.25, 0.75)) * max(length - 1, 1)
    direction = 1.0 if rng.random() < 0.5 else -1.0
    x_fast = float(np.clip(x_slow + (v_slow - direction * speed) * meet, 0.0, CANVAS[0] - width))
    occluder = _Mover(x_fast, top, direction * speed, 0.0, width, height)
    occludee = _Mover(x_slow, top, v_slow, 0.0, width, height)
    return occluder, occludee, OCCLUSION_REACH * (speed - abs(v_slow))


def _occlusion_movers(cfg: ScenarioConfig, rng: np.random.Generator,
                      pass_by: bool) -> Tuple[List[_Mover], List[_PassBy]]:
    """One row per pair of objects, or per object when the gaps are given.

    With ``pass_by`` each odd object overtakes the next one, which is hidden
    while their centres are within reach. A leftover object gets a row alone.
    """
    pairs = cfg.num_objects // 2 if pass_by else 0
    singles = cfg.num_objects - 2 * pairs
    rows = pairs + singles
    movers: List[_Mover] = []
    passes: List[_PassBy] = []
    for row in range(pairs):
        occluder, occludee, reach = _pass_by_pair(rng, row, rows, cfg.length)
        movers.extend((occluder, occludee))
        passes.append(_PassBy(len(movers) - 1, len(movers), reach))
    movers.extend(_row_mover(rng, row, rows, cfg.length) for row in range(pairs, rows))
    return movers, passes


def _hidden_runs(frames: List[int]) -> List[Tuple[int, int]]:
    """(start, length) of each run of consecutive frames."""
    runs: List[Tuple[int, int]] = []
    for frame in sorted(frames):
        if runs and runs[-1][0] + runs[-1][1] == frame:
            runs[-1] = (runs[-1][0], runs[-1][1] + 1)
        else:
            runs.append((frame, 1))
    return runs


def _pass_by_gaps(paths: Dict[int, List[Box]], passes: List[_PassBy]) -> List[Tuple[int, int, int]]:
    gaps = []
    for p in passes:
        hidden = [
            frame for frame, (fast, slow) in enumerate(zip(paths[p.occluder], paths[p.occludee]), start=1)
            if abs((fast[0] + fast[2] / 2.0) - (slow[0] + slow[2] / 2.0)) < p.reach
        ]
        gaps.extend((p.occludee, start, gap) for start, gap in _hidden_runs(hidden))
    return gaps


class _Scripted:
    """Box following precomputed centres, plus accumulated jitter."""

    def __init__(self, centers: np.ndarray, width: float, height: float):
        self.centers = centers
        self.width, self.height = width, height
        self.frame = 0
        self.jitter = np.zeros(2)

    @property
    def box(self) -> Tuple[float, float, float, float]:
        cx, cy = self.centers[self.frame] + self.jitter
        return float(cx - self.width / 2.0), float(cy - self.height / 2.0), float(self.width), float(self.height)

    def advance(self, rng: np.random.Generator, jitter: float, walk: float) -> None:
        self.frame += 1
        self.jitter = self.jitter + jitter * rng.normal(size=2)


def _exchange_offsets(length: int, before: np.ndarray, after: np.ndarray,
                      event: Optional[Tuple[int, int]]) -> np.ndarray:
    """Per-frame offset moving linearly from ``before`` to ``after`` while hidden."""
    offsets = np.tile(before, (length, 1))
    if event is not None:
        start, gap = event
        for frame in range(start, length + 1):
            share = min(1.0, (frame - start + 1) / (gap + 1))
            offsets[frame - 1] = before + share * (after - before)
    return offsets


def _lookalike_movers(cfg: ScenarioConfig, pairs: List[Tuple[int, int]], rng: np.random.Generator,
                      exchange: bool) -> Tuple[List[Union[_Mover, _Scripted]], List[Tuple[int, int, int]]]:
    """Each pair side by side, each member with a companion on its outer side.

    With ``exchange`` both members of a pair vanish together and reappear
    stacked on the pair's centre line, one above the other, so the motion
    of either member predicts both reappearances equally well. Only the
    companions tell them apart.
    """
    movers: List[Union[_Mover, _Scripted]] = [_random_mover(rng) for _ in range(cfg.num_objects)]
    columns = min(len(pairs), 6)
    rows = -(-len(pairs) // columns) if pairs else 1
    companions: Dict[int, _Scripted] = {}
    gaps: List[Tuple[int, int, int]] = []
    for k, (i, j) in enumerate(pairs):
        width = float(rng.uniform(40.0, 70.0))
        height = 2.5 * width
        side, vertical, outer = 0.6 * width, 1.4 * width, 0.9 * width
        center = np.array([(k % columns + 0.5) * CANVAS[0] / columns, (k // columns + 0.5) * CANVAS[1] / rows])
        room = np.array([CANVAS[0] / (2 * columns) - 2.0 * width, CANVAS[1] / (2 * rows) - vertical - height / 2.0])
        drift = rng.uniform(-1.0, 1.0, size=2) * np.minimum(0.5, np.maximum(room, 0.0) / max(cfg.length, 1))
        up = 1.0 if rng.random() < 0.5 else -1.0
        gap = int(rng.integers(*LOOKALIKE_GAP))
        start = 6 + 24 * k + int(rng.integers(0, 5))
        event = (start, gap) if exchange and start + gap + 5 <= cfg.length else None
        if event is not None:
            gaps.extend([(i, start, gap), (j, start, gap)])

        path = center + np.outer(np.arange(cfg.length), drift)
        left = _exchange_offsets(cfg.length, np.array([-side, 0.0]), np.array([0.0, -up * vertical]), event)
        right = _exchange_offsets(cfg.length, np.array([side, 0.0]), np.array([0.0, up * vertical]), event)
        movers[i - 1] = _Scripted(path + left, width, height)
        movers[j - 1] = _Scripted(path + right, width, height)
        companions[i] = _Scripted(path + left - [outer, 0.0], width, height)
        companions[j] = _Scripted(path + right + [outer, 0.0], width, height)
    movers.extend(companions[obj] for obj in sorted(companions))
    return movers, gaps


def _base_features(num_tracks: int, pairs: List[Tuple[int, int]], dim: int,
                   rng: np.random.Generator) -> Dict[int, np.ndarray]:
    features = {track_id: unit_vector(rng, dim) for track_id in range(1, num_tracks + 1)}
    for i, j in pairs:
        features[j] = features[i].copy()
    return features


def degrade(gt: TrackSet, noise: NoiseConfig, seed: int, base_features: Optional[Dict[int, np.ndarray]] = None,
            length: Optional[int] = None, feature_dim: int = 16, name: str = "synthetic") -> Sequence:
    """Detections from ground truth: misses, box jitter and feature jitter.

    Every box draws its miss, box and feature noise in frame then id order, so
    the draws do not depend on the noise levels. Features are re-normalised.
    """
    rng = np.random.default_rng(seed)
    if base_features is None:
        base_features = {track_id: unit_vector(rng, feature_dim) for track_id in sorted(gt.tracks)}
    dim = len(next(iter(base_features.values()))) if base_features else feature_dim

    frames: Dict[int, List[Detection]] = {}
    for frame, entries in sorted(gt.by_frame().items()):
        detections = []
        for track_id, entry in entries:
            dropped = rng.random() < noise.miss_rate
            box_jitter = rng.normal(size=4) * noise.box_noise
            feature = base_features[track_id] + rng.normal(size=dim) * noise.feature_noise
            if dropped:
                continue
            left, top, width, height = np.asarray(entry.box) + box_jitter
            norm = np.linalg.norm(feature)
            detections.append(Detection(
                frame=frame,
                det_id=-1,
                box=(float(left), float(top), float(max(width, 1.0)), float(max(height, 1.0))),
                confidence=1.0,
                feature=tuple(float(x) for x in (feature / norm if norm > 0 else feature)),
            ))
        if detections:
            frames[frame] = sorted(detections, key=detection_sort_key)
    return Sequence(name=name, length=length if length is not None else gt.last_frame, feature_dim=dim,
                    frames=frames)


def generate(cfg: ScenarioConfig) -> SynthOutput:
    """Ground-truth tracks and degraded detections for one scenario."""
    rng = np.random.default_rng(cfg.seed)
    gaps = list(cfg.occlusion_gaps)
    pairs = list(cfg.lookalike_pairs)
    if cfg.kind == ScenarioKind.LOOKALIKE and not pairs:
        pairs = default_pairs(cfg)

    passes: List[_PassBy] = []
    movers: List[Union[_Mover, _Scripted]]
    if cfg.kind == ScenarioKind.OCCLUSION:
        movers, passes = _occlusion_movers(cfg, rng, pass_by=not gaps)
        if not gaps:
            paired = {obj for p in passes for obj in (p.occluder, p.occludee)}
            gaps = default_gaps(cfg, rng, [obj for obj in range(1, cfg.num_objects + 1) if obj not in paired])
    elif cfg.kind == ScenarioKind.CROSSING:
        movers = _crossing_movers(cfg, rng)
    elif cfg.kind == ScenarioKind.LOOKALIKE:
        movers, exchange_gaps = _lookalike_movers(cfg, pairs, rng, exchange=not gaps)
        gaps = gaps or exchange_gaps
    else:
        movers = [_random_mover(rng) for _ in range(cfg.num_objects)]
    walk = 1.0 if cfg.kind == ScenarioKind.RANDOM_WALK else 0.0

    paths: Dict[int, List[Box]] = {track_id: [] for track_id in range(1, len(movers) + 1)}
    for frame in range(1, cfg.length + 1):
        for track_id, mover in enumerate(movers, start=1):
            if frame > 1:
                mover.advance(rng, cfg.motion_jitter, walk)
            paths[track_id].append(mover.box)
    gaps = sorted(gaps + _pass_by_gaps(paths, passes))

    occluded = {(obj, frame) for obj, start, gap in gaps for frame in range(start, start + gap)}
    tracks = {
        track_id: [TrackBox(frame=frame, box=box) for frame, box in enumerate(boxes, start=1)
                   if (track_id, frame) not in occluded]
        for track_id, boxes in paths.items()
    }
    gt = TrackSet(tracks={track_id: boxes for track_id, boxes in tracks.items() if boxes})

    features = _base_features(len(movers), pairs, cfg.feature_dim, rng)
    detections = degrade(gt, cfg.noise, int(rng.integers(2 ** 32)), features, length=cfg.length,
                         name=f"{cfg.kind.value}-{cfg.seed}")
    scenario = cfg.model_copy(update={"occlusion_gaps": gaps, "lookalike_pairs": pairs})
    logger.debug(f"Generated {cfg.kind.value} scene: {len(gt.tracks)} tracks, {detections.num_detections} detections, "
                 f"{len(gaps)} occlusions")
    return SynthOutput(gt=gt, detections=detections, scenario=scenario)
