"""MOT-Challenge style text files: detections, ground truth, results and features."""

import logging
import math
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from ..core.exceptions import DataValidationError, FrameIndexError, ParseError
from ..models.detection import (
    Detection,
    FeatureTable,
    FrameFeature,
    Sequence,
    TrackBox,
    TrackSet,
    detection_sort_key,
)

logger = logging.getLogger(__name__)


def _rows(text: str) -> Iterator[Tuple[int, List[str]]]:
    """Yield (line number, fields) for every non-empty, non-comment line."""
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line_number, [field.strip() for field in line.split(",")]


def _to_float(value: str, line_number: int, name: str) -> float:
    try:
        number = float(value)
    except ValueError:
        raise ParseError(f"{name} is not a number: {value!r}", line_number)
    if not math.isfinite(number):
        raise ParseError(f"{name} is not finite: {value!r}", line_number)
    return number


def _to_int(value: str, line_number: int, name: str) -> int:
    number = _to_float(value, line_number, name)
    if not number.is_integer():
        raise ParseError(f"{name} is not an integer: {value!r}", line_number)
    return int(number)


def _format_number(value: float) -> str:
    """Integral values print without a decimal point; others round-trip exactly."""
    value = float(value)
    if value.is_integer():
        return str(int(value))
    return repr(value)


def _validation_message(error: ValidationError) -> str:
    return "; ".join(item["msg"] for item in error.errors())


def parse_detections(text: str, name: str = "sequence", length: Optional[int] = None) -> Sequence:
    """Parse a detection file into a Sequence.

    Lines are ``frame,id,left,top,width,height,conf[,x,y,z]``. LN is the
    largest frame present unless ``length`` overrides it. Detections are
    ordered canonically inside each frame, so line order does not matter.
    """
    frames: Dict[int, List[Detection]] = {}
    for line_number, fields in _rows(text):
        if len(fields) < 7:
            raise ParseError(f"expected at least 7 fields, got {len(fields)}", line_number)
        frame = _to_int(fields[0], line_number, "frame")
        det_id = _to_int(fields[1], line_number, "id")
        box = tuple(_to_float(v, line_number, "box") for v in fields[2:6])
        confidence = _to_float(fields[6], line_number, "confidence")
        try:
            detection = Detection(frame=frame, det_id=det_id, box=box, confidence=confidence)
        except ValidationError as e:
            raise DataValidationError(f"line {line_number}: {_validation_message(e)}",
                                      {"line_number": line_number})
        frames.setdefault(frame, []).append(detection)

    for detections in frames.values():
        detections.sort(key=detection_sort_key)

    last = max(frames, default=0)
    if length is None:
        length = last
    elif last > length:
        raise DataValidationError(f"Frame {last} exceeds declared length {length}")

    logger.debug(f"Parsed {sum(len(d) for d in frames.values())} detections over {length} frames")
    return Sequence(name=name, length=length, feature_dim=0, frames=frames)


def parse_feature_file(text: str) -> FeatureTable:
    """Parse a feature file: header ``D=<int>`` then ``frame,ordinal,v0..v{D-1}`` rows."""
    rows = _rows(text)
    header = next(rows, None)
    if header is None:
        raise ParseError("missing D=<int> header", 1)
    header_line, header_fields = header
    if len(header_fields) != 1 or not header_fields[0].upper().startswith("D="):
        raise ParseError("first line must be D=<int>", header_line)
    dim = _to_int(header_fields[0][2:], header_line, "D")
    if dim < 1:
        raise ParseError(f"D must be positive, got {dim}", header_line)

    vectors: Dict[Tuple[int, int], Tuple[float, ...]] = {}
    for line_number, fields in rows:
        if len(fields) != dim + 2:
            raise ParseError(f"expected {dim} values, got {len(fields) - 2}", line_number)
        key = (_to_int(fields[0], line_number, "frame"), _to_int(fields[1], line_number, "ordinal"))
        if key in vectors:
            raise DataValidationError(f"line {line_number}: duplicate feature row for frame {key[0]} ordinal {key[1]}",
                                      {"line_number": line_number})
        vectors[key] = tuple(_to_float(v, line_number, "feature") for v in fields[2:])
    return FeatureTable(dim=dim, vectors=vectors)


def attach_features(seq: Sequence, table: FeatureTable) -> Sequence:
    """Bind feature rows to detections by within-frame ordinal."""
    frames: Dict[int, List[Detection]] = {}
    for frame, detections in seq.frames.items():
        bound = []
        for ordinal, detection in enumerate(detections):
            vector = table.vectors.get((frame, ordinal))
            if vector is None:
                raise DataValidationError(f"No feature for frame {frame} ordinal {ordinal}")
            bound.append(detection.model_copy(update={"feature": vector}))
        frames[frame] = bound

    dangling = [key for key in table.vectors if key[1] >= len(seq.detections(key[0]))]
    if dangling:
        frame, ordinal = sorted(dangling)[0]
        raise DataValidationError(f"Feature row for frame {frame} ordinal {ordinal} has no detection",
                                  {"dangling": len(dangling)})
    return Sequence(name=seq.name, length=seq.length, feature_dim=table.dim, frames=frames)


def frame_feature(seq: Sequence, t: int) -> FrameFeature:
    """L2-normalised mean of the detection features of frame ``t``.

    An empty frame, or one whose mean is zero, maps to the zero vector.
    """
    if not 1 <= t <= seq.length:
        raise FrameIndexError(t, seq.length)
    matrix = seq.feature_matrix(t)
    if matrix.shape[0] == 0:
        return FrameFeature(frame=t, vector=(0.0,) * seq.feature_dim)
    mean = matrix.mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm > 0.0:
        mean = mean / norm
    return FrameFeature(frame=t, vector=tuple(float(x) for x in mean))


def _track_line(frame: int, track_id: int, entry: TrackBox, tail: str) -> str:
    left, top, width, height = entry.box
    values = [_format_number(v) for v in (left, top, width, height, entry.confidence)]
    return f"{frame},{track_id},{','.join(values)},{tail}"


def write_results(tracks: TrackSet) -> str:
    """Result lines ``frame,id,left,top,width,height,conf,-1,-1,-1`` by frame, then id."""
    lines = []
    for frame, entries in sorted(tracks.by_frame().items()):
        for track_id, entry in entries:
            lines.append(_track_line(frame, track_id, entry, "-1,-1,-1"))
    return "".join(line + "\n" for line in lines)


def _parse_tracks(text: str, keep_row) -> TrackSet:
    tracks: Dict[int, List[TrackBox]] = {}
    for line_number, fields in _rows(text):
        if len(fields) < 6:
            raise ParseError(f"expected at least 6 fields, got {len(fields)}", line_number)
        if not keep_row(fields, line_number):
            continue
        frame = _to_int(fields[0], line_number, "frame")
        track_id = _to_int(fields[1], line_number, "id")
        box = tuple(_to_float(v, line_number, "box") for v in fields[2:6])
        confidence = _to_float(fields[6], line_number, "confidence") if len(fields) > 6 else 1.0
        try:
            entry = TrackBox(frame=frame, box=box, confidence=confidence)
        except ValidationError as e:
            raise DataValidationError(f"line {line_number}: {_validation_message(e)}",
                                      {"line_number": line_number})
        tracks.setdefault(track_id, []).append(entry)

    for track_id, entries in tracks.items():
        entries.sort(key=lambda entry: entry.frame)
    try:
        return TrackSet(tracks=tracks)
    except ValidationError as e:
        raise DataValidationError(_validation_message(e))


def parse_results(text: str) -> TrackSet:
    """Inverse of :func:`write_results`."""
    return _parse_tracks(text, lambda fields, line_number: True)


def parse_ground_truth(text: str) -> TrackSet:
    """Parse ``frame,id,left,top,width,height,flag,class,visibility``.

    Only rows with flag=1 and class=1 are kept; rows without those columns
    are kept as-is.
    """

    def keep(fields: List[str], line_number: int) -> bool:
        if len(fields) > 6 and _to_float(fields[6], line_number, "flag") != 1:
            return False
        if len(fields) > 7 and _to_float(fields[7], line_number, "class") != 1:
            return False
        return True

    tracks = _parse_tracks(text, keep)
    # the flag column is not a confidence
    return TrackSet(tracks={
        track_id: [entry.model_copy(update={"confidence": 1.0}) for entry in entries]
        for track_id, entries in tracks.tracks.items()
    })


def write_ground_truth(tracks: TrackSet) -> str:
    lines = []
    for frame, entries in sorted(tracks.by_frame().items()):
        for track_id, entry in entries:
            left, top, width, height = (_format_number(v) for v in entry.box)
            lines.append(f"{frame},{track_id},{left},{top},{width},{height},1,1,1")
    return "".join(line + "\n" for line in lines)


def write_detections(seq: Sequence) -> str:
    lines = []
    for frame, detections in seq.iter_frames():
        for detection in detections:
            values = [_format_number(v) for v in (*detection.box, detection.confidence)]
            lines.append(f"{frame},{detection.det_id},{','.join(values)},-1,-1,-1")
    return "".join(line + "\n" for line in lines)


def write_feature_file(seq: Sequence) -> str:
    lines = [f"D={seq.feature_dim}"]
    for frame, detections in seq.iter_frames():
        for ordinal, detection in enumerate(detections):
            values = ",".join(repr(float(x)) for x in detection.feature)
            lines.append(f"{frame},{ordinal},{values}")
    return "".join(line + "\n" for line in lines)
