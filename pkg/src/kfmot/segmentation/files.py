"""Strategy file: ``segment_index,first_frame,last_frame`` rows plus a ``# kappa_sum=`` line."""

from typing import List

from pydantic import ValidationError

from ..core.exceptions import DataValidationError, ParseError
from ..models.segmentation import Segment, SegmentationStrategy

SCORE_PREFIX = "# kappa_sum="


def write_strategy(strategy: SegmentationStrategy) -> str:
    lines = [f"{index},{segment.first},{segment.last}" for index, segment in enumerate(strategy.segments, start=1)]
    lines.append(f"{SCORE_PREFIX}{strategy.score!r}")
    return "".join(line + "\n" for line in lines)


def read_strategy(text: str) -> SegmentationStrategy:
    segments: List[Segment] = []
    score = 0.0
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(SCORE_PREFIX):
            try:
                score = float(line[len(SCORE_PREFIX):])
            except ValueError:
                raise ParseError(f"bad kappa_sum: {line!r}", line_number)
            continue
        if line.startswith("#"):
            continue
        fields = [field.strip() for field in line.split(",")]
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, got {len(fields)}", line_number)
        try:
            index, first, last = (int(field) for field in fields)
        except ValueError:
            raise ParseError(f"non-integer field in {line!r}", line_number)
        if index != len(segments) + 1:
            raise ParseError(f"segment index {index} out of order", line_number)
        try:
            segments.append(Segment(first=first, last=last))
        except ValidationError as e:
            raise DataValidationError(f"line {line_number}: {e.errors()[0]['msg']}", {"line_number": line_number})
    try:
        return SegmentationStrategy(segments=segments, score=score)
    except ValidationError as e:
        raise DataValidationError(e.errors()[0]["msg"])
