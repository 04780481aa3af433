"""Scorer weights file: one ``level,w_app,w_gap,w_dist,w_iou,bias`` line per level.

Weights are written against raw edge inputs, with any standardisation folded in.
"""

import math

import numpy as np

from ..core.exceptions import ParseError
from ..models.association import EDGE_FEATURE_NAMES, EdgeScorer

HEADER = ",".join(("level", *EDGE_FEATURE_NAMES, "bias"))


def write_scorer(scorer: EdgeScorer) -> str:
    lines = [HEADER]
    lines.extend(f"{level}," + ",".join(repr(float(x)) for x in row)
                 for level, row in enumerate(scorer.raw_weights(), start=1))
    return "".join(line + "\n" for line in lines)


def read_scorer(text: str) -> EdgeScorer:
    rows = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line == HEADER:
            continue
        fields = [field.strip() for field in line.split(",")]
        if len(fields) != len(EDGE_FEATURE_NAMES) + 2:
            raise ParseError(f"expected {len(EDGE_FEATURE_NAMES) + 2} fields, got {len(fields)}", line_number)
        try:
            level = int(fields[0])
            values = [float(field) for field in fields[1:]]
        except ValueError:
            raise ParseError(f"non-numeric field in {line!r}", line_number)
        if level != len(rows) + 1:
            raise ParseError(f"level {level} out of order", line_number)
        if not all(math.isfinite(x) for x in values):
            raise ParseError("weights must be finite", line_number)
        rows.append(values)
    if not rows:
        raise ParseError("no scorer levels", 1)
    return EdgeScorer(weights=np.array(rows))
