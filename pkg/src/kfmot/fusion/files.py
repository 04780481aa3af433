"""GCN weights file: ``D=<int>`` header, then D rows of D reals."""

import math

import numpy as np

from ..core.exceptions import ParseError
from ..models.fusion import Activation, GcnLayer


def write_gcn_weights(layer: GcnLayer) -> str:
    lines = [f"D={layer.dim}"]
    lines.extend(",".join(repr(float(x)) for x in row) for row in layer.W)
    return "".join(line + "\n" for line in lines)


def read_gcn_weights(text: str, activation: Activation = Activation.IDENTITY) -> GcnLayer:
    rows = [(number, line.strip()) for number, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if not rows or not rows[0][1].upper().startswith("D="):
        raise ParseError("first line must be D=<int>", rows[0][0] if rows else 1)
    try:
        dim = int(rows[0][1][2:])
    except ValueError:
        raise ParseError(f"bad dimension header {rows[0][1]!r}", rows[0][0])
    if dim < 1 or len(rows) - 1 != dim:
        raise ParseError(f"expected {dim} weight rows, got {len(rows) - 1}", rows[0][0])

    W = np.zeros((dim, dim))
    for i, (number, line) in enumerate(rows[1:]):
        fields = line.split(",")
        if len(fields) != dim:
            raise ParseError(f"expected {dim} values, got {len(fields)}", number)
        try:
            W[i] = [float(field) for field in fields]
        except ValueError:
            raise ParseError(f"non-numeric weight in {line!r}", number)
        if not all(math.isfinite(x) for x in W[i]):
            raise ParseError("weights must be finite", number)
    return GcnLayer(W=W, activation=activation)
