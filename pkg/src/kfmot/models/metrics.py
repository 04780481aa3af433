"""Evaluation report models."""

from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

ALPHAS: Tuple[float, ...] = tuple(round(0.05 * k, 2) for k in range(1, 20))


class AlphaScore(BaseModel):
    """HOTA components at one localisation threshold, with the counts behind them."""

    alpha: float = Field(..., gt=0.0, lt=1.0)
    hota: float = Field(default=0.0)
    deta: float = Field(default=0.0)
    assa: float = Field(default=0.0)
    tp: int = Field(default=0, ge=0)
    fn: int = Field(default=0, ge=0)
    fp: int = Field(default=0, ge=0)
    assa_sum: float = Field(default=0.0, ge=0.0, description="Sum of per-TP association accuracies")


class MetricReport(BaseModel):
    """All tracking metrics for one sequence (or the combination of several)."""

    name: str = Field(default="sequence")
    hota: Optional[float] = Field(default=None, description="None when there is no ground truth")
    deta: Optional[float] = Field(default=None)
    assa: Optional[float] = Field(default=None)
    idf1: Optional[float] = Field(default=None, description="None when there is no ground truth")
    mota: Optional[float] = Field(default=None, description="None when there is no ground truth")
    ids: int = Field(default=0, ge=0)
    fp: int = Field(default=0, ge=0)
    fn: int = Field(default=0, ge=0)
    per_alpha: List[AlphaScore] = Field(default_factory=list)

    num_gt: int = Field(default=0, ge=0, description="Ground-truth boxes")
    num_pred: int = Field(default=0, ge=0, description="Predicted boxes")
    idtp: int = Field(default=0, ge=0)
    idfp: int = Field(default=0, ge=0)
    idfn: int = Field(default=0, ge=0)

    def row(self) -> List[str]:
        """CSV cells in report column order."""

        def fmt(value: Optional[float]) -> str:
            return "" if value is None else repr(float(value))

        return [self.name, fmt(self.hota), fmt(self.deta), fmt(self.assa), fmt(self.idf1), fmt(self.mota),
                str(self.ids), str(self.fp), str(self.fn)]


REPORT_COLUMNS = ["sequence", "hota", "deta", "assa", "idf1", "mota", "ids", "fp", "fn"]
