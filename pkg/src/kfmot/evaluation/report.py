"""Full metric reports, their combination and CSV output."""

import csv
import io
import logging
from typing import Sequence as TypingSequence

from ..models.detection import TrackSet
from ..models.metrics import REPORT_COLUMNS, MetricReport
from .clear import clear_counts, mota_from_counts
from .hota import combine_alpha, compute_hota, summarize
from .identity import IdentityCounts, identity_counts

logger = logging.getLogger(__name__)


def evaluate(preds: TrackSet, gts: TrackSet, name: str = "sequence", alpha_match: float = 0.5) -> MetricReport:
    """Every metric of one sequence in a single report."""
    hota = compute_hota(preds, gts)
    clear = clear_counts(preds, gts, alpha_match)
    identity = identity_counts(preds, gts, alpha_match)
    has_gt = gts.num_boxes > 0
    report = MetricReport(
        name=name,
        hota=hota.hota,
        deta=hota.deta,
        assa=hota.assa,
        idf1=identity.idf1 if has_gt else None,
        mota=mota_from_counts(clear["fp"], clear["fn"], clear["ids"], clear["num_gt"]),
        ids=clear["ids"],
        fp=clear["fp"],
        fn=clear["fn"],
        per_alpha=hota.per_alpha,
        num_gt=gts.num_boxes,
        num_pred=preds.num_boxes,
        idtp=identity.idtp,
        idfp=identity.idfp,
        idfn=identity.idfn,
    )
    logger.debug(f"Evaluated {name}: HOTA {report.hota}, IDF1 {report.idf1}, MOTA {report.mota}, IDS {report.ids}")
    return report


def combine_reports(reports: TypingSequence[MetricReport], name: str = "COMBINED") -> MetricReport:
    """Pool raw counts across sequences; AssA components are TP-weighted."""
    if not reports:
        return MetricReport(name=name)
    per_alpha = [combine_alpha([r.per_alpha[k] for r in reports]) for k in range(len(reports[0].per_alpha))]
    num_gt = sum(r.num_gt for r in reports)
    fp = sum(r.fp for r in reports)
    fn = sum(r.fn for r in reports)
    ids = sum(r.ids for r in reports)
    identity = IdentityCounts(sum(r.idtp for r in reports), sum(r.idfp for r in reports),
                              sum(r.idfn for r in reports))
    hota = deta = assa = None
    if num_gt > 0 and per_alpha:
        hota, deta, assa = summarize(per_alpha)
    return MetricReport(
        name=name,
        hota=hota,
        deta=deta,
        assa=assa,
        idf1=identity.idf1 if num_gt > 0 else None,
        mota=mota_from_counts(fp, fn, ids, num_gt),
        ids=ids,
        fp=fp,
        fn=fn,
        per_alpha=per_alpha,
        num_gt=num_gt,
        num_pred=sum(r.num_pred for r in reports),
        idtp=identity.idtp,
        idfp=identity.idfp,
        idfn=identity.idfn,
    )


def write_report_csv(reports: TypingSequence[MetricReport], combined: bool = True) -> str:
    """One row per sequence, then a COMBINED row."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for report in reports:
        writer.writerow(report.row())
    if combined:
        writer.writerow(combine_reports(reports).row())
    return buffer.getvalue()
