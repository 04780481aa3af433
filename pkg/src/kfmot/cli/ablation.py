"""Ablation harness: variant x seed x scenario cells, raw cell CSV and mean/stddev summary.

Each (scenario, segmentation, fusion) combination gets an edge scorer trained
on scenes of its own, seeded apart from the evaluation seeds.
"""

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, NamedTuple, Optional, Sequence as TypingSequence, Tuple

import numpy as np
from scipy.stats import binomtest

from ..association import build_training_set, track_sequence, train_edge_scorer
from ..association.training import combine_training_sets
from ..core.exceptions import ConfigurationError, ParseError, TrackingError
from ..evaluation import evaluate
from ..models.association import EdgeScorer
from ..models.config import RunConfig
from ..models.fusion import FusionConfig, FusionMode, GcnLayer
from ..models.scenario import ScenarioConfig
from ..models.segmentation import SegmentationStrategy
from ..segmentation import equal_segmentation, train_kfe
from ..synth import generate

logger = logging.getLogger(__name__)

BASELINE = "baseline"
# variant -> (key-frame segmentation, fusion mode)
VARIANTS = {
    BASELINE: (False, FusionMode.NONE),
    "+IFF": (False, FusionMode.GCN),
    "+IFF-avg": (False, FusionMode.AVERAGE),
    "+KFE": (True, FusionMode.NONE),
    "+both": (True, FusionMode.GCN),
}
# scorer training scenes are seeded from here up
TRAIN_SEED_OFFSET = 100000
METRICS = ["hota", "deta", "assa", "idf1", "mota", "ids", "fp", "fn"]
CELL_COLUMNS = ["kind", "seed", "variant", *METRICS]
SUMMARY_COLUMNS = ["kind", "variant", "cells",
                   *(f"{metric}_{stat}" for metric in METRICS for stat in ("mean", "std")), "ids_p_value"]

Cell = Dict[str, str]


class CellSpec(NamedTuple):
    suite: int
    scenario: ScenarioConfig
    seed: int
    variant: str
    use_kfe: bool
    fusion: FusionConfig

    @property
    def scorer_key(self) -> Tuple:
        return self.suite, self.use_kfe, self.fusion.mode, self.fusion.a, self.fusion.m, self.fusion.activation


def parse_sweep(text: str) -> List[float]:
    """``start:stop:step`` with both ends included."""
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise ConfigurationError(f"Sweep must look like start:stop:step, got {text!r}", key="sweep-a")
    if step <= 0 or not 0.0 <= start <= stop <= 1.0:
        raise ConfigurationError(f"Invalid fusion-ratio sweep {text!r}", key="sweep-a")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 10) for k in range(count)]


def _cell_specs(scenarios: TypingSequence[ScenarioConfig], variants: TypingSequence[str], seeds: TypingSequence[int],
                cfg: RunConfig, sweep: Optional[TypingSequence[float]]) -> List[CellSpec]:
    unknown = [v for v in variants if v not in VARIANTS]
    if unknown:
        raise ConfigurationError(f"Unknown ablation variant {unknown[0]!r}", key="variants",
                                 details={"known": list(VARIANTS)})
    graph_fusion = cfg.fusion.model_copy(update={"mode": FusionMode.GCN})
    specs = []
    for suite, scenario in enumerate(scenarios):
        for seed in seeds:
            seeded = scenario.model_copy(update={"seed": seed})
            for variant in variants:
                use_kfe, mode = VARIANTS[variant]
                fusion = cfg.fusion.model_copy(update={"mode": mode})
                specs.append(CellSpec(suite, seeded, seed, variant, use_kfe, fusion))
            for a in sweep or []:
                specs.append(CellSpec(suite, seeded, seed, f"a={a:g}", False, graph_fusion.model_copy(update={"a": a})))
    return specs


def _format(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def _segment(seq, use_kfe: bool, cfg: RunConfig, seed: int) -> SegmentationStrategy:
    if use_kfe:
        return train_kfe(seq, cfg.kfe.model_copy(update={"seed": seed}))
    return equal_segmentation(seq, cfg.kfe.max_len, cfg.kfe)


def _layer(fusion: FusionConfig, dim: int) -> Optional[GcnLayer]:
    return GcnLayer.identity(dim, fusion.activation) if fusion.mode == FusionMode.GCN else None


def train_cell_scorer(spec: CellSpec, cfg: RunConfig, scenes: int) -> EdgeScorer:
    """Edge scorer trained on ``scenes`` fresh scenes of the cell's scenario, segmentation and fusion.

    Starts from the prior weights, which are returned unchanged when
    ``scenes`` is 0 or the scenes yield no labelled edges.
    """
    prior = EdgeScorer.prior(cfg.tracker.levels)
    if scenes == 0:
        return prior
    sets = []
    for k in range(scenes):
        seed = TRAIN_SEED_OFFSET + cfg.seed + k
        output = generate(spec.scenario.model_copy(update={"seed": seed}))
        seq = output.detections
        strategy = _segment(seq, spec.use_kfe, cfg, seed)
        layer = _layer(spec.fusion, seq.feature_dim)
        sets.append(build_training_set(seq, output.gt, strategy, cfg.tracker, spec.fusion, layer))
    pooled = combine_training_sets(sets)
    if pooled.num_edges == 0:
        logger.warning(f"No labelled edges in {scenes} {spec.scenario.kind.value} training scenes, keeping the prior")
        return prior
    result = train_edge_scorer(pooled, prior, cfg.focal, cfg.training)
    logger.debug(f"Scorer for {spec.scenario.kind.value}/{spec.variant}: {pooled.num_edges} edges, "
                 f"final loss {result.losses[-1] if result.losses else float('nan'):.6f}")
    return result.scorer


def run_cell(spec: CellSpec, cfg: RunConfig, scorer: Optional[EdgeScorer] = None) -> Cell:
    """Generate one scene, segment, fuse, track and evaluate it."""
    scorer = scorer or EdgeScorer.prior(cfg.tracker.levels)
    try:
        output = generate(spec.scenario)
        seq = output.detections
        strategy = _segment(seq, spec.use_kfe, cfg, spec.seed)
        tracks = track_sequence(seq, strategy, spec.fusion, _layer(spec.fusion, seq.feature_dim), scorer, cfg.tracker)
        report = evaluate(tracks, output.gt, name=seq.name)
    except TrackingError as e:
        e.details.update({"kind": spec.scenario.kind.value, "seed": spec.seed, "variant": spec.variant})
        logger.error(f"Ablation cell {spec.scenario.kind.value}/{spec.seed}/{spec.variant} failed: {e.message}")
        raise
    logger.debug(f"Cell {spec.scenario.kind.value}/{spec.seed}/{spec.variant}: HOTA {report.hota}, IDS {report.ids}")
    return {
        "kind": spec.scenario.kind.value,
        "seed": str(spec.seed),
        "variant": spec.variant,
        "hota": _format(report.hota),
        "deta": _format(report.deta),
        "assa": _format(report.assa),
        "idf1": _format(report.idf1),
        "mota": _format(report.mota),
        "ids": str(report.ids),
        "fp": str(report.fp),
        "fn": str(report.fn),
    }


def run_ablation(scenarios: TypingSequence[ScenarioConfig], variants: TypingSequence[str],
                 seeds: TypingSequence[int], cfg: RunConfig, sweep: Optional[TypingSequence[float]] = None,
                 threads: int = 1, train_scenes: int = 0) -> List[Cell]:
    """Every (scenario, seed, variant) cell, in that order whatever the thread count.

    With ``train_scenes`` > 0 every distinct (scenario, segmentation, fusion)
    combination first trains its own scorer; otherwise the prior is used.
    """
    if not scenarios:
        raise ConfigurationError("Ablation suite is empty", key="kind")
    if train_scenes < 0:
        raise ConfigurationError(f"Training scene count must be >= 0, got {train_scenes}", key="train_scenes")
    specs = _cell_specs(scenarios, variants, seeds, cfg, sweep)
    representatives: Dict[Tuple, CellSpec] = {}
    for spec in specs:
        representatives.setdefault(spec.scorer_key, spec)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        trained = {key: executor.submit(train_cell_scorer, spec, cfg, train_scenes)
                   for key, spec in representatives.items()}
        scorers = {key: future.result() for key, future in trained.items()}
        futures = [executor.submit(run_cell, spec, cfg, scorers[spec.scorer_key]) for spec in specs]
        cells = [future.result() for future in futures]
    logger.info(f"Ablation finished: {len(cells)} cells over {len(scenarios)} scenarios and {len(seeds)} seeds, "
                f"{len(scorers)} scorers from {train_scenes} training scenes each")
    return cells


def write_cells(cells: TypingSequence[Cell]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CELL_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(cells)
    return buffer.getvalue()


def read_cells(text: str) -> List[Cell]:
    reader = csv.DictReader(io.StringIO(text))
    missing = [column for column in CELL_COLUMNS if column not in (reader.fieldnames or [])]
    if missing:
        raise ParseError(f"cell file lacks column {missing[0]!r}", 1)
    return [{column: row[column] for column in CELL_COLUMNS} for row in reader]


def _values(cells: TypingSequence[Cell], metric: str) -> np.ndarray:
    return np.array([float(cell[metric]) for cell in cells if cell[metric] != ""])


def sign_test(variant_ids: Dict[str, float], baseline_ids: Dict[str, float]) -> float:
    """One-sided p-value that the variant has fewer identity switches than the baseline, paired by seed."""
    wins = losses = 0
    for seed, ids in variant_ids.items():
        if seed in baseline_ids:
            wins += ids < baseline_ids[seed]
            losses += ids > baseline_ids[seed]
    if wins + losses == 0:
        return 1.0
    return float(binomtest(wins, wins + losses, 0.5, alternative="greater").pvalue)


def summarize_cells(cells: TypingSequence[Cell]) -> List[Cell]:
    """Mean and sample stddev per (kind, variant), plus an IDS sign test against the baseline."""
    groups: Dict[tuple, List[Cell]] = {}
    for cell in cells:
        groups.setdefault((cell["kind"], cell["variant"]), []).append(cell)

    rows = []
    for (kind, variant), members in groups.items():
        row = {"kind": kind, "variant": variant, "cells": str(len(members))}
        for metric in METRICS:
            values = _values(members, metric)
            row[f"{metric}_mean"] = f"{values.mean():.6f}" if len(values) else ""
            row[f"{metric}_std"] = f"{values.std(ddof=1) if len(values) > 1 else 0.0:.6f}" if len(values) else ""
        baseline = groups.get((kind, BASELINE))
        if variant == BASELINE or baseline is None:
            row["ids_p_value"] = ""
        else:
            p = sign_test({c["seed"]: float(c["ids"]) for c in members},
                          {c["seed"]: float(c["ids"]) for c in baseline})
            row["ids_p_value"] = f"{p:.6g}"
        rows.append(row)
    return rows


def write_summary(rows: TypingSequence[Cell]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()
