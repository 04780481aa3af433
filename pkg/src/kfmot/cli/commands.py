"""Subcommand handlers. Every handler reads its inputs from files and writes its outputs to files."""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional

from ..association import (
    build_training_set,
    read_scorer,
    track_sequence,
    train_edge_scorer,
    write_scorer,
)
from ..association.training import training_accuracy
from ..core.exceptions import ConfigurationError
from ..evaluation import evaluate, write_report_csv
from ..fusion import fuse_sequence, read_gcn_weights, write_gcn_weights
from ..io.mot_files import (
    attach_features,
    parse_detections,
    parse_feature_file,
    parse_ground_truth,
    parse_results,
    write_detections,
    write_feature_file,
    write_ground_truth,
    write_results,
)
from ..models.association import EdgeScorer
from ..models.config import RUN_CONFIG_KEYS, RunConfig, Settings
from ..models.detection import Sequence
from ..models.fusion import FusionMode, GcnLayer
from ..models.scenario import ScenarioConfig, ScenarioKind
from ..segmentation import equal_segmentation, read_strategy, train_kfe, write_strategy
from ..synth import generate
from .ablation import parse_sweep, read_cells, run_ablation, summarize_cells, write_cells, write_summary

logger = logging.getLogger(__name__)


def read_input(path: str, flag: str) -> str:
    if not os.path.isfile(path):
        raise ConfigurationError(f"Input file not found: {path}", key=flag, details={"path": path})
    return Path(path).read_text()


def write_output(path: Optional[str], text: str) -> None:
    """Write ``text`` to ``path``, or to stdout when no path is given."""
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)
    logger.info(f"Wrote {path}")


def run_config(args: argparse.Namespace) -> RunConfig:
    overrides = {key: getattr(args, key, None) for key in RUN_CONFIG_KEYS}
    config_file = args.config or Settings().config_file
    return RunConfig.from_sources(config_file, overrides)


def load_sequence(args: argparse.Namespace, length: Optional[int] = None) -> Sequence:
    name = args.name or Path(args.dets).stem
    seq = parse_detections(read_input(args.dets, "dets"), name=name, length=length)
    return attach_features(seq, parse_feature_file(read_input(args.feats, "feats")))


def load_layer(path: Optional[str], cfg: RunConfig, dim: int) -> Optional[GcnLayer]:
    if cfg.fusion.mode != FusionMode.GCN:
        return None
    if path is None:
        return GcnLayer.identity(dim, cfg.fusion.activation)
    layer = read_gcn_weights(read_input(path, "gcn-weights"), cfg.fusion.activation)
    if layer.dim != dim:
        raise ConfigurationError(f"GCN weights have dimension {layer.dim}, features have {dim}", key="gcn-weights")
    return layer


def cmd_segment(args: argparse.Namespace) -> int:
    cfg = run_config(args)
    seq = load_sequence(args, args.length)
    if args.equal is not None:
        strategy = equal_segmentation(seq, args.equal, cfg.kfe)
    else:
        strategy = train_kfe(seq, cfg.kfe)
    write_output(args.out, write_strategy(strategy))
    return 0


def cmd_fuse(args: argparse.Namespace) -> int:
    cfg = run_config(args)
    seq = load_sequence(args, args.length)
    fused = fuse_sequence(seq, cfg.fusion, load_layer(args.gcn_weights, cfg, seq.feature_dim))
    write_output(args.out, write_feature_file(fused))
    return 0


def cmd_track(args: argparse.Namespace) -> int:
    cfg = run_config(args)
    strategy = read_strategy(read_input(args.strategy, "strategy"))
    seq = load_sequence(args, strategy.length)
    scorer = read_scorer(read_input(args.scorer, "scorer")) if args.scorer else EdgeScorer.prior(cfg.tracker.levels)
    layer = load_layer(args.gcn_weights, cfg, seq.feature_dim)
    tracks = track_sequence(seq, strategy, cfg.fusion, layer, scorer, cfg.tracker)
    write_output(args.out, write_results(tracks))
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    cfg = run_config(args)
    strategy = read_strategy(read_input(args.strategy, "strategy"))
    seq = load_sequence(args, strategy.length)
    gt = parse_ground_truth(read_input(args.gt, "gt"))
    if cfg.fusion.mode == FusionMode.GCN and args.gcn_weights_in is None:
        layer = GcnLayer.initialize(seq.feature_dim, cfg.training.seed, cfg.fusion.activation)
    else:
        layer = load_layer(args.gcn_weights_in, cfg, seq.feature_dim)
    ts = build_training_set(seq, gt, strategy, cfg.tracker, cfg.fusion, layer)
    result = train_edge_scorer(ts, EdgeScorer.prior(cfg.tracker.levels), cfg.focal, cfg.training, layer)
    logger.info(f"Training accuracy {training_accuracy(ts, result.scorer):.3f} on {ts.num_edges} edges")
    write_output(args.out, write_scorer(result.scorer))
    if args.gcn_weights_out and result.layer is not None:
        write_output(args.gcn_weights_out, write_gcn_weights(result.layer))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    if len(args.gt) != len(args.results):
        raise ConfigurationError("--gt and --results must be given the same number of times", key="results")
    reports = []
    for gt_path, results_path in zip(args.gt, args.results):
        gts = parse_ground_truth(read_input(gt_path, "gt"))
        preds = parse_results(read_input(results_path, "results"))
        reports.append(evaluate(preds, gts, name=Path(results_path).stem))
    write_output(args.out, write_report_csv(reports))
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = run_config(args)
    scenario = ScenarioConfig(
        kind=ScenarioKind(args.kind),
        num_objects=args.objects,
        length=args.frames,
        occlusion_gaps=args.gap or [],
        lookalike_pairs=args.pair or [],
        feature_noise=args.feature_noise,
        box_noise=args.box_noise,
        miss_rate=args.miss_rate,
        motion_jitter=args.motion_jitter,
        feature_dim=args.feature_dim,
        seed=cfg.seed,
    )
    output = generate(scenario)
    out_dir = Path(args.out_dir)
    write_output(str(out_dir / "det.txt"), write_detections(output.detections))
    write_output(str(out_dir / "features.txt"), write_feature_file(output.detections))
    write_output(str(out_dir / "gt.txt"), write_ground_truth(output.gt))
    write_output(str(out_dir / "scenario.json"), output.scenario.model_dump_json(indent=2) + "\n")
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    cfg = run_config(args)
    scenarios = [
        ScenarioConfig(kind=ScenarioKind(kind), num_objects=args.objects, length=args.frames,
                       feature_noise=args.feature_noise, box_noise=args.box_noise, miss_rate=args.miss_rate,
                       motion_jitter=args.motion_jitter, feature_dim=args.feature_dim)
        for kind in args.kind
    ]
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    sweep = parse_sweep(args.sweep_a) if args.sweep_a else None
    seeds = [cfg.seed + k for k in range(args.seeds)]
    cells = run_ablation(scenarios, variants, seeds, cfg, sweep=sweep, threads=args.threads or Settings().threads,
                         train_scenes=args.train_scenes)
    if args.cells_out:
        write_output(args.cells_out, write_cells(cells))
    write_output(args.out, write_summary(summarize_cells(cells)))
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    cells = read_cells(read_input(args.cells, "cells"))
    write_output(args.out, write_summary(summarize_cells(cells)))
    return 0
