"""Command-line entry point: ``kfmot <subcommand> ...``."""

import argparse
import logging
import sys
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from ..core.exceptions import ConfigurationError, DataValidationError, ParseError, TrackingError
from ..core.logging_config import configure_logging
from ..models.config import RUN_CONFIG_KEYS, Config
from ..models.scenario import ScenarioKind
from . import commands
from .ablation import VARIANTS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2

# short fusion flags of the fuse subcommand
FUSE_ALIASES = {"fusion_mode": "--mode", "fusion_a": "--a", "neighbors": "--m"}


class UsageError(TrackingError):
    """Unknown subcommand, unknown flag or malformed flag value."""

    def __init__(self, message: str):
        super().__init__(message, "USAGE_ERROR")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _int_tuple(size: int):
    def parse(text: str) -> Tuple[int, ...]:
        parts = text.split(",")
        if len(parts) != size:
            raise argparse.ArgumentTypeError(f"expected {size} comma-separated integers, got {text!r}")
        try:
            return tuple(int(part) for part in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(f"non-integer value in {text!r}")
    return parse


def _add_run_config_flags(parser: argparse.ArgumentParser, aliases: Optional[Dict[str, str]] = None) -> None:
    group = parser.add_argument_group("run configuration", "override keys of the key=value config file")
    group.add_argument("--config", default=None, help="Key=value run-config file")
    aliases = aliases or {}
    for key in RUN_CONFIG_KEYS:
        flags = [f"--{key.replace('_', '-')}"] + ([aliases[key]] if key in aliases else [])
        group.add_argument(*flags, dest=key, default=None, metavar="VALUE")


def _add_sequence_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dets", required=True, help="Detection file")
    parser.add_argument("--feats", required=True, help="Feature file")
    parser.add_argument("--name", default=None, help="Sequence name (default: detection file stem)")


def _add_scene_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--objects", type=int, default=5)
    parser.add_argument("--frames", type=int, default=60)
    parser.add_argument("--feature-noise", type=float, default=0.0)
    parser.add_argument("--box-noise", type=float, default=0.0)
    parser.add_argument("--miss-rate", type=float, default=0.0)
    parser.add_argument("--motion-jitter", type=float, default=0.0)
    parser.add_argument("--feature-dim", type=int, default=16)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kfmot", description="Key-frame segmentation, feature fusion and hierarchical tracking")
    parser.add_argument("--log-level", default=None, help="Override KFMOT_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    segment = sub.add_parser("segment", help="Split a sequence into key-frame segments")
    _add_sequence_inputs(segment)
    segment.add_argument("--length", type=int, default=None, help="Frame count (default: last detection frame)")
    segment.add_argument("--equal", type=int, default=None, help="Fixed segment length instead of Q-learning")
    segment.add_argument("--out", required=True, help="Strategy file")
    segment.set_defaults(func=commands.cmd_segment)

    fuse = sub.add_parser("fuse", help="Write intra-frame fused features")
    _add_sequence_inputs(fuse)
    fuse.add_argument("--length", type=int, default=None)
    fuse.add_argument("--gcn-weights", "--weights", default=None, help="GCN weights file (default: identity)")
    fuse.add_argument("--out", required=True, help="Fused feature file")
    fuse.set_defaults(func=commands.cmd_fuse)

    track = sub.add_parser("track", help="Track a sequence with a segmentation and edge scorer")
    _add_sequence_inputs(track)
    track.add_argument("--strategy", required=True, help="Strategy file")
    track.add_argument("--scorer", default=None, help="Scorer weights file (default: hand-set prior)")
    track.add_argument("--gcn-weights", default=None, help="GCN weights file (default: identity)")
    track.add_argument("--out", required=True, help="Results file")
    track.set_defaults(func=commands.cmd_track)

    train = sub.add_parser("train", help="Train the edge scorer from ground truth")
    _add_sequence_inputs(train)
    train.add_argument("--gt", required=True, help="Ground-truth file")
    train.add_argument("--strategy", required=True, help="Strategy file")
    train.add_argument("--gcn-weights-in", default=None)
    train.add_argument("--gcn-weights-out", default=None)
    train.add_argument("--out", required=True, help="Scorer weights file")
    train.set_defaults(func=commands.cmd_train)

    evaluate = sub.add_parser("eval", help="Score results against ground truth")
    evaluate.add_argument("--gt", action="append", required=True, help="Ground-truth file (repeatable)")
    evaluate.add_argument("--results", action="append", required=True, help="Results file (repeatable)")
    evaluate.add_argument("--out", default=None, help="Report CSV (default: stdout)")
    evaluate.set_defaults(func=commands.cmd_eval)

    synth = sub.add_parser("synth", help="Generate a synthetic scene")
    synth.add_argument("--kind", choices=[k.value for k in ScenarioKind], default=ScenarioKind.OCCLUSION.value)
    _add_scene_flags(synth)
    synth.add_argument("--gap", type=_int_tuple(3), action="append", help="Occlusion object,start,length")
    synth.add_argument("--pair", type=_int_tuple(2), action="append", help="Lookalike objects i,j")
    synth.add_argument("--out-dir", required=True)
    synth.set_defaults(func=commands.cmd_synth)

    ablate = sub.add_parser("ablate", help="Run the variant x seed ablation on synthetic suites")
    ablate.add_argument("--kind", choices=[k.value for k in ScenarioKind], action="append", required=True)
    _add_scene_flags(ablate)
    ablate.add_argument("--seeds", type=int, default=20, help="Seeds per scenario, counted up from --seed")
    ablate.add_argument("--variants", default=",".join(VARIANTS), help="Comma-separated variants")
    ablate.add_argument("--sweep-a", default=None, help="Fusion-ratio sweep start:stop:step")
    ablate.add_argument("--train-scenes", type=int, default=4,
                        help="Scenes each variant trains its edge scorer on (0 keeps the prior)")
    ablate.add_argument("--threads", type=int, default=None, help="Parallel cells (default: KFMOT_THREADS)")
    ablate.add_argument("--cells-out", default=None, help="Raw per-cell CSV")
    ablate.add_argument("--out", default=None, help="Summary CSV (default: stdout)")
    ablate.set_defaults(func=commands.cmd_ablate)

    report = sub.add_parser("report", help="Summarise a raw ablation cell CSV")
    report.add_argument("--cells", required=True)
    report.add_argument("--out", default=None, help="Summary CSV (default: stdout)")
    report.set_defaults(func=commands.cmd_report)

    for subparser in (segment, track, train, synth, ablate):
        _add_run_config_flags(subparser)
    _add_run_config_flags(fuse, FUSE_ALIASES)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse, dispatch and map errors to exit codes: 1 invalid input, 2 runtime failure."""
    config = Config.load()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"{build_parser().format_usage()}{e.message}\n")
        return EXIT_INVALID
    except SystemExit as e:
        return int(e.code or 0)

    if args.log_level:
        config.logging.level = args.log_level.upper()
    configure_logging(config.logging)

    try:
        return args.func(args)
    except (ConfigurationError, ParseError, DataValidationError, UsageError) as e:
        logger.error(e.message)
        return EXIT_INVALID
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e.errors()[0]['msg']}")
        return EXIT_INVALID
    except FileNotFoundError as e:
        logger.error(f"File not found: {e.filename}")
        return EXIT_INVALID
    except Exception as e:
        logger.error(f"{args.command} failed: {e}", exc_info=config.logging.level == "DEBUG")
        return EXIT_RUNTIME


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
