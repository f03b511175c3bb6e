"""Command-line harness.

Subcommands:
  sweep  --config <path> --out <dir>   run the occlusion/mode sweep
  bench  [--config <path>]             per-stage timing + naive/fast check
  decide --cloud <file> --mode <m> --alpha <a>   one decision as JSON
  gen    --seed <s> --alpha <a> --out <file>     emit an occluded fixture

Exit codes: 0 success, 2 configuration error, 3 data error. Worker count
for sweeps comes from the GRASPUQ_THREADS environment variable.
"""

import argparse
import json
import sys

from .config import ExperimentConfig, load_config
from .completion import load_ensemble_dir
from .decision import Mode, ObjectInput, decide
from .errors import ConfigError, DataError, EmptyCloud, GraspUQError, UnsupportedFormat
from .io import load_cloud, save_cloud
from .occlusion import apply_leaf, generate_strawberry, place_leaf
from .bench import run_bench
from .sweep import run_sweep

__all__ = ["main"]

_DATA_ERRORS = (DataError, UnsupportedFormat, EmptyCloud, FileNotFoundError, OSError)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="graspuq",
        description="Grasp feasibility decisions under completion uncertainty",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run the occlusion sweep")
    p_sweep.add_argument("--config", required=True, help="flat JSON config path")
    p_sweep.add_argument("--out", default=None, help="output directory")

    p_bench = sub.add_parser("bench", help="run the timing benchmark")
    p_bench.add_argument("--config", default=None, help="flat JSON config path")

    p_decide = sub.add_parser("decide", help="decide one object from a cloud file")
    p_decide.add_argument("--cloud", required=True, help="partial cloud (.xyz/.ply)")
    p_decide.add_argument("--mode", required=True,
                          help="Baseline | NoDropout | Dropout")
    p_decide.add_argument("--alpha", type=float, required=True,
                          help="occlusion severity for the z schedule")
    p_decide.add_argument("--config", default=None, help="flat JSON config path")
    p_decide.add_argument("--ground", default=None,
                          help="canonical shape file; defaults to the cloud itself")
    p_decide.add_argument("--ensemble-dir", default=None,
                          help="directory of K completion files (Dropout)")
    p_decide.add_argument("--seed", type=int, default=0)

    p_gen = sub.add_parser("gen", help="emit an occluded synthetic fixture")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--alpha", type=float, required=True)
    p_gen.add_argument("--out", required=True, help="output .xyz/.ply path")
    p_gen.add_argument("--config", default=None, help="flat JSON config path")
    p_gen.add_argument("--scale", type=float, default=None,
                       help="fruit scale override (m)")
    return parser


def _load_cfg(path):
    return load_config(path) if path else ExperimentConfig()


def _cmd_sweep(args):
    cfg = _load_cfg(args.config)
    out = args.out if args.out is not None else cfg.out_dir
    if out is None:
        raise ConfigError("sweep needs --out or an out_dir config entry")
    run_sweep(cfg, out_dir=out)
    return 0


def _cmd_bench(args):
    cfg = _load_cfg(args.config)
    table = run_bench(cfg, printer=print)
    print(json.dumps(table, indent=2, sort_keys=True))
    return 0


def _cmd_decide(args):
    cfg = _load_cfg(args.config)
    try:
        mode = Mode.parse(args.mode)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.alpha < 0.0:
        raise ConfigError("alpha must be nonnegative")
    partial = load_cloud(args.cloud)
    ground = load_cloud(args.ground) if args.ground else None
    ensemble = load_ensemble_dir(args.ensemble_dir, cfg.std_mode) \
        if args.ensemble_dir else None
    obj = ObjectInput(
        object_id=args.cloud,
        partial=partial,
        alpha=args.alpha,
        ground_shape=ground,
        ensemble=ensemble,
    )
    report = decide(obj, mode, cfg.decision_config(), args.seed)
    print(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_gen(args):
    cfg = _load_cfg(args.config)
    if args.alpha < 0.0:
        raise ConfigError("alpha must be nonnegative")
    scale = args.scale if args.scale is not None else cfg.fruit_scale_min
    fruit = generate_strawberry(args.seed, cfg.fruit_points, scale)
    leaf = place_leaf(fruit, args.alpha, cfg.leaf_aspect, cfg.leaf_thickness,
                      seed=args.seed)
    outcome = apply_leaf(fruit, leaf)
    save_cloud(outcome.occluded_cloud, args.out)
    print(
        f"wrote {args.out}: {len(outcome.occluded_cloud)} points "
        f"(removed fraction {outcome.removed_fraction:.4f})"
    )
    return 0


_COMMANDS = {
    "sweep": _cmd_sweep,
    "bench": _cmd_bench,
    "decide": _cmd_decide,
    "gen": _cmd_gen,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except GraspUQError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
