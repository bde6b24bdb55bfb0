"""Command-line interface.

    assocnet run    --config cfg.json [overrides]   full pipeline
    assocnet stats  --config cfg.json | --network net.tsv
    assocnet spread --config cfg.json [--retention R --steps N ...]
    assocnet bias   --config cfg.json [--norm l1|l2]
    assocnet stream --config cfg.json --prime W --target W [--cost-mode M]

Exit codes: 0 success, 2 config error, 3 data validation error,
4 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import network, pipeline
from .errors import AssocnetError, ConfigError


def _add_common(parser: argparse.ArgumentParser, config_required=True):
    parser.add_argument("--config", required=config_required, help="run config JSON")
    parser.add_argument("--out", help="override the output directory")
    parser.add_argument("--no-cache", action="store_true", help="recompute every stage")
    parser.add_argument("--retention", type=float, help="activation retained per step")
    parser.add_argument("--steps", type=int, help="diffusion steps (default 2x diameter)")
    parser.add_argument(
        "--initial-activation", type=float, help="starting activation (default node count)"
    )
    parser.add_argument("--min-weight", type=int, help="minimum undirected edge weight")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="assocnet",
        description="Word-association networks, spreading activation, bias reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute the full pipeline")
    _add_common(run)
    run.add_argument("--norm", choices=("l1", "l2"), help="override every approach's norm")

    stats = sub.add_parser("stats", help="build the network and emit its statistics")
    _add_common(stats, config_required=False)
    stats.add_argument("--network", help="print stats for an existing serialized network")

    spread = sub.add_parser("spread", help="run diffusion for every prime spec")
    _add_common(spread)
    spread.add_argument("--primes", help="comma-separated primes (ad-hoc matrix)")
    spread.add_argument("--id", dest="matrix_id", help="artifact id for --primes")

    normalize = sub.add_parser("normalize", help="normalize a stored raw matrix")
    _add_common(normalize)
    normalize.add_argument("--id", dest="matrix_id", required=True)
    normalize.add_argument("--norm", choices=("l1", "l2"), required=True)

    bias_cmd = sub.add_parser("bias", help="normalize matrices and evaluate biases")
    _add_common(bias_cmd)
    bias_cmd.add_argument("--norm", choices=("l1", "l2"), help="override the approach norm")

    stream = sub.add_parser("stream", help="extract a prime->target mindset stream")
    _add_common(stream)
    stream.add_argument("--prime", required=True)
    stream.add_argument("--target", required=True)
    stream.add_argument("--cost-mode", choices=("inverse_weight", "unit"),
                        default="inverse_weight")
    stream.add_argument("--max-paths", type=int, default=16)
    return parser


def _overrides(args) -> dict:
    out = {
        "retention": args.retention,
        "steps": args.steps,
        "initial_activation": args.initial_activation,
        "min_weight": args.min_weight,
        # --out is relative to the caller's directory, not the config file
        "output_dir": str(Path(args.out).resolve()) if args.out else None,
    }
    if args.no_cache:
        out["cache"] = False
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "stats" and args.network:
            net = network.load_network(args.network)
            stats = network.network_stats(net)
            print(pipeline._stats_json(stats), end="")
            return 0
        if args.config is None:
            raise ConfigError("--config is required")
        config = pipeline.load_config(args.config, overrides=_overrides(args))
        if args.command == "run":
            summary = pipeline.run_pipeline(config, norm_override=getattr(args, "norm", None))
        elif args.command == "spread" and args.primes:
            summary = pipeline.run_single_stage(
                config,
                "spread",
                primes=[p.strip().lower() for p in args.primes.split(",") if p.strip()],
                matrix_id=args.matrix_id,
            )
        elif args.command == "normalize":
            summary = pipeline.run_single_stage(
                config, "normalize", norm_override=args.norm, matrix_id=args.matrix_id
            )
        elif args.command == "stream":
            request = pipeline.StreamRequest(
                prime=args.prime.strip().lower(),
                target=args.target.strip().lower(),
                cost_mode=args.cost_mode,
                max_paths=args.max_paths,
            )
            summary = pipeline.run_single_stage(config, "stream", stream_requests=[request])
        else:
            summary = pipeline.run_single_stage(
                config, args.command, norm_override=getattr(args, "norm", None)
            )
        print(json.dumps(summary, indent=2, sort_keys=True))
        return 0
    except AssocnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
