"""Command line driver: ``wsnsa run | batch | sweep``.

Exit status: 0 success, 1 usage or I/O error, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .config_io import ParseError, parse_config
from .model import ConfigError, NetworkConfig
from .oracle import TooLarge
from .report import emit_batch, emit_run, emit_sweep

EXIT_OK, EXIT_USAGE, EXIT_CONFIG = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key=value scenario file")
    common.add_argument("--mode", choices=("sa", "contest"), help="monitor selection method")
    common.add_argument("--out", metavar="DIR", default="out", help="output directory")
    common.add_argument("--seed", type=int, help="master seed (first seed for batches)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="wsnsa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="{run,batch,sweep}",
                                parser_class=_Parser)
    sub.add_parser("run", parents=[common], help="single simulation: rounds.csv + summary.csv")

    batch = sub.add_parser("batch", parents=[common], help="repeated runs, averaged")
    batch.add_argument("--runs", type=int, default=10)

    sweep = sub.add_parser("sweep", parents=[common], help="batch per parameter value")
    sweep.add_argument("--var", choices=("nodes", "targets"), required=True)
    sweep.add_argument("--from", dest="start", type=int, required=True)
    sweep.add_argument("--to", dest="stop", type=int, required=True)
    sweep.add_argument("--step", type=int, required=True)
    sweep.add_argument("--runs", type=int, default=10)

    sub.add_parser("oracle", parents=[common])  # no help= keeps it out of the listing
    return parser


def _load_config(args) -> NetworkConfig:
    config = parse_config(args.config) if args.config else NetworkConfig()
    changes = {}
    if args.mode:
        changes["selection_mode"] = args.mode
    if args.seed is not None:
        changes["rng_seed"] = args.seed
    return config.with_(**changes) if changes else config


def _oracle(config: NetworkConfig) -> None:
    from .annealing import anneal, build_context, greedy_seed, random_seed
    from .oracle import min_cover_bruteforce
    from .simulation import SimState
    from .model import STREAM_SA, substream

    state = SimState.create(config)
    eligible = state.eligible()
    result = min_cover_bruteforce(state.coverage, state.graph, eligible)
    print(f"oracle optimum (monitors + relays): {result.optimum}")
    ctx = build_context(state.network, state.coverage, state.graph, eligible, state.model,
                        config.weights)
    rng = substream(config.rng_seed, STREAM_SA)
    try:
        seed = greedy_seed(state.coverage, eligible & ctx.routable, state.network.sensor_energy)
    except LookupError:
        seed = random_seed(rng, len(eligible), eligible)
    best = anneal(seed, config.sa, ctx, rng)
    plan = ctx.plan(best) if ctx.routable[best].all() else None
    print(f"annealer active count: {len(plan.active) if plan else 'infeasible'}")


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _load_config(args)
    except (ParseError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    from .simulation import run_batch, run_simulation, run_sweep

    try:
        if args.command == "run":
            report = run_simulation(config)
            emit_run(report, args.out)
            print(f"lifetime {report.lifetime} rounds ({report.termination_reason})")
        elif args.command == "batch":
            if args.runs < 1:
                raise UsageError("--runs must be >= 1")
            batch = run_batch(config, args.runs, config.rng_seed)
            emit_batch(batch, args.out)
            print(f"mean lifetime {batch.mean:.2f} rounds over {len(batch.runs)} runs "
                  f"(sd {batch.sd:.2f}, min {batch.min}, max {batch.max})")
        elif args.command == "sweep":
            if args.step <= 0 or args.stop < args.start or args.runs < 1:
                raise UsageError("need --step > 0, --to >= --from and --runs >= 1")
            values = np.arange(args.start, args.stop + 1, args.step).tolist()
            points = run_sweep(config, args.var, values, args.runs, config.rng_seed)
            emit_sweep(args.var, points, config, args.out)
            for value, b in points:
                print(f"{args.var}={value}: mean lifetime {b.mean:.2f} (sd {b.sd:.2f})")
        elif args.command == "oracle":
            _oracle(config)
    except TooLarge as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UsageError as exc:
        print(f"wsnsa: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"wsnsa: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main() -> int:
    return run_cli()
