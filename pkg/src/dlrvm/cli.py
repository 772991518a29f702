"""Command line entry point: ``simulate <config-file> [--out DIR] [--seed N] [--oracle]``.

Exit codes: 0 success, 1 configuration error, 2 numerical abort.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .config import ConfigError, parse_config, resolve
from .driver import grid_of, simulate
from .grid import GridError
from .scenarios import ScenarioError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simulate",
        description="Dynamical low-rank Vlasov-Maxwell (1x2v) simulation.",
    )
    p.add_argument("config", help="path to a key = value configuration file")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--seed", type=int, help="seed for the rank-padding vectors (overrides seed)")
    p.add_argument("--oracle", action="store_true", help="run the full-tensor reference solver (small grids only)")
    p.add_argument("-q", "--quiet", action="store_true", help="suppress per-step progress on stderr")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.out is not None:
            cfg = replace(cfg, output_dir=args.out)
        cfg = resolve(cfg)
        grid = grid_of(cfg)
        if args.oracle and grid.full_size > 2**24:
            raise ConfigError(f"--oracle needs n_x*n_v1*n_v2 <= 2**24, got {grid.full_size}")
        if cfg.rank > min(grid.n_x, grid.n_v):
            raise ConfigError(f"rank: {cfg.rank} exceeds min(n_x, n_v1*n_v2) = {min(grid.n_x, grid.n_v)}", key="rank")
    except OSError as exc:
        print(f"simulate: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, GridError, ScenarioError) as exc:
        print(f"simulate: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    result = simulate(cfg, out_dir=cfg.output_dir, oracle=args.oracle, progress=not args.quiet)
    if not result.ok:
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
