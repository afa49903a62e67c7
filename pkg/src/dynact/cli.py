"""Command line entry point: ``dynact <stage> --config <path>``."""

from __future__ import annotations

import argparse
import os
import sys

from .config import load_config
from .errors import DynactError
from .pipeline import STAGES, run


def _check_threads_env() -> None:
    raw = os.environ.get("DYNACT_THREADS")
    if raw is None:
        return
    try:
        n = int(raw)
    except ValueError:
        raise DynactError(f"DYNACT_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise DynactError(f"DYNACT_THREADS must be >= 1, got {n}")
    # all numerics run sequentially with a fixed accumulation order, so any
    # permitted thread count produces identical bytes


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dynact", description="Dynamic CT simulation and motion-compensated reconstruction")
    p.add_argument("stage", choices=STAGES, help="pipeline stage to run")
    p.add_argument("--config", required=True, help="path to a pipeline config JSON file")
    p.add_argument("--out", default=None, help="override the config output directory")
    p.add_argument("--seed", type=int, default=None, help="override the config seed (also reseeds boundary noise)")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _check_threads_env()
        cfg = load_config(args.config)
        if args.out is not None:
            cfg.output_dir = args.out
        if args.seed is not None:
            if args.seed < 0:
                raise DynactError("--seed must be >= 0")
            cfg.seed = args.seed
            cfg.boundary.spec.rng_seed = args.seed
        written = run(args.stage, cfg)
    except DynactError as exc:
        print(f"dynact: error: {exc}", file=sys.stderr)
        return exc.exit_code
    for name in written:
        print(os.path.join(cfg.output_dir, name))
    return 0


if __name__ == "__main__":
    sys.exit(main())
