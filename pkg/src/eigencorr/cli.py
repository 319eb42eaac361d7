"""Command-line entry point: ``eigencorr run`` and ``eigencorr validate``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

THREADS_ENV = "EIGENCORR_THREADS"


def _apply_thread_env():
    n = os.environ.get(THREADS_ENV)
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


def _load(path):
    from .config import parse_config

    with open(path) as fh:
        return parse_config(fh.read())


def main(argv=None) -> int:
    _apply_thread_env()
    parser = argparse.ArgumentParser(prog="eigencorr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a configured pipeline")
    run.add_argument("--config", required=True)
    run.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    run.add_argument("-v", "--verbose", action="store_true")
    val = sub.add_parser("validate", help="check a config file without running it")
    val.add_argument("--config", required=True)
    args = parser.parse_args(argv)

    from .config import ConfigError

    try:
        cfg = _load(args.config)
        if args.command == "validate":
            print(f"{args.config}: ok")
            return 0
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        from .pipeline import run_pipeline

        manifest = run_pipeline(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = args.out or cfg.output_dir
    print(f"wrote {len(manifest['files'])} files and manifest.json to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
