"""``zlab <experiment> --config <path> [--out <dir>] [--seed <int>] [--threads <int>]``."""

from __future__ import annotations

import argparse
import os
import sys

from ..integrate import BlowUpError
from ..spectral import ConfigError
from ..zakharov import InputError
from .config import EXPERIMENTS, ExperimentConfig, load_config
from .runs import EXIT_BLOWUP, EXIT_CONFIG, run_experiment


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zlab", description="Regularised Zakharov experiments.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="YAML config (optional for selfcheck)")
    p.add_argument("--out", help="output directory (default: config output_dir, then $ZLAB_OUT)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--inject-fault", choices=["contraction"], default=None,
                   help="debug: break the Yosida contraction to exercise the invariant report")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        if args.config is None:
            if args.experiment != "selfcheck":
                raise ConfigError(f"{args.experiment} needs --config")
            cfg = ExperimentConfig("selfcheck", seed=args.seed or 0)
        else:
            cfg = load_config(args.config, args.experiment, args.seed)
        out = args.out or cfg.output_dir or os.environ.get("ZLAB_OUT")
        res = run_experiment(cfg, out, args.threads, args.inject_fault)
    except (ConfigError, InputError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(f"blow-up: {exc} (last good t = {exc.t_last_good!r})", file=sys.stderr)
        return EXIT_BLOWUP
    for c in res.manifest.checks:
        info = ", ".join(f"{k}={v}" for k, v in c["measured"].items())
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}  {info}")
    if res.exit_code:
        print("failed: " + ", ".join(res.failures()), file=sys.stderr)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
