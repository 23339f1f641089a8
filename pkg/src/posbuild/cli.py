"""Command-line entry point: ``posbuild solve|sweep <config.json>``."""

from __future__ import annotations

import argparse
import logging
import sys

from .scenario import EXIT_CONFIG, ConfigError, load_config, run_config, run_sweep

logger = logging.getLogger("posbuild")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posbuild",
        description="Best responses and two-trader equilibria for position building.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "run one scenario (best_response, equilibrium or closed_form)"),
        ("sweep", "run a parameter sweep scenario"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="scenario JSON file")
        p.add_argument("--out", help="output directory (overrides the scenario's 'output')")
        p.add_argument("--quiet", action="store_true", help="only report errors")
        p.add_argument(
            "--seedless",
            action="store_true",
            help="reserved; rejected because runs are deterministic and use no random numbers",
        )
        if name == "sweep":
            p.add_argument("--jobs", type=int, default=1, help="worker processes for sweep cells (default 1)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.seedless:
        logger.error("--seedless is reserved: no random numbers are used, so there is no seed to drop")
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config, output=args.out)
        if args.command == "sweep":
            if cfg.mode != "sweep":
                raise ConfigError("mode", f"sweep needs mode 'sweep', got {cfg.mode!r}")
            if args.jobs < 1:
                raise ConfigError("--jobs", "must be >= 1")
            code = run_sweep(cfg, jobs=args.jobs)
            status = "sweep finished"
        else:
            if cfg.mode == "sweep":
                raise ConfigError("mode", "use the 'sweep' command for sweep scenarios")
            result = run_config(cfg)
            code, status = result.exit_code, result.status
    except ConfigError as exc:
        logger.error("config error: %s", exc)
        return EXIT_CONFIG
    if not args.quiet:
        print(f"{status}: artifacts in {cfg.output}")
    return code


if __name__ == "__main__":
    sys.exit(main())
