"""Command-line front end.

    sshladder run <config>          run a scenario (path or preset name)
    sshladder validate <config>     check a config without running it
    sshladder presets list
    sshladder presets dump <name>

The output directory comes from the config's ``output_dir`` unless the
SSHLADDER_OUTPUT_DIR environment variable is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .config import ConfigError, config_hash, parse_config, preset_names, preset_text, read_config
from .scenarios import run_scenario

OUTPUT_DIR_ENV = "SSHLADDER_OUTPUT_DIR"
EXIT_CONFIG = 2
EXIT_OUTPUT = 3


def _load(ref: str):
    """Decoded config from a file path, falling back to a bundled preset name."""
    path = Path(ref)
    if not path.exists():
        try:
            return json.loads(preset_text(ref))
        except KeyError:
            pass
    return read_config(path)


def _report(problems: list[str], ref: str) -> None:
    print(f"{ref}: invalid configuration", file=sys.stderr)
    for problem in problems:
        print(f"  {problem}", file=sys.stderr)


def cmd_run(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    try:
        raw = _load(args.config)
        cfg = parse_config(raw)
    except ConfigError as exc:
        _report(exc.problems, args.config)
        return EXIT_CONFIG
    out_dir = os.environ.get(OUTPUT_DIR_ENV) or cfg["output_dir"]
    digest = config_hash(raw)
    try:
        paths = run_scenario(cfg, out_dir, digest)
    except OSError as exc:
        print(f"cannot write outputs to {out_dir}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_OUTPUT
    summary = {
        "scenario": cfg["kind"],
        "config_hash": digest,
        "outputs": [str(p) for p in paths],
        "wall_time_ms": round((time.perf_counter() - started) * 1e3, 3),
    }
    print(json.dumps(summary, indent=2))
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        parse_config(_load(args.config))
    except ConfigError as exc:
        _report(exc.problems, args.config)
        return EXIT_CONFIG
    print(f"{args.config}: ok")
    return 0


def cmd_presets(args: argparse.Namespace) -> int:
    if args.action == "list":
        for name in preset_names():
            print(name)
        return 0
    if not args.name:
        print("presets dump: a preset name is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        sys.stdout.write(preset_text(args.name))
    except KeyError:
        print(f"unknown preset {args.name!r}; see `sshladder presets list`", file=sys.stderr)
        return EXIT_CONFIG
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sshladder", description="Finite SSH chain simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario config")
    p.add_argument("config", help="config path or preset name")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="validate a scenario config")
    p.add_argument("config", help="config path or preset name")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("presets", help="list or print bundled presets")
    p.add_argument("action", choices=("list", "dump"))
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
