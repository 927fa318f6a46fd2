"""Command line entry point: `weakpath run <config>` and `weakpath list`.

Exit codes: 0 success, 1 validation failure, 2 computation error,
3 invariant-check failure.
"""

from __future__ import annotations

import argparse
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .scenarios import ConfigError, list_scenarios, load_config, render_toml, run

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_COMPUTATION = 2
EXIT_CHECK_FAILED = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakpath",
        description="Scenario runner: weak values, path probabilities, favored paths, clock interference.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="Run one scenario from a TOML config.")
    run_p.add_argument("config", metavar="CONFIG", help="path to the scenario config file")
    run_p.add_argument("--out", metavar="DIR", default=None, help="override the output directory")
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    run_p.add_argument("--format", choices=["csv", "json"], default=None, help="result file format")

    sub.add_parser("list", help="List scenario kinds with example configs.")
    return parser


def _cmd_list() -> int:
    for info in list_scenarios():
        print(f"{info['kind']}: {info['description']}")
        for line in render_toml(info["example"]).rstrip("\n").split("\n"):
            print(f"    {line}")
        print()
    return EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        with open(args.config, "rb") as handle:
            raw = tomllib.load(handle)
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except tomllib.TOMLDecodeError as exc:
        print(f"config error: {args.config} is not valid TOML: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        config = load_config(
            raw, out_override=args.out, seed_override=args.seed, format_override=args.format
        )
        result = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:
        print(f"computation error in scenario {raw.get('kind')!r}: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION

    manifest = result.manifest
    for check in manifest["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"check {check['name']}: {status}")
    for name in manifest["outputs"] + ["manifest.json"]:
        print(f"wrote {config.out_dir / name}")
    print(f"scenario {config.kind}: {manifest['status']} in {manifest['wall_time_s']:.3f} s")
    return result.exit_code


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        return _cmd_list()
    return _cmd_run(args)


if __name__ == "__main__":
    raise SystemExit(main())
