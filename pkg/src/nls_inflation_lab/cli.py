"""Command-line interface for the experiment drivers.

Subcommands: ``trees``, ``verify-lemmas``, ``xi1-bound``, ``inflate``,
``sweep``, ``oracle-compare``.  Configuration is a plain-text ``key=value``
file (``#`` starts a comment) passed via ``--config``, with individual
overrides via repeatable ``--set key=value``; unknown keys are rejected.
Results go to ``--out`` as CSV (printed to standard output otherwise), a
human-readable summary goes to standard output, and ``--summary`` emits a
single machine-readable ``key=value`` line on standard error.

Exit codes: 0 success; 1 usage/configuration error; 2 a verified property
failed (regime conditions, lemma ceilings, phase positivity, oracle
agreement); 3 a numerical guard tripped; 4 an inflation run completed with
conditions satisfied but dominance/closeness not yet reached.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable, Optional, Sequence

from . import experiments
from .experiments import (
    EXIT_GUARD,
    EXIT_USAGE,
    ReportTable,
    render_csv,
    summary_line,
)
from .oracle import AliasingError, DivergenceError
from .spectra import SupportCapError
from .trees import EnumerationCapError

__all__ = ["main", "UsageError"]


class UsageError(ValueError):
    """Bad command line or configuration input."""


class _Parser(argparse.ArgumentParser):
    """Argument parser that raises instead of calling ``sys.exit``."""

    def error(self, message: str) -> None:  # noqa: D401 - argparse hook
        raise UsageError(message)


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _parse_int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(part) for part in raw.split(",") if part.strip())


def _parse_float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(part) for part in raw.split(",") if part.strip())


# For each subcommand: config key -> (converter, human description).
_SCHEMAS: dict[str, dict[str, Callable[[str], object]]] = {
    "trees": {"jmax": int},
    "verify-lemmas": {
        "t": float,
        "nodes": int,
        "A": int,
        "jmax": int,
        "u0": str,
        "ceiling": float,
    },
    "xi1-bound": {
        "d": int,
        "s": float,
        "N_list": _parse_int_list,
        "c": float,
        "n": int,
        "R": float,
    },
    "inflate": {
        "d": int,
        "s": float,
        "N": int,
        "J": int,
        "u0": str,
        "n": int,
        "margin": float,
        "nodes": int,
        "t_points": int,
        "wick": _parse_bool,
    },
    "sweep": {
        "axis": str,
        "d": int,
        "s": float,
        "N": int,
        "A": int,
        "R": float,
        "c": float,
        "values": _parse_float_list,
    },
    "oracle-compare": {
        "d": int,
        "u0": str,
        "jmax": int,
        "nodes": int,
        "t": float,
        "steps": int,
        "K": int,
    },
}

_COMMANDS: dict[str, Callable[..., ReportTable]] = {
    "trees": experiments.cmd_trees,
    "verify-lemmas": experiments.cmd_verify_lemmas,
    "xi1-bound": experiments.cmd_xi1_lower_bound,
    "inflate": experiments.cmd_inflate,
    "sweep": experiments.cmd_scaling_sweep,
    "oracle-compare": experiments.cmd_oracle_compare,
}


def read_config_file(path: str) -> dict[str, str]:
    """Parse a ``key=value`` configuration file with ``#`` comments."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise UsageError(
                    f"{path}:{lineno}: expected key=value, got {stripped!r}"
                )
            key, raw = stripped.split("=", 1)
            values[key.strip()] = raw.strip()
    return values


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="nls-inflation-lab",
        description="Numerical experiments for norm inflation of cubic NLS "
        "in negative-order Sobolev spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, op in _COMMANDS.items():
        cmd = sub.add_parser(name, help=(op.__doc__ or "").splitlines()[0])
        cmd.add_argument("--config", metavar="PATH", default=None,
                         help="key=value configuration file ('#' comments)")
        cmd.add_argument("--set", metavar="KEY=VALUE", action="append",
                         default=[], dest="overrides",
                         help="override one configuration key (repeatable)")
        cmd.add_argument("--out", metavar="PATH", default=None,
                         help="write the result table as CSV to PATH")
        cmd.add_argument("--summary", action="store_true",
                         help="emit a single key=value summary line on stderr")
        cmd.add_argument("--no-timestamp", action="store_true",
                         help="omit the generation-timestamp comment from CSV")
    return parser


def _collect_kwargs(command: str, args: argparse.Namespace) -> dict[str, object]:
    raw: dict[str, str] = {}
    if args.config is not None:
        raw.update(read_config_file(args.config))
    for item in args.overrides:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        raw[key.strip()] = value.strip()
    schema = _SCHEMAS[command]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise UsageError(
            f"unknown configuration keys for {command}: {', '.join(unknown)}"
        )
    kwargs: dict[str, object] = {}
    for key, value in raw.items():
        try:
            kwargs[key] = schema[key](value)
        except ValueError as exc:
            raise UsageError(f"bad value for {key}: {exc}") from exc
    return kwargs


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        kwargs = _collect_kwargs(args.command, args)
        table = _COMMANDS[args.command](**kwargs)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SupportCapError, EnumerationCapError, AliasingError,
            DivergenceError) as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD

    csv_text = render_csv(table, timestamp=not args.no_timestamp)
    if args.out is not None:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(csv_text)
    for key, value in table.summary.items():
        print(f"{key}: {experiments.format_value(value)}")
    print(f"exit_code: {table.exit_code}")
    if args.summary:
        print(summary_line(table), file=sys.stderr)
    return table.exit_code


if __name__ == "__main__":
    sys.exit(main())
