"""Command-line interface: seeded experiment subcommands emitting CSV.

Configuration can come from a flat key=value file (--config) and from
flags; flags win. Exit codes: 0 success, 2 configuration error, 3 internal
numerical-consistency failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .exceptions import ConfigError, ConsistencyError
from .experiments import _FIELD_PARSERS, RUNNERS, ExperimentConfig

_FLAG_HELP = {
    "n": "number of physical qubits",
    "gamma": "comma-separated rates gamma_1..gamma_n",
    "kind": "error basis: dephasing or bitflip",
    "code": "comma-separated code presets (repetition, rotated[k], anti4, random(seed))",
    "tmax": "end of the time grid",
    "steps": "number of time samples",
    "samples": "number of Haar samples (scatter)",
    "seed": "base RNG seed",
    "out": "output CSV path (stdout when omitted)",
    "times": "comma-separated explicit times (tables, regime-map)",
    "objective": "optimizer objective: neg_at_t or delta_slope",
    "tstar": "evaluation time for the neg_at_t objective",
    "restarts": "number of random optimizer starts",
    "h": "step for initial-rate estimates",
    "dt": "integrator step (consistency cross-checks)",
    "axis1": "first rate sweep, gammaK:lo:hi:steps (regime-map)",
    "axis2": "second rate sweep, gammaK:lo:hi:steps (regime-map)",
    "qsteps": "grid points per recovery parameter axis",
    "workers": "worker threads (0 = auto)",
}


def _read_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    mapping = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        mapping[key.strip()] = value.strip()
    return mapping


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aqec",
        description="Correlated-noise channel simulation and code assessment.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, runner in RUNNERS.items():
        summary = (runner.__doc__ or "").strip().splitlines()[0]
        sub = commands.add_parser(name, help=summary, description=summary)
        sub.add_argument("--config", help="flat key=value config file")
        for key in _FIELD_PARSERS:
            sub.add_argument(f"--{key}", help=_FLAG_HELP.get(key))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        mapping = {}
        if args.config:
            mapping.update(_read_config_file(args.config))
            mapping.pop("config", None)
        for key in _FIELD_PARSERS:
            value = getattr(args, key)
            if value is not None:
                mapping[key] = value
        config = ExperimentConfig.from_mapping(mapping)
        text = RUNNERS[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ConsistencyError as exc:
        print(f"consistency error: {exc}", file=sys.stderr)
        return 3
    if not config.out:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
