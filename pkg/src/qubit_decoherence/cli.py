"""Command-line entry point: ``qubit-decoherence <command> [flags]``.

Writes CSV with a ``# key = value`` block echoing the resolved
configuration, one header line and rows in ``%.11e`` format. Exit status is
0 on success, 1 for configuration errors and 2 for numerical failures.
"""
import argparse
import sys

import numpy as np

from .bath import QuadratureError
from .oracles import ConvergenceError
from .scenarios import COMMAND_DEFAULTS, COMMANDS, ConfigError, ScenarioConfig

FLAG_KEYS = {
    "scheme": str, "model": str, "a": float, "c": float, "J": float, "n": int, "omega_c": float,
    "kT": float, "t_start": float, "t_end": float, "points": int, "theta": float, "phi": float,
    "coupling": str, "rel_tol": float, "out": str, "workers": int, "seed": int, "param": str,
    "c_min": float, "c_max": float, "c_points": int,
}


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; blank lines and ``#`` comments are ignored."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        out[key] = value
    return out


def _convert(key, value):
    if key == "values":
        items = value.replace(",", " ").split() if isinstance(value, str) else value
        return tuple(float(v) for v in items)
    if key == "all_pairs":
        return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
    if key not in FLAG_KEYS:
        raise ConfigError(f"unknown configuration key {key!r}")
    if value is None or (isinstance(value, str) and value.lower() == "none"):
        return None
    try:
        return FLAG_KEYS[key](value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc


def resolve_config(command: str, file_values: dict, flag_values: dict) -> ScenarioConfig:
    """Command defaults, then the config file, then flags (flags win)."""
    given = {}
    for source in (file_values, flag_values):
        for key, value in source.items():
            given[key] = _convert(key, value)
    merged = dict(COMMAND_DEFAULTS[command])
    if command == "fig1" and "c" not in given:
        merged["c"] = given.get("a", 1.0)
    if command == "fig3" and "c" not in given:
        merged["c"] = 15.0 * given.get("a", 1.0)
    if given.get("seed") is not None and "theta" not in given:
        merged["theta"] = None
    merged.update(given)
    try:
        return ScenarioConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def format_csv(command, cfg: ScenarioConfig, table) -> str:
    lines = [f"# command = {command}"]
    for key, value in cfg.items():
        if key == "values":
            value = " ".join(f"{v:.11e}" for v in value)
        lines.append(f"# {key} = {value}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        cells = [str(v) if isinstance(v, (int, np.integer)) else f"{v + 0.0:.11e}" for v in row]  # no "-0"
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _error(message):
    print(f"qubit-decoherence: {message}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qubit-decoherence",
                                     description="Decoherence of a driven qubit in a bosonic bath.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value file; flags override it")
        p.add_argument("--scheme", choices=["short_time", "magnus", "both"])
        p.add_argument("--model", choices=["adiabatic", "rotating_wave"])
        for key in ("a", "c", "J", "omega_c", "kT", "t_start", "t_end", "theta", "phi", "rel_tol"):
            p.add_argument("--" + key.replace("_", "-"), dest=key, type=float)
        p.add_argument("--n", type=int)
        p.add_argument("--points", type=int)
        p.add_argument("--coupling", choices=["sx", "sy", "sz"])
        p.add_argument("--out")
        p.add_argument("--workers", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--all-pairs", dest="all_pairs", action="store_true", default=None)
        if name == "fig4":
            p.add_argument("--c-min", dest="c_min", type=float)
            p.add_argument("--c-max", dest="c_max", type=float)
            p.add_argument("--c-points", dest="c_points", type=int)
        if name == "sweep":
            p.add_argument("--param", choices=["J", "n", "omega_c", "kT", "a", "c", "t"])
            p.add_argument("--values", nargs="+")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config")}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = resolve_config(command, file_values, flags)
        table = COMMANDS[command](cfg)
    except (QuadratureError, ConvergenceError, FloatingPointError, np.linalg.LinAlgError) as exc:
        _error(f"numerical failure: {exc}")
        return 2
    except ValueError as exc:  # ConfigError and invalid physical parameters
        _error(f"configuration error: {exc}")
        return 1
    text = format_csv(command, cfg, table)
    if cfg.out:
        try:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            _error(f"cannot write output: {exc}")
            return 1
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
