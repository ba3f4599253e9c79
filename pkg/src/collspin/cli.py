"""Command-line driver.

Usage::

    collspin [--config FILE] [--h H] [--gamma G] [--gamma0 G0] [--p P] [--s S]
             <command> [options]

Parameter flags may appear before or after the command.  Values are taken
from flags, then from the config file, then from the defaults
(h=1, gamma=1.2, gamma0=0.2, p=0.9, s=17).  The config file is INI text::

    [params]
    p = 0.5
    s = 25

    [grids]
    x_grid = 0:1:64
    lambda_grid = -3:0:256

Exit status: 0 on success, 1 on runtime or I/O failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import configparser
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .model import ModelParams, ParameterError, Sector, validate_params

__all__ = ["UsageError", "RunConfig", "COMMANDS", "parse_cli", "run", "main"]

COMMANDS = ("spectrum", "steady", "gap", "bethe", "edges", "quantize", "density", "p0", "figures")
PARAM_KEYS = ("h", "gamma", "gamma0", "p", "s")
GRID_KEYS = ("x_grid", "lambda_grid", "p_grid")
DEFAULTS = {"h": 1.0, "gamma": 1.2, "gamma0": 0.2, "p": 0.9, "s": 17.0}


class UsageError(Exception):
    """Bad invocation; maps to exit status 2."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: ModelParams
    q: tuple[int, ...] | None = None
    x_grid: np.ndarray | None = None
    lambda_grid: np.ndarray | None = None
    p_grid: np.ndarray | None = None
    n_range: tuple[int, int] | None = None
    mode: int = 0
    out: str = "-"
    svg: Path | None = None
    outdir: Path = Path("figures")
    seed_file: Path | None = None
    explicit: frozenset = field(default_factory=frozenset)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_grid(text: str, name: str = "grid") -> np.ndarray:
    """``a:b:n`` -> n evenly spaced points from a to b inclusive."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"{name}: expected start:stop:count, got {text!r}")
    try:
        a, b = float(parts[0]), float(parts[1])
        n = int(parts[2])
    except ValueError:
        raise UsageError(f"{name}: malformed number in {text!r}") from None
    if not (math.isfinite(a) and math.isfinite(b)):
        raise UsageError(f"{name}: bounds must be finite")
    if n < 2:
        raise UsageError(f"{name}: needs at least 2 points")
    if not b > a:
        raise UsageError(f"{name}: axis must be strictly increasing")
    return np.linspace(a, b, n)


def parse_q(text: str, two_s: int) -> tuple[int, ...] | None:
    """``all``, a comma list ``0,5,-3`` or an inclusive range ``a..b``."""
    text = str(text).strip()
    if text == "all":
        return None
    try:
        if ".." in text:
            a, b = (int(v) for v in text.split(".."))
            qs = tuple(range(a, b + 1))
        else:
            qs = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"q: cannot parse {text!r}") from None
    if not qs:
        raise UsageError("q: empty sector list")
    for q in qs:
        if abs(q) > two_s:
            raise UsageError(f"q: sector {q} outside [-{two_s}, {two_s}]")
    return qs


def _n_range(text: str) -> tuple[int, int]:
    try:
        a, b = (int(v) for v in str(text).split(":"))
    except ValueError:
        raise UsageError(f"n-range: expected a:b, got {text!r}") from None
    if a < 0 or b < a:
        raise UsageError("n-range: need 0 <= a <= b")
    return a, b


def _param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model parameters")
    g.add_argument("--h", type=float, help="field strength (default 1)")
    g.add_argument("--gamma", type=float, help="pumping/decay rate Gamma (default 1.2)")
    g.add_argument("--gamma0", type=float, help="dephasing rate Gamma0 (default 0.2)")
    g.add_argument("--p", type=float, help="pumping imbalance in [-1, 1] (default 0.9)")
    g.add_argument("--s", type=float, help="spin, a multiple of 1/2 (default 17)")
    p.add_argument("--config", type=Path, help="INI file with [params] and [grids] sections")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    _param_flags(common)
    parser = _Parser(prog="collspin", description="Spectra of an open collective spin.",
                     argument_default=argparse.SUPPRESS)
    _param_flags(parser)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    def cmd(name, help_):
        sp = sub.add_parser(name, help=help_, parents=[common], argument_default=argparse.SUPPRESS)
        sp.add_argument("--out", help="output file, '-' for stdout (default)")
        return sp

    sp = cmd("spectrum", "exact diagonalization, CSV of all eigenvalues")
    sp.add_argument("--q", help="'all' (default), list '0,5,-3' or range 'a..b'")
    sp.add_argument("--svg", type=Path, help="also draw the spectrum")

    sp = cmd("steady", "closed-form steady state")
    sp.add_argument("--p-grid", dest="p_grid", help="sweep p over start:stop:count")
    sp.add_argument("--svg", type=Path, help="draw observables vs p (needs --p-grid)")

    cmd("gap", "spectral gap from exact diagonalization")

    sp = cmd("bethe", "solve the Bethe-like equations for one mode")
    sp.add_argument("--q", help="sector (default 0)")
    sp.add_argument("--mode", type=int, help="mode index by decreasing Re(lambda) (default 0)")
    sp.add_argument("--seed-file", dest="seed_file", type=Path,
                    help="JSON with starting roots (a bethe report or a list of [re, im])")

    sp = cmd("edges", "band edges lambda_k(x)")
    sp.add_argument("--x-grid", dest="x_grid", help="start:stop:count (default 0:1:101)")
    sp.add_argument("--svg", type=Path, help="draw the edge curves")

    sp = cmd("quantize", "leading-order quantized levels vs exact eigenvalues")
    sp.add_argument("--q", help="sector (default 5)")

    sp = cmd("density", "continuum density of eigenvalues on a grid")
    sp.add_argument("--x-grid", dest="x_grid", help="start:stop:count (default 0:1:64)")
    sp.add_argument("--lambda-grid", dest="lambda_grid", help="start:stop:count (default -1:0:256)")
    sp.add_argument("--svg", type=Path, help="draw the density as a heat map")

    sp = cmd("p0", "exact spectrum at p = 0 for q in {-1, 0, 1}")
    sp.add_argument("--q", help="sector list (default -1,0,1)")
    sp.add_argument("--n-range", dest="n_range", help="a:b (default 0:2s-|q|)")

    sp = sub.add_parser("figures", help="write fig1.svg .. fig4.svg", parents=[common],
                        argument_default=argparse.SUPPRESS)
    sp.add_argument("--outdir", type=Path, help="output directory (default ./figures)")
    return parser


def _read_config(path: Path) -> tuple[dict, dict]:
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise UsageError(f"config: {path}: {exc}") from None
    params, grids = {}, {}
    for section in cp.sections():
        if section not in ("params", "grids"):
            raise UsageError(f"config: unknown section [{section}]")
        allowed = PARAM_KEYS if section == "params" else GRID_KEYS
        target = params if section == "params" else grids
        for key, value in cp.items(section):
            if key not in allowed:
                raise UsageError(f"config: unknown key {key!r} in [{section}]")
            target[key] = value
    return params, grids


_NEGATIVE_VALUE = re.compile(r"^-\.?\d")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--flag -3:0:9`` into ``--flag=-3:0:9``.

    argparse only recognizes plain negative numbers as values, not grids or
    ranges that start with a minus sign.
    """
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEGATIVE_VALUE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def parse_cli(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(_glue_negative_values([str(a) for a in argv])))
    cfg_params, cfg_grids = _read_config(ns["config"]) if "config" in ns else ({}, {})

    raw, explicit = {}, set()
    for key in PARAM_KEYS:
        if key in ns:
            raw[key] = ns[key]
            explicit.add(key)
        elif key in cfg_params:
            try:
                raw[key] = float(cfg_params[key])
            except ValueError:
                raise UsageError(f"{key}: malformed number {cfg_params[key]!r} in config") from None
            explicit.add(key)
        else:
            raw[key] = DEFAULTS[key]
    command = ns.get("command")
    if command == "p0":
        if "p" in explicit and raw["p"] != 0:
            raise UsageError("p: the p0 command requires p = 0")
        raw["p"] = 0.0
    try:
        params = validate_params(raw)
    except ParameterError as exc:
        raise UsageError(f"{exc.field}: {exc}") from None
    if command is None:
        raise UsageError("a command is required: " + ", ".join(COMMANDS))

    def grid(key, default):
        if key in ns:
            return parse_grid(ns[key], key.replace("_", "-"))
        if key in cfg_grids:
            return parse_grid(cfg_grids[key], key.replace("_", "-"))
        return None if default is None else parse_grid(default, key)

    opts = {"command": command, "params": params, "explicit": frozenset(explicit),
            "out": ns.get("out", "-"), "svg": ns.get("svg")}
    two_s = params.two_s
    if command == "spectrum":
        opts["q"] = parse_q(ns.get("q", "all"), two_s)
    elif command == "steady":
        opts["p_grid"] = grid("p_grid", None)
        if opts["svg"] is not None and opts["p_grid"] is None:
            raise UsageError("svg: the steady plot needs --p-grid")
    elif command == "bethe":
        q = parse_q(ns.get("q", "0"), two_s)
        if q is None or len(q) != 1:
            raise UsageError("q: bethe takes a single sector")
        opts["q"] = q
        opts["mode"] = ns.get("mode", 0)
        if opts["mode"] < 0 or opts["mode"] >= Sector(q[0], two_s).dim:
            raise UsageError(f"mode: index {opts['mode']} outside the sector")
        opts["seed_file"] = ns.get("seed_file")
    elif command == "edges":
        opts["x_grid"] = grid("x_grid", "0:1:101")
    elif command == "quantize":
        q = parse_q(ns.get("q", "5"), two_s)
        if q is None or len(q) != 1:
            raise UsageError("q: quantize takes a single sector")
        opts["q"] = q
    elif command == "density":
        opts["x_grid"] = grid("x_grid", "0:1:64")
        opts["lambda_grid"] = grid("lambda_grid", "-1:0:256")
    elif command == "p0":
        q = parse_q(ns.get("q", "-1,0,1"), two_s)
        if q is None or any(abs(v) > 1 for v in q):
            raise UsageError("q: the p0 closed forms cover q in {-1, 0, 1} only")
        opts["q"] = q
        if "n_range" in ns:
            opts["n_range"] = _n_range(ns["n_range"])
    elif command == "figures":
        opts["outdir"] = ns.get("outdir", Path("figures"))
    for key in ("x_grid", "lambda_grid"):
        g = opts.get(key)
        if key == "x_grid" and g is not None and (g[0] < 0 or g[-1] > 1):
            raise UsageError("x-grid: x = |q|/2s must lie in [0, 1]")
    return RunConfig(**opts)


def run(config: RunConfig) -> None:
    from . import commands
    commands.dispatch(config)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_cli(argv)
    except UsageError as exc:
        print(f"collspin: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        run(config)
    except OSError as exc:
        where = f": {exc.filename}" if exc.filename else ""
        print(f"collspin: I/O error{where}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - every runtime failure maps to status 1
        print(f"collspin: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
