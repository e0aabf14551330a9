"""Command-line entry point: simulate, spectrum, ness, validate, figures.

Exit codes: 0 success, 1 validation failure, 2 configuration or I/O error.
"""
from __future__ import annotations

import argparse
import ast
import logging
import math
import operator
import os
import sys

from .csvio import columns_to_csv, rows_to_csv, write_atomic
from .dynamics import DEFAULT_DT
from .errors import ThreeSpinError
from .figures import FIGURES, omega_sweep, write_figure
from .model import ModelParams
from .reports import NESS_HEADER, SPECTRUM_HEADER, ness_rows, spectrum_rows
from .runner import METHOD_CHOICES, ConfigError, RunConfig, simulate_columns
from .validation import validate

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_real(text: str) -> float:
    """A float, optionally written with ``pi`` (e.g. ``pi/2``, ``-3*pi/10``)."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(text)

    try:
        return ev(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None


def read_config(path) -> dict:
    """key=value lines; '#' starts a comment; keys use flag names without dashes."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{n}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def _add_params(p):
    p.add_argument("--epsilon", type=parse_real, default=0.0, help="bath coupling (>= 0)")
    p.add_argument("--mu", type=parse_real, default=0.0, help="bath asymmetry in [-1, 1]")
    p.add_argument("--theta", type=parse_real, default=math.pi / 2, help="rotation angle in radians (pi allowed)")
    p.add_argument("--config", help="file of key=value lines; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="threespin", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="propagate the canonical initial state and write observables")
    _add_params(p)
    p.add_argument("--t-max", type=parse_real, default=10.0)
    p.add_argument("--dt", type=parse_real, default=DEFAULT_DT)
    p.add_argument("--sample-every", type=int, default=10)
    p.add_argument("--method", choices=METHOD_CHOICES, default="auto")
    p.add_argument("--observables", default=None,
                   help="comma list of channels (default: all real channels; empty string for none)")
    p.add_argument("--out", default="-")

    p = sub.add_parser("spectrum", help="block spectra, closed-form roots, omegas, zetas")
    _add_params(p)
    p.add_argument("--theta-sweep", type=int, default=0, metavar="N",
                   help="instead emit Re(omega_i) on N theta values in [0, pi]")
    p.add_argument("--out", default="-")

    p = sub.add_parser("ness", help="closed-form stationary state and its entropies")
    _add_params(p)
    p.add_argument("--out", default="-")

    p = sub.add_parser("validate", help="analytic vs expm vs rk4 agreement report")
    _add_params(p)
    p.add_argument("--t-max", type=parse_real, default=30.0)
    p.add_argument("--tol", type=parse_real, default=1e-6)
    p.add_argument("--dt", type=parse_real, default=DEFAULT_DT)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--out", default=None, help="also write the report here")

    p = sub.add_parser("figures", help="CSV data for figures 2-6")
    p.add_argument("--fig", default="all", help="figure id (2-6) or 'all'")
    p.add_argument("--out", default="figures", help="output directory")
    p.add_argument("--sample-step", type=parse_real, default=0.01)
    p.add_argument("--config", help="file of key=value lines; flags override it")
    return parser


def parse_args(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        values = read_config(known.config)
        for action in parser._subparsers._group_actions:
            for subparser in action.choices.values():
                dests = {a.dest for a in subparser._actions}
                unknown = set(values) - dests
                if unknown and argv and argv[0] in action.choices and subparser is action.choices[argv[0]]:
                    raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
                subparser.set_defaults(**{k: v for k, v in values.items() if k in dests})
    return parser.parse_args(argv)


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def _params(args) -> ModelParams:
    return ModelParams(theta=args.theta, epsilon=args.epsilon, mu=args.mu)


def cmd_simulate(args) -> int:
    if args.observables is None:
        cfg = RunConfig(_params(args), args.t_max, args.dt, args.sample_every, args.method, output_path=args.out)
    else:
        chans = [c.strip() for c in args.observables.split(",") if c.strip()]
        cfg = RunConfig(_params(args), args.t_max, args.dt, args.sample_every, args.method, chans, args.out)
    _emit(columns_to_csv(simulate_columns(cfg)), cfg.output_path)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    p = _params(args)
    if args.theta_sweep:
        _emit(columns_to_csv(omega_sweep(p, args.theta_sweep)), args.out)
    else:
        _emit(rows_to_csv(SPECTRUM_HEADER, spectrum_rows(p)), args.out)
    return EXIT_OK


def cmd_ness(args) -> int:
    _emit(rows_to_csv(NESS_HEADER, ness_rows(_params(args))), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    report = validate(_params(args), args.t_max, args.tol, args.samples, args.dt)
    text = report.text() + "\n"
    sys.stdout.write(text)
    if args.out:
        write_atomic(args.out, text)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_figures(args) -> int:
    if args.fig == "all":
        ids = sorted(FIGURES)
    else:
        try:
            ids = [int(args.fig)]
        except ValueError:
            raise ConfigError(f"unknown figure id {args.fig!r}") from None
        if ids[0] not in FIGURES:
            raise ConfigError(f"unknown figure id {args.fig!r}; choose from {sorted(FIGURES)}")
    for fid in ids:
        for path in write_figure(fid, args.out, args.sample_step):
            print(path)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "ness": cmd_ness,
    "validate": cmd_validate,
    "figures": cmd_figures,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except (ConfigError, OSError) as exc:
        print(f"threespin: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # argparse usage errors exit with 2 already
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ThreeSpinError, ValueError, OSError) as exc:
        print(f"threespin: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
