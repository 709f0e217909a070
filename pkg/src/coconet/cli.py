"""Command-line front end.

Bank indices are 1-based everywhere on this interface. Results go to
``--out`` (or stdout) as JSON or CSV; errors are reported on stderr as a JSON
record ``{"error": ..., "message": ...}``. Exit status: 0 on success, 1 for a
model error, 2 for an unreadable configuration or bad arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .errors import CocoError, DimensionMismatch, InternalInvariantBroken
from .forward import boundary_consistency_check, partition_of, phi
from .limits import DEFAULT_M_GRID, limit_convergence_check
from .matrix import matrix_suite
from .model import Network, classify_fairness, network_from_dict, subset_to_list
from .regions import DEFAULT_RESOLUTION, DEFAULT_WINDOW, grid_map
from .solver import (
    RESIDUAL_RTOL,
    _scale_tol,
    enumerate_equilibria,
    fictitious_conversion,
    subfair_witness,
)
from .superfair import decompose, fixed_point_iterate, superfair_solve


class ConfigError(Exception):
    """Unreadable configuration or malformed argument (exit status 2)."""


def _floats(text: str | None, what: str) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ConfigError(f"{what} must be comma-separated numbers, got {text!r}") from None


def _vector(text: str | None, what: str, net: Network) -> np.ndarray:
    vals = _floats(text, what)
    if vals is None:
        raise ConfigError(f"{what} is required for this command")
    if len(vals) != net.n:
        raise DimensionMismatch(f"{what} has {len(vals)} entries, network has {net.n} banks")
    return np.array(vals)


def _load(path: str | None) -> Network:
    if path is None:
        raise ConfigError("--net is required")
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read network config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("network config must be a JSON object")
    try:
        return network_from_dict(raw)
    except CocoError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed network config: {exc}") from None


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _verified(eqs) -> None:
    for eq in eqs:
        if eq.residual > _scale_tol(eq.s, RESIDUAL_RTOL):
            raise InternalInvariantBroken(f"residual {eq.residual:.3g} for {eq.label} fails the round-trip check")


# ---------------------------------------------------------------- commands


def cmd_validate(args, net: Network) -> str:
    return _json({"valid": True, "network": net.to_dict()})


def cmd_classify(args, net: Network) -> str:
    return _json(classify_fairness(net).to_dict())


def cmd_phi(args, net: Network) -> str:
    s = _vector(args.s, "--s", net)
    return _json({"s": s.tolist(), "partition": partition_of(s, net).to_dict(), "a": phi(s, net).tolist()})


def cmd_solve(args, net: Network) -> str:
    a = _vector(args.a, "--a", net)
    method = args.method
    if method == "enumerate":
        eqs = enumerate_equilibria(a, net)
        _verified(eqs)
        return _json({"method": method, "a": a.tolist(), **eqs.to_dict()})
    if method == "fictitious":
        res = fictitious_conversion(a, net)
        _verified([res.equilibrium])
        return _json(
            {
                "method": method,
                "a": a.tolist(),
                "count": 1,
                "equilibria": [res.equilibrium.to_dict()],
                "iterations": res.iterations,
                "solved_by": res.method,
            }
        )
    eq = superfair_solve(a, net)
    _verified([eq])
    return _json({"method": method, "a": a.tolist(), "count": 1, "equilibria": [eq.to_dict()]})


def cmd_witness(args, net: Network) -> str:
    if args.bank is None:
        raise ConfigError("--bank is required")
    if not 1 <= args.bank <= net.n:
        raise DimensionMismatch(f"--bank must be in 1..{net.n}")
    a = subfair_witness(args.bank - 1, net)
    count = enumerate_equilibria(a, net).count
    if count != 0:
        raise InternalInvariantBroken(f"witness point has {count} equilibria")
    return _json({"bank": args.bank, "a": a.tolist(), "count": count})


def cmd_trace_fp(args, net: Network) -> str:
    a = _vector(args.a, "--a", net)
    dec = decompose(net)
    trace = fixed_point_iterate(a, dec)
    eq = superfair_solve(a, net)
    _verified([eq])
    return _json(
        {
            "a": a.tolist(),
            "d": dec.d.tolist(),
            "steps": [subset_to_list(X) for X in trace.steps],
            "K": trace.K,
            "fixed_point": subset_to_list(trace.fixed_point),
            "records": trace.records(),
            "equilibrium": eq.to_dict(),
        }
    )


def cmd_check(args, net: Network) -> str:
    if args.seed is None:
        raise ConfigError("check is randomized: --seed is required")
    trials = 1000 if args.trials is None else args.trials
    suite = matrix_suite(net, trials=trials, seed=args.seed)
    boundary = boundary_consistency_check(net, trials=trials, seed=args.seed)
    return _json({"seed": args.seed, "trials": trials, "matrix": suite, "boundary": boundary.to_dict()})


def cmd_limits(args, net: Network) -> str:
    a = _vector(args.a, "--a", net)
    grid = _floats(args.m_grid, "--m-grid") or list(DEFAULT_M_GRID)
    if any(m <= 0 for m in grid):
        raise ConfigError("--m-grid values must be positive")
    report = limit_convergence_check(a, net, grid)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", *(f"v_{i + 1}" for i in range(net.n)), "dist_EN", "dist_cancel"])
    for row in report.rows():
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def cmd_grid(args, net: Network) -> str:
    window = _floats(args.window, "--window") or list(DEFAULT_WINDOW)
    if len(window) != 2 or not window[0] < window[1]:
        raise ConfigError("--window must be two increasing numbers a,b")
    res = DEFAULT_RESOLUTION if args.res is None else args.res
    if res < 2:
        raise ConfigError("--res must be at least 2")
    axes = _floats(args.axes, "--axes") or [1, 2]
    if len(axes) != 2:
        raise ConfigError("--axes must name two banks")
    fixed = None if args.a is None else _vector(args.a, "--a", net)
    gm = grid_map(net, window, res, axes=(int(axes[0]) - 1, int(axes[1]) - 1), fixed=fixed)
    return gm.to_csv()


COMMANDS = {
    "validate": (cmd_validate, "check the network invariants"),
    "classify": (cmd_classify, "label each bank's threshold as sub-fair, fair or super-fair"),
    "phi": (cmd_phi, "asset values rationalising the prices given by --s"),
    "solve": (cmd_solve, "equilibria at the asset values given by --a"),
    "witness": (cmd_witness, "asset values with no equilibrium, around sub-fair --bank"),
    "trace-fp": (cmd_trace_fp, "healthy-set fixed-point iteration at --a"),
    "check": (cmd_check, "matrix and boundary property checks (needs --seed)"),
    "limits": (cmd_limits, "convergence to the two m-limits at --a, as CSV"),
    "grid": (cmd_grid, "equilibrium counts on an asset grid, as CSV"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coconet",
        description="Equilibrium prices in networks of banks cross-holding convertible debt. "
        "Bank indices are 1-based.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--net", help="network JSON file")
        p.add_argument("--out", help="output file (default: stdout)")
        if name in ("solve", "trace-fp", "limits", "grid"):
            p.add_argument("--a", help="asset values, comma-separated (grid: values off the slice)")
        if name == "phi":
            p.add_argument("--s", help="stock prices, comma-separated")
        if name == "solve":
            p.add_argument("--method", choices=("enumerate", "fictitious", "superfair-fp"), default="enumerate")
        if name == "grid":
            p.add_argument("--window", help="grid range a,b for both axes (default -20,40)")
            p.add_argument("--res", type=int, help="points per axis (default 241)")
            p.add_argument("--axes", help="the two banks spanning the slice (default 1,2)")
        if name == "check":
            p.add_argument("--seed", type=int)
            p.add_argument("--trials", type=int)
        if name == "limits":
            p.add_argument("--m-grid", dest="m_grid", help="share counts, comma-separated")
        if name == "witness":
            p.add_argument("--bank", type=int, help="sub-fair bank (1-based)")
    return parser


_VECTOR_FLAGS = ("--a", "--s", "--window", "--m-grid", "--axes")


def _join_vector_flags(argv: list[str]) -> list[str]:
    """Let ``--a -6,16`` through: argparse would read ``-6,16`` as a flag."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VECTOR_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_join_vector_flags(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as exc:
        return int(exc.code or 0)
    func = COMMANDS[args.command][0]
    try:
        net = _load(args.net)
        text = func(args, net)
    except ConfigError as exc:
        _error("ConfigError", str(exc))
        return 2
    except CocoError as exc:
        _error(type(exc).__name__, str(exc))
        return 1
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
