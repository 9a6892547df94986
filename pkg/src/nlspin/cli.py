"""Command-line front end.

Subcommands: ``transform``, ``discriminate``, ``purify``, ``sphere``, ``povm``.
Usage errors (bad flags, out-of-range values) exit with status 2, I/O errors
with status 1.  The default seed is 0 unless ``NLSPIN_SEED`` is set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import List, Optional

from . import discrimination as disc
from .errors import NlspinError
from .output import emit
from .purification import Variant, iterate
from .states import DensityMatrix, pure_from_angles
from .transform import exp_zx_gate, pipeline, sphere_map, xor_gate

SEED_ENV = "NLSPIN_SEED"
MAX_SEED = 2**64 - 1
METHODS = disc.STRATEGIES


class UsageError(Exception):
    pass


def _uint64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2^64-1], got {v}")
    return v


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return v


def _at_least(lo: int):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v

    return parse


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return _uint64(raw)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"{SEED_ENV}: {exc}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv", help="output format (default csv)")
    common.add_argument("--out", metavar="PATH", default=None, help="output file (default stdout)")
    common.add_argument(
        "--seed", type=_uint64, default=None,
        help=f"RNG seed, unsigned 64-bit (default ${SEED_ENV} or 0)",
    )
    common.add_argument("--degrees", action="store_true", help="read angle flags in degrees instead of radians")

    parser = argparse.ArgumentParser(prog="nlspin", description="Nonlinear spin-1/2 state transformations.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("transform", parents=[common], help="square the matrix elements of one spin state")
    p.add_argument("--theta", type=_finite, help="polar angle of a pure input, in [0, pi]")
    p.add_argument("--phi", type=_finite, default=0.0, help="azimuth of a pure input (any finite value, default 0)")
    p.add_argument("--rho", metavar="FILE", help="2x2 density matrix JSON {dim, re, im}; excludes --theta")

    p = sub.add_parser("discriminate", parents=[common], help="analytic and Monte Carlo discrimination")
    p.add_argument("--theta", type=_finite, required=True, help="polar angle of the pair, in (0, pi)")
    p.add_argument("--phi", type=_finite, default=0.0, help="azimuth of the pair (any finite value, default 0)")
    p.add_argument("--method", choices=[*METHODS, "all"], default="all", help="strategy (default all)")
    p.add_argument("--trials", type=_at_least(1), default=100000, help="Monte Carlo trials, >= 1 (default 100000)")

    p = sub.add_parser("purify", parents=[common], help="iterate the purification scheme from a Werner state")
    p.add_argument("--f0", type=_finite, required=True, help="initial singlet fidelity, in [0, 1]")
    p.add_argument("--iterations", type=_at_least(1), default=15, help="rounds, >= 1 (default 15)")
    p.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.MINUS_ONLY.value,
                   help="keep only -- outcomes, or both -- and ++ (default minus-only)")

    p = sub.add_parser("sphere", parents=[common], help="map a grid of pure states through the filter")
    p.add_argument("--gate", choices=["xor", "exp-zx"], default="xor", help="two-spin unitary (default xor)")
    p.add_argument("--n-theta", type=_at_least(2), default=32, help="polar grid points, >= 2 (default 32)")
    p.add_argument("--n-phi", type=_at_least(2), default=64, help="azimuthal grid points, >= 2 (default 64)")

    p = sub.add_parser("povm", parents=[common], help="optimal unambiguous POVM for overlap cos(alpha)")
    p.add_argument("--alpha", type=_finite, required=True, help="half-opening angle, in (0, pi/2)")

    return parser


def _angle(args, value: float) -> float:
    return math.radians(value) if args.degrees else value


def _run(args) -> tuple:
    """Execute a parsed command; returns ``(result, parameters)``."""
    cmd = args.command
    if cmd == "transform":
        if (args.theta is None) == (args.rho is None):
            raise UsageError("transform needs exactly one of --theta or --rho")
        if args.rho is not None:
            with open(args.rho, encoding="utf-8") as fh:
                try:
                    rho = DensityMatrix.from_json(json.load(fh))
                except (json.JSONDecodeError, ValueError) as exc:
                    raise UsageError(f"--rho: {exc}")
            if rho.dim != 2:
                raise UsageError(f"--rho: expected a 2x2 matrix, got dimension {rho.dim}")
            params = {"rho": args.rho}
        else:
            theta, phi = _angle(args, args.theta), _angle(args, args.phi)
            if not 0.0 <= theta <= math.pi:
                raise UsageError(f"--theta must lie in [0, pi] radians, got {theta!r}")
            rho = DensityMatrix.from_pure(pure_from_angles(theta, phi))
            params = {"theta": theta, "phi": phi}
        return pipeline(rho, xor_gate()), params

    if cmd == "discriminate":
        theta, phi = _angle(args, args.theta), _angle(args, args.phi)
        if not 0.0 < theta < math.pi:
            raise UsageError(f"--theta must lie in (0, pi) radians, got {theta!r}")
        methods = list(METHODS) if args.method == "all" else [args.method]
        rows = [
            disc.simulate_trials(m, {"theta": theta, "phi": phi}, args.trials, args.seed)
            for m in methods
        ]
        return rows, {"theta": theta, "phi": phi, "method": args.method, "trials": args.trials}

    if cmd == "purify":
        if not 0.0 <= args.f0 <= 1.0:
            raise UsageError(f"--f0 must lie in [0, 1], got {args.f0!r}")
        traj = iterate(args.f0, args.iterations, Variant(args.variant))
        return traj, {"f0": args.f0, "iterations": args.iterations, "variant": args.variant}

    if cmd == "sphere":
        gate = xor_gate() if args.gate == "xor" else exp_zx_gate()
        return sphere_map(gate, args.n_theta, args.n_phi), {
            "gate": args.gate, "n_theta": args.n_theta, "n_phi": args.n_phi,
        }

    if cmd == "povm":
        alpha = _angle(args, args.alpha)
        if not 0.0 < alpha < math.pi / 2:
            raise UsageError(f"--alpha must lie in (0, pi/2) radians, got {alpha!r}")
        psi1, psi2 = disc.lige_canonical_states(alpha)
        return disc.optimal_povm(psi1, psi2), {"alpha": alpha}

    raise UsageError(f"unknown command {cmd!r}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        if args.seed is None:
            args.seed = _default_seed()
        result, params = _run(args)
    except UsageError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"nlspin: {exc}", file=sys.stderr)
        return 1
    except NlspinError as exc:
        parser.error(str(exc))

    try:
        emit(result, args.format, args.out or sys.stdout, command=args.command, parameters=params, seed=args.seed)
    except OSError as exc:
        print(f"nlspin: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())
