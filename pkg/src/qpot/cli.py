"""Command-line front end: expand | profile | trajectory | verify | figures.

Exit codes: 0 ok, 1 verify failure, 2 parse error, 3 incompatible
state/operator/representation, 4 node halt (partial file retained),
5 I/O failure.  Identical invocations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

import numpy as np

from .dynamics import (EffectiveHamiltonian, integrate, symplectic_break,
                       twin_state)
from .energetics import decompose_config, decompose_momentum_qho
from .errors import (IncompatibleError, NodePointError, OperatorParseError,
                     ParseError, QpotError)
from .expansion import (CONFIGURATION, MOMENTUM, REPRESENTATIONS,
                        PolynomialOperator, expand)
from .figures import render_figures
from .output import (divergence_json, profile_csv, state_csv, trajectory_csv,
                     write_text)
from .states import (NATURAL, StateField, UnitSystem, airy_state,
                     linear_momentum_state, qho_state)
from .verify import SUITES, run_suites

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_PARSE = 2
EXIT_INCOMPATIBLE = 3
EXIT_NODE_HALT = 4
EXIT_IO = 5

_TERM_RE = re.compile(
    r"""^
    (?P<coeff>\d+(?:\.\d+)?(?:/\d+)?)?
    (?P<star>\*)?
    (?P<var>[xp])?
    (?:\^(?P<power>\d+))?
    (?:/(?P<div>\d+(?:\.\d+)?))?
    $""", re.VERBOSE)


def parse_operator(text: str) -> PolynomialOperator | None:
    """Parse sums of c*x^n or c*p^n with rational c; None for pure constants.

    Division is only by numbers and x/p never mix; anything else raises
    OperatorParseError naming the offending token.
    """
    compact = text.replace(" ", "")
    if not compact:
        raise OperatorParseError("empty operator")
    pieces = re.findall(r"[+-]?[^+-]+", compact)
    if "".join(pieces) != compact:
        raise OperatorParseError(f"cannot tokenize operator {text!r}")
    variable: str | None = None
    coeffs: dict[int, Fraction] = {}
    for piece in pieces:
        sign = Fraction(1)
        body = piece
        while body and body[0] in "+-":
            if body[0] == "-":
                sign = -sign
            body = body[1:]
        match = _TERM_RE.match(body)
        if match is None or not body:
            raise OperatorParseError(f"cannot parse term {piece!r}")
        coeff_text = match.group("coeff")
        var = match.group("var")
        if coeff_text is None and var is None:
            raise OperatorParseError(f"cannot parse term {piece!r}")
        if match.group("star") and (coeff_text is None or var is None):
            raise OperatorParseError(f"cannot parse term {piece!r}")
        if (match.group("power") or match.group("div") == "0") and var is None:
            raise OperatorParseError(f"cannot parse term {piece!r}")
        coeff = sign * (Fraction(coeff_text) if coeff_text else Fraction(1))
        if match.group("div"):
            divisor = Fraction(match.group("div"))
            if divisor == 0:
                raise OperatorParseError(f"division by zero in {piece!r}")
            coeff /= divisor
        power = int(match.group("power")) if match.group("power") else (
            1 if var else 0)
        if var is not None:
            if variable is None:
                variable = var
            elif variable != var:
                raise OperatorParseError(
                    f"mixed variables {variable!r} and {var!r} in {text!r}")
        coeffs[power] = coeffs.get(power, Fraction(0)) + coeff
    if variable is None:
        return None if not any(coeffs.values()) else PolynomialOperator(
            coefficients=tuple(coeffs.get(i, Fraction(0))
                               for i in range(max(coeffs) + 1)),
            variable="x")
    top = max(coeffs)
    return PolynomialOperator(
        coefficients=tuple(coeffs.get(i, Fraction(0)) for i in range(top + 1)),
        variable=variable)


def parse_units(text: str) -> UnitSystem:
    values = {"hbar": 1.0, "m": 1.0, "omega": 1.0}
    if text.strip():
        for part in text.split(","):
            if "=" not in part:
                raise argparse.ArgumentTypeError(
                    f"unit assignment {part!r} is not key=value")
            key, _, raw = part.partition("=")
            key = key.strip()
            if key not in values:
                raise argparse.ArgumentTypeError(f"unknown unit {key!r}")
            try:
                values[key] = float(Fraction(raw.strip()))
            except (ValueError, ZeroDivisionError):
                raise argparse.ArgumentTypeError(f"bad unit value {raw!r}")
    return UnitSystem(hbar=values["hbar"], mass=values["m"],
                      omega=values["omega"])


def parse_grid(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be min,max,count")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid value {text!r}")
    if count < 9:
        raise argparse.ArgumentTypeError("grid count must be >= 9")
    if not lo < hi:
        raise argparse.ArgumentTypeError("grid needs min < max")
    return np.linspace(lo, hi, count)


def parse_energy(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad energy {text!r}")


def make_state(selector: str, representation: str | None,
               energy: float | None, units: UnitSystem) -> StateField:
    """Build the named state on the axis implied by the representation."""
    if selector == "airy":
        if representation == MOMENTUM:
            raise IncompatibleError(
                "the linear-well bound state lives on the x axis")
        return airy_state(energy if energy is not None else 0.0, units=units)
    if selector == "linear-momentum":
        if representation == CONFIGURATION:
            raise IncompatibleError(
                "the linear-momentum state lives on the p axis")
        return linear_momentum_state(energy if energy is not None else 0.0,
                                     units=units)
    if selector.startswith("qho:"):
        try:
            level = int(selector.split(":", 1)[1])
        except ValueError:
            raise ParseError(f"bad oscillator level in {selector!r}")
        if level < 0:
            raise ParseError("oscillator level must be >= 0")
        if energy is not None:
            raise ParseError("oscillator energy is fixed by the level index")
        axis = "p" if representation == MOMENTUM else "x"
        return qho_state(level, axis=axis, units=units)
    raise ParseError(f"unknown state selector {selector!r}")


def _emit(text: str, path: str | None) -> None:
    if path:
        write_text(path, text)
    else:
        sys.stdout.write(text)


def cmd_expand(args) -> int:
    op = parse_operator(args.op)
    if op is None:
        raise OperatorParseError("operator has no nonzero term")
    if op.degree == 0:
        variable = "p" if args.rep == CONFIGURATION else "x"
        op = PolynomialOperator(coefficients=op.coefficients, variable=variable)
    expansion = expand(op, args.rep)
    if args.latex:
        quantum = expansion.latex("quantum")
        classical = expansion.latex("classical")
        sys.stdout.write(f"quantum: {quantum or '0'}\n")
        sys.stdout.write(f"classical: {classical or '0'}\n")
    else:
        sys.stdout.write(expansion.to_json() + "\n")
    if not expansion.quantum:
        sys.stdout.write("no quantum potential\n")
    if args.out:
        write_text(args.out, expansion.to_json() + "\n")
    return EXIT_OK


def cmd_profile(args) -> int:
    state = make_state(args.state, args.rep, args.energy, args.units)
    representation = args.rep or (CONFIGURATION if state.axis == "x"
                                  else MOMENTUM)
    if representation == CONFIGURATION:
        profile = decompose_config(state, grid=args.grid)
    else:
        profile = decompose_momentum_qho(state, grid=args.grid)
    _emit(profile_csv(profile), args.out)
    if args.state_out:
        write_text(args.state_out, state_csv(state, grid=args.grid))
    return EXIT_OK


def cmd_trajectory(args) -> int:
    state = make_state(args.state, args.rep, args.energy, args.units)
    hamiltonian = EffectiveHamiltonian.for_state(state)
    if hamiltonian.representation == CONFIGURATION:
        if args.x0 is None:
            raise ParseError("configuration trajectories need --x0")
        x0 = args.x0
        p0 = args.p0 if args.p0 is not None else float(state.s_derivative(x0, 1))
    else:
        if args.p0 is None:
            raise ParseError("momentum trajectories need --p0")
        p0 = args.p0
        x0 = args.x0 if args.x0 is not None else -float(state.s_derivative(p0, 1))
    record = integrate(hamiltonian, x0, p0, args.t_end, dt=args.dt)
    _emit(trajectory_csv(record), args.out)
    if args.divergence_out:
        twin = twin_state(state)
        twin_record = integrate(EffectiveHamiltonian.for_state(twin),
                                x0, p0, args.t_end, dt=args.dt)
        if state.axis == "x":
            report = symplectic_break(record, twin_record)
        else:
            report = symplectic_break(twin_record, record)
        write_text(args.divergence_out, divergence_json(report))
    if record.halted is not None:
        sys.stderr.write(f"halted: {record.halted}\n")
        return EXIT_NODE_HALT
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        report = run_suites(args.suite, seed=args.seed)
    except KeyError as exc:
        raise ParseError(f"unknown suite {exc.args[0]!r}")
    text = json.dumps(report, indent=2) + "\n"
    sys.stdout.write(text)
    if args.out:
        write_text(args.out, text)
    if not report["passed"]:
        sys.stderr.write(f"FAIL {report['first_failure']}\n")
        return EXIT_VERIFY
    return EXIT_OK


def cmd_figures(args) -> int:
    for path in render_figures(args.out_dir, units=args.units):
        sys.stdout.write(path + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpot",
        description="Quantum-potential expansion, energetics, and causal "
                    "trajectories for polynomial Hamiltonians.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_units(p):
        p.add_argument("--units", type=parse_units, default=NATURAL,
                       help="comma list hbar=..,m=..,omega=.. (default all 1)")

    p_expand = sub.add_parser("expand",
                              help="expand an operator into quantum and "
                                   "classical parts")
    p_expand.add_argument("--op", required=True,
                          help="polynomial, e.g. 'x^4' or 'p^2/2'")
    p_expand.add_argument("--rep", choices=REPRESENTATIONS, required=True)
    p_expand.add_argument("--latex", action="store_true",
                          help="print LaTeX instead of JSON")
    p_expand.add_argument("--out", help="also write the JSON document here")
    p_expand.set_defaults(func=cmd_expand)

    p_profile = sub.add_parser("profile",
                               help="energy decomposition CSV for a state")
    p_profile.add_argument("--state", required=True,
                           help="airy | linear-momentum | qho:n")
    p_profile.add_argument("--rep", choices=REPRESENTATIONS, default=None)
    p_profile.add_argument("--E", dest="energy", type=parse_energy,
                           default=None, help="state energy (airy and "
                           "linear-momentum only)")
    p_profile.add_argument("--grid", type=parse_grid, default=None,
                           help="min,max,count with count >= 9")
    p_profile.add_argument("--out", help="CSV path (default stdout)")
    p_profile.add_argument("--state-out",
                           help="also dump the state table (axis, R, S, rho)")
    add_units(p_profile)
    p_profile.set_defaults(func=cmd_profile)

    p_traj = sub.add_parser("trajectory", help="integrate a causal trajectory")
    p_traj.add_argument("--state", required=True)
    p_traj.add_argument("--rep", choices=REPRESENTATIONS, default=None)
    p_traj.add_argument("--E", dest="energy", type=parse_energy, default=None)
    p_traj.add_argument("--x0", type=float, default=None)
    p_traj.add_argument("--p0", type=float, default=None)
    p_traj.add_argument("--t-end", type=float, default=4.0)
    p_traj.add_argument("--dt", type=float, default=1e-3)
    p_traj.add_argument("--out", help="CSV path (default stdout)")
    p_traj.add_argument("--divergence-out",
                        help="write the matched-pair divergence JSON here")
    add_units(p_traj)
    p_traj.set_defaults(func=cmd_trajectory)

    p_verify = sub.add_parser("verify", help="run invariant suites")
    p_verify.add_argument("--suite", default="all",
                          help="one of: " + ", ".join(list(SUITES) + ["all"]))
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument("--out", help="also write the JSON report here")
    p_verify.set_defaults(func=cmd_verify)

    p_fig = sub.add_parser("figures",
                           help="write figure CSVs and PNGs to a directory")
    p_fig.add_argument("--out-dir", required=True)
    add_units(p_fig)
    p_fig.set_defaults(func=cmd_figures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except IncompatibleError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INCOMPATIBLE
    except NodePointError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NODE_HALT
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except QpotError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INCOMPATIBLE


def run() -> None:
    sys.exit(main())
