"""Invariant suites behind the `verify` subcommand.

Each suite re-derives a frozen closed form or tolerance-checked identity
and reports named pass/fail checks; the CLI maps any failure to exit 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dynamics import EffectiveHamiltonian, integrate, representation_pair
from .energetics import (continuity_residual, decompose_config,
                         decompose_momentum_qho, density_maxima,
                         profile_for_state, stationarity_residual,
                         wigner_moment_check)
from .expansion import (CONFIGURATION, MOMENTUM, ExpansionTerm,
                        PolynomialOperator, evaluate_expansion, expand)
from .oracle import evaluate_terms_exact, operator_quotient, oracle_exact
from .states import (airy_state, linear_momentum_state, polynomial_state,
                     qho_state)


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str


def _check(results: list[CheckResult], suite: str, name: str, passed: bool,
           detail: str) -> None:
    results.append(CheckResult(suite=suite, name=name, passed=bool(passed),
                               detail=detail))


def _term(coeff, hbar_power, r_orders, s_orders) -> ExpansionTerm:
    return ExpansionTerm(coefficient=Fraction(coeff), hbar_power=hbar_power,
                         r_orders=tuple(r_orders), s_orders=tuple(s_orders))


QUARTIC_QUANTUM = (
    _term(1, 4, (4,), ()),
    _term(-6, 2, (2,), (1, 1)),
    _term(-12, 2, (1,), (2, 1)),
    _term(-3, 2, (), (2, 2)),
    _term(-4, 2, (), (3, 1)),
)
QUARTIC_CLASSICAL = (_term(1, 0, (), (1, 1, 1, 1)),)


def suite_vq4() -> list[CheckResult]:
    results: list[CheckResult] = []
    ex = expand(PolynomialOperator.monomial(4, "x"), MOMENTUM)
    _check(results, "vq4", "quantum-terms-exact", ex.quantum == QUARTIC_QUANTUM,
           f"got {len(ex.quantum)} quantum terms")
    _check(results, "vq4", "classical-term-exact",
           ex.classical == QUARTIC_CLASSICAL, "classical part (S')^4")
    return results


def suite_quadratic() -> list[CheckResult]:
    results: list[CheckResult] = []
    kin = expand(PolynomialOperator.kinetic(1), CONFIGURATION)
    want_q = (_term(Fraction(-1, 2), 2, (2,), ()),)
    want_c = (_term(Fraction(1, 2), 0, (), (1, 1)),)
    _check(results, "quadratic", "kinetic-config",
           kin.quantum == want_q and kin.classical == want_c,
           "p^2/2 -> -hbar^2 R''/(2R) + (S')^2/2")
    pot = expand(PolynomialOperator.harmonic(1, 1), MOMENTUM)
    _check(results, "quadratic", "harmonic-momentum",
           pot.quantum == want_q and pot.classical == want_c,
           "x^2/2 -> -(hbar^2/2) R''/R + (S')^2/2")
    return results


def suite_linear() -> list[CheckResult]:
    results: list[CheckResult] = []
    ex = expand(PolynomialOperator.linear(), MOMENTUM)
    _check(results, "linear", "quantum-structurally-empty",
           ex.quantum == (), f"{len(ex.quantum)} quantum terms")
    _check(results, "linear", "classical-sign",
           ex.classical == (_term(Fraction(-1, 2), 0, (), (1,)),),
           "x/2 -> -S'/2 on the momentum side")
    return results


def _random_polynomials(rng):
    r_coeffs = [Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))
                for _ in range(4)]
    if r_coeffs[0] == 0:
        r_coeffs[0] = Fraction(3)
    s_coeffs = [Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
                for _ in range(5)]
    return tuple(r_coeffs), tuple(s_coeffs)


def suite_oracle(seed: int = 42, cases: int = 24) -> list[CheckResult]:
    """Engine evaluation versus direct complex differentiation."""
    results: list[CheckResult] = []
    rng = np.random.default_rng(seed)
    hbars = (Fraction(1), Fraction(1, 2), Fraction(1, 3))
    worst = 0.0
    exact_all = True
    for case in range(cases):
        r_coeffs, s_coeffs = _random_polynomials(rng)
        degree = int(rng.integers(1, 7))
        representation = CONFIGURATION if case % 2 == 0 else MOMENTUM
        variable = "p" if representation == CONFIGURATION else "x"
        coeff = Fraction(int(rng.integers(1, 6)), int(rng.integers(1, 4)))
        op = PolynomialOperator.monomial(degree, variable, coeff)
        state = polynomial_state(r_coeffs, s_coeffs, axis="x" if variable == "p" else "p")
        hbar = hbars[case % 3]
        pts = []
        while len(pts) < 5:
            z = float(rng.uniform(-0.6, 0.6))
            if abs(state.r_derivative(z, 0)) > 0.3:
                pts.append(z)
        pts = np.array(pts)
        terms = expand(op, representation).terms
        engine = evaluate_expansion(terms, state, pts, hbar=float(hbar))
        direct = operator_quotient(state, op, representation, pts,
                                   hbar=float(hbar)).real
        rel = float(np.max(np.abs(engine - direct)
                           / np.maximum(np.abs(direct), 1.0)))
        worst = max(worst, rel)
        for xi in (Fraction(1, 2), Fraction(-1, 3), Fraction(2, 5)):
            if state.r_derivative_exact(xi, 0) == 0:
                continue
            lhs = evaluate_terms_exact(terms, r_coeffs, s_coeffs, xi, hbar)
            rhs = oracle_exact(op, representation, r_coeffs, s_coeffs, xi, hbar)
            exact_all = exact_all and (lhs == rhs.re)
    _check(results, "oracle", "float-agreement", worst <= 1e-12,
           f"worst relative gap {worst:.3e} over {cases} cases")
    _check(results, "oracle", "exact-agreement", exact_all,
           "rational arithmetic matches termwise")
    return results


def _all_states():
    return (airy_state(0.0), linear_momentum_state(0.0), qho_state(0),
            qho_state(2), qho_state(0, axis="p"), qho_state(2, axis="p"))


def suite_stationarity() -> list[CheckResult]:
    results: list[CheckResult] = []
    for state in _all_states():
        residual = stationarity_residual(state)
        _check(results, "stationarity", f"{state.label}-{state.axis}",
               residual <= 1e-9, f"max |H_eff - E| = {residual:.3e}")
    return results


def suite_splitting() -> list[CheckResult]:
    results: list[CheckResult] = []
    states = (airy_state(0.0), qho_state(0), qho_state(2),
              qho_state(0, axis="p"), qho_state(2, axis="p"))
    for state in states:
        profile = profile_for_state(state)
        ok = ~profile.mask
        split = float(np.max(np.abs(profile.Q[ok] - profile.disp[ok]
                                    - profile.loc[ok])))
        _check(results, "splitting", f"{state.label}-{state.axis}-sum",
               split <= 1e-10, f"max |Q - disp - loc| = {split:.3e}")
        dom = float(np.min(profile.disp[ok] - profile.loc[ok]))
        _check(results, "splitting", f"{state.label}-{state.axis}-dominance",
               dom >= -1e-12, f"min (disp - loc) = {dom:.3e}")
        gaps = []
        for z in density_maxima(state):
            r0 = float(state.r_derivative(z, 0))
            r1 = float(state.r_derivative(z, 1))
            gaps.append(profile.coefficient * (r1 / r0) ** 2)
        peak = max(gaps) if gaps else 0.0
        _check(results, "splitting", f"{state.label}-{state.axis}-tangency",
               bool(gaps) and peak <= 1e-8,
               f"max |disp - loc| at {len(gaps)} maxima = {peak:.3e}")
    return results


def suite_trajectories() -> list[CheckResult]:
    results: list[CheckResult] = []
    linear = EffectiveHamiltonian.for_state(linear_momentum_state(0.0))
    rec = integrate(linear, -1.0, 1.0, 4.0)
    p_err = float(np.max(np.abs(rec.p - (1.0 - rec.t / 2.0))))
    x_err = float(np.max(np.abs(rec.x - (-((1.0 - rec.t / 2.0) ** 2)))))
    _check(results, "trajectories", "linear-closed-form",
           max(p_err, x_err) <= 1e-10,
           f"p gap {p_err:.3e}, x gap {x_err:.3e}")
    causal = float(np.max(np.abs(rec.x + rec.p ** 2)))
    _check(results, "trajectories", "linear-causal-consistency",
           causal <= 1e-10, f"max |x + p^2 - 2E| = {causal:.3e}")
    stationary = (
        ("airy", airy_state(0.0), -2.338, 1e-12),
        ("qho0-config", qho_state(0), 0.5, 1e-10),
        ("qho2-config", qho_state(2), 1.6, 1e-10),
        ("qho0-momentum", qho_state(0, axis="p"), 0.8, 1e-10),
        ("qho2-momentum", qho_state(2, axis="p"), 1.5, 1e-10),
    )
    for name, state, start, tol in stationary:
        ham = EffectiveHamiltonian.for_state(state)
        x0, p0 = (start, 0.0) if state.axis == "x" else (0.0, start)
        run = integrate(ham, x0, p0, 10.0)
        drift = float(max(np.max(np.abs(run.x - x0)), np.max(np.abs(run.p - p0))))
        _check(results, "trajectories", f"stationary-{name}", drift <= tol,
               f"max drift {drift:.3e}")
    _, _, rep_lin = representation_pair(airy_state(0.0), 0.0, 0.0, 4.0)
    _check(results, "trajectories", "symplectic-break-linear",
           rep_lin.max_dx > 0.1, f"max_dx = {rep_lin.max_dx:.6g}")
    _, _, rep_qho = representation_pair(qho_state(0), 0.0, 0.0, 4.0)
    _check(results, "trajectories", "symplectic-hold-qho",
           max(rep_qho.max_dx, rep_qho.max_dp) <= 1e-10,
           f"max divergence {max(rep_qho.max_dx, rep_qho.max_dp):.3e}")
    return results


def suite_wigner() -> list[CheckResult]:
    results: list[CheckResult] = []
    report0 = wigner_moment_check(qho_state(0))
    _check(results, "wigner", "n0-identity", report0.max_residual <= 1e-6,
           f"max residual {report0.max_residual:.3e}")
    var_gap = float(np.max(np.abs(report0.variance - 0.5)))
    _check(results, "wigner", "n0-variance-half", var_gap <= 1e-6,
           f"max |Var - 1/2| = {var_gap:.3e}")
    report2 = wigner_moment_check(qho_state(2))
    _check(results, "wigner", "n2-identity", report2.max_residual <= 1e-5,
           f"max residual away from nodes {report2.max_residual:.3e}")
    return results


def suite_continuity() -> list[CheckResult]:
    results: list[CheckResult] = []
    for state in (airy_state(0.0), qho_state(0), qho_state(2)):
        residual = continuity_residual(state)
        _check(results, "continuity", state.label, residual <= 1e-10,
               f"max |Im(O psi/psi)| = {residual:.3e}")
    return results


SUITES = {
    "vq4": suite_vq4,
    "quadratic": suite_quadratic,
    "linear": suite_linear,
    "oracle": suite_oracle,
    "stationarity": suite_stationarity,
    "splitting": suite_splitting,
    "trajectories": suite_trajectories,
    "wigner": suite_wigner,
    "continuity": suite_continuity,
}


def run_suites(names, seed: int = 42) -> dict:
    """Run the named suites ('all' for every one); returns the JSON report."""
    if isinstance(names, str):
        names = [names]
    selected: list[str] = []
    for name in names:
        if name == "all":
            selected.extend(SUITES)
        elif name in SUITES:
            selected.append(name)
        else:
            raise KeyError(name)
    checks: list[CheckResult] = []
    for name in selected:
        if name == "oracle":
            checks.extend(SUITES[name](seed=seed))
        else:
            checks.extend(SUITES[name]())
    failures = [c for c in checks if not c.passed]
    return {
        "suites": selected,
        "seed": seed,
        "passed": not failures,
        "first_failure": (f"{failures[0].suite}:{failures[0].name}"
                          if failures else None),
        "checks": [{"suite": c.suite, "name": c.name, "passed": c.passed,
                    "detail": c.detail} for c in checks],
    }
