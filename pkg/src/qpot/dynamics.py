"""Causal trajectories under representation-dependent effective Hamiltonians.

The effective Hamiltonian adds the quantum part of the expanded operator to
the classical form: H = T(p) + Tq(x) + V(x) on the configuration side,
H = T(p) + Vq(p) + V(x) on the momentum side.  The quantum force enters
pdot on the configuration side but xdot on the momentum side, which breaks
the exact x <-> p exchange symmetry of the classical equations; the
divergence between matched trajectory pairs quantifies that breaking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CausalityError, IncompatibleError, NodePointError, StepTooLargeError
from .expansion import (CONFIGURATION, MOMENTUM, ExpansionTerm,
                        PolynomialOperator, differentiate_terms, expand,
                        evaluate_expansion)
from .states import (AiryState, HarmonicState, LinearMomentumState,
                     StateField, airy_state, linear_momentum_state, qho_state)

#: initial conditions must satisfy the causal constraint this tightly
CAUSAL_TOLERANCE = 1e-10


def rk4_step(f, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    """One classic Runge-Kutta step of y' = f(t, y)."""
    k1 = f(t, y)
    k2 = f(t + dt / 2.0, y + (dt / 2.0) * k1)
    k3 = f(t + dt / 2.0, y + (dt / 2.0) * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """Classical Hamiltonian augmented by one representation's quantum part."""

    representation: str
    kinetic: PolynomialOperator
    potential: PolynomialOperator
    state: StateField
    quantum: tuple[ExpansionTerm, ...]
    force: tuple[ExpansionTerm, ...]
    kinetic_rate: PolynomialOperator
    potential_rate: PolynomialOperator

    @classmethod
    def for_state(cls, state: StateField, kinetic=None, potential=None,
                  representation: str | None = None) -> "EffectiveHamiltonian":
        if representation is None:
            representation = CONFIGURATION if state.axis == "x" else MOMENTUM
        if (representation == CONFIGURATION) != (state.axis == "x"):
            raise IncompatibleError(
                f"state on axis {state.axis!r} cannot drive a "
                f"{representation} trajectory")
        if kinetic is None or potential is None:
            ops = state.hamiltonian()
            if ops is None:
                raise IncompatibleError("state carries no Hamiltonian; pass operators")
            kinetic = kinetic if kinetic is not None else ops[0]
            potential = potential if potential is not None else ops[1]
        expanded = expand(kinetic if representation == CONFIGURATION else potential,
                          representation)
        quantum = expanded.quantum
        return cls(representation=representation, kinetic=kinetic,
                   potential=potential, state=state, quantum=quantum,
                   force=differentiate_terms(quantum),
                   kinetic_rate=kinetic.derivative(),
                   potential_rate=potential.derivative())

    def quantum_potential(self, xi) -> float:
        """Quantum part at xi (x or p depending on representation)."""
        if not self.quantum:
            return 0.0
        return float(evaluate_expansion(self.quantum, self.state, xi))

    def quantum_force_gradient(self, xi) -> float:
        """d/dxi of the quantum part, by term-wise analytic differentiation."""
        if not self.force:
            return 0.0
        return float(evaluate_expansion(self.force, self.state, xi))

    def value(self, x: float, p: float) -> float:
        base = (float(self.kinetic.classical_value(p))
                + float(self.potential.classical_value(x)))
        xi = x if self.representation == CONFIGURATION else p
        return base + self.quantum_potential(xi)

    def causal_residual(self, x: float, p: float) -> float:
        if self.representation == CONFIGURATION:
            return abs(p - float(self.state.s_derivative(x, 1)))
        return abs(x + float(self.state.s_derivative(p, 1)))

    def rhs(self, x: float, p: float) -> tuple[float, float]:
        if self.representation == CONFIGURATION:
            x_dot = float(self.kinetic_rate.classical_value(p))
            p_dot = -(float(self.potential_rate.classical_value(x))
                      + self.quantum_force_gradient(x))
        else:
            x_dot = (float(self.kinetic_rate.classical_value(p))
                     + self.quantum_force_gradient(p))
            p_dot = -float(self.potential_rate.classical_value(x))
        return x_dot, p_dot


def hamilton_rhs(hamiltonian: EffectiveHamiltonian, x: float, p: float):
    """(xdot, pdot) at a phase-space point; NodePointError propagates."""
    return hamiltonian.rhs(x, p)


@dataclass
class TrajectoryRecord:
    """Sampled trajectory; halted is None or 'node-point' for partial runs."""

    representation: str
    state_label: str
    units: str
    energy: float
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    H: np.ndarray
    dt: float
    method: str = "rk4"
    halted: str | None = None


def integrate(hamiltonian: EffectiveHamiltonian, x0: float, p0: float,
              t_end: float, dt: float = 1e-3) -> TrajectoryRecord:
    """Fixed-step RK4 advance of hamilton_rhs, recording every step.

    Raises CausalityError when the initial point violates the causal
    constraint; halts with a partial record when evaluation hits a node;
    raises StepTooLargeError when one step moves H by more than
    1e-6 |E| + 1e-9.
    """
    residual = hamiltonian.causal_residual(x0, p0)
    if residual > CAUSAL_TOLERANCE:
        raise CausalityError(
            f"initial point violates the causal constraint by {residual:.3e}")
    state = hamiltonian.state
    meta = dict(representation=hamiltonian.representation,
                state_label=state.label, units=state.units.describe(),
                energy=state.energy, dt=dt)
    n_steps = max(0, int(round(t_end / dt)))
    ts = [0.0]
    xs = [float(x0)]
    ps = [float(p0)]
    halted = None
    try:
        hs = [hamiltonian.value(x0, p0)]
    except NodePointError:
        return TrajectoryRecord(t=np.array(ts), x=np.array(xs), p=np.array(ps),
                                H=np.array([np.nan]), halted="node-point", **meta)
    energy_scale = 1e-6 * abs(hs[0]) + 1e-9

    def f(t, y):
        dx, dp = hamiltonian.rhs(float(y[0]), float(y[1]))
        return np.array([dx, dp])

    y = np.array([x0, p0], dtype=float)
    for i in range(n_steps):
        try:
            y = rk4_step(f, i * dt, y, dt)
            h_now = hamiltonian.value(float(y[0]), float(y[1]))
        except NodePointError:
            halted = "node-point"
            break
        if abs(h_now - hs[-1]) > energy_scale:
            raise StepTooLargeError(
                f"energy moved {abs(h_now - hs[-1]):.3e} in one step at "
                f"t={(i + 1) * dt:.6g}")
        ts.append((i + 1) * dt)
        xs.append(float(y[0]))
        ps.append(float(y[1]))
        hs.append(h_now)
    return TrajectoryRecord(t=np.array(ts), x=np.array(xs), p=np.array(ps),
                            H=np.array(hs), halted=halted, **meta)


@dataclass
class DivergenceReport:
    """Pointwise gap between matched configuration/momentum trajectories."""

    max_dx: float
    max_dp: float
    series: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"max_dx": self.max_dx, "max_dp": self.max_dp,
                "series": [[t, dx, dp] for (t, dx, dp) in self.series]}


def symplectic_break(config_traj: TrajectoryRecord,
                     mom_traj: TrajectoryRecord) -> DivergenceReport:
    """Divergence of a matched pair; the momentum record is resampled onto
    the configuration record's t-grid when the grids differ."""
    t = config_traj.t
    if len(mom_traj.t) == len(t) and np.array_equal(mom_traj.t, t):
        mx, mp = mom_traj.x, mom_traj.p
    else:
        mx = np.interp(t, mom_traj.t, mom_traj.x)
        mp = np.interp(t, mom_traj.t, mom_traj.p)
    dx = np.abs(config_traj.x - mx)
    dp = np.abs(config_traj.p - mp)
    series = [(float(ti), float(dxi), float(dpi))
              for ti, dxi, dpi in zip(t, dx, dp)]
    return DivergenceReport(max_dx=float(np.max(dx)), max_dp=float(np.max(dp)),
                            series=series)


def twin_state(state: StateField) -> StateField:
    """The same physical system described on the other axis."""
    if isinstance(state, AiryState):
        return linear_momentum_state(state.energy, units=state.units)
    if isinstance(state, LinearMomentumState):
        return airy_state(state.energy, units=state.units)
    if isinstance(state, HarmonicState):
        other = "p" if state.axis == "x" else "x"
        return qho_state(state.n, axis=other, units=state.units)
    raise IncompatibleError(f"no twin representation for state {state.label!r}")


def representation_pair(state: StateField, x0: float, p0: float, t_end: float,
                        dt: float = 1e-3):
    """Integrate matched trajectories in both representations from (x0, p0).

    Returns (configuration record, momentum record, divergence report); the
    initial point must satisfy both causal constraints.
    """
    twin = twin_state(state)
    conf_state = state if state.axis == "x" else twin
    mom_state = twin if state.axis == "x" else state
    rec_c = integrate(EffectiveHamiltonian.for_state(conf_state), x0, p0, t_end, dt)
    rec_m = integrate(EffectiveHamiltonian.for_state(mom_state), x0, p0, t_end, dt)
    return rec_c, rec_m, symplectic_break(rec_c, rec_m)
