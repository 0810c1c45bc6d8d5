"""Causal trajectory integration and symplectic-symmetry breaking."""

import math
import types

import numpy as np
import pytest

from qpot import (CausalityError, EffectiveHamiltonian, IncompatibleError,
                  StepTooLargeError, airy_state, hamilton_rhs, integrate,
                  linear_momentum_state, qho_state, representation_pair,
                  rk4_step, sampled_state, symplectic_break, twin_state)
from qpot.states import AiryState, LinearMomentumState


def test_linear_momentum_closed_form():
    ham = EffectiveHamiltonian.for_state(linear_momentum_state(0.0))
    rec = integrate(ham, -1.0, 1.0, 4.0)
    p_want = 1.0 - rec.t / 2.0
    assert float(np.max(np.abs(rec.p - p_want))) <= 1e-12
    assert float(np.max(np.abs(rec.x + p_want ** 2))) <= 1e-12
    # the causal constraint x = -S'(p) holds along the whole run
    assert float(np.max(np.abs(rec.x + rec.p ** 2))) <= 1e-10
    assert float(np.max(np.abs(rec.H - rec.H[0]))) <= 1e-8


def test_airy_stationary_point():
    ham = EffectiveHamiltonian.for_state(airy_state(0.0))
    rec = integrate(ham, -2.338, 0.0, 10.0)
    drift = max(float(np.max(np.abs(rec.x + 2.338))),
                float(np.max(np.abs(rec.p))))
    assert drift <= 1e-12


@pytest.mark.parametrize("state,start,tol", [
    (qho_state(0), 0.5, 1e-10),
    (qho_state(2), 1.6, 1e-10),
    (qho_state(0, axis="p"), 0.8, 1e-10),
    (qho_state(2, axis="p"), 1.5, 1e-10),
])
def test_oscillator_states_hold_still(state, start, tol):
    # quantum force cancels the classical restoring force for eigenstates
    ham = EffectiveHamiltonian.for_state(state)
    x0, p0 = (start, 0.0) if state.axis == "x" else (0.0, start)
    rec = integrate(ham, x0, p0, 10.0)
    drift = max(float(np.max(np.abs(rec.x - x0))),
                float(np.max(np.abs(rec.p - p0))))
    assert drift <= tol


def test_rhs_values():
    lm = EffectiveHamiltonian.for_state(linear_momentum_state(0.0))
    # linear potential has no quantum part on the momentum side
    assert lm.rhs(-1.0, 1.0) == (1.0, -0.5)
    airy = EffectiveHamiltonian.for_state(airy_state(0.0))
    # constant quantum force -1/2 cancels the slope of V = x/2
    assert hamilton_rhs(airy, -1.3, 0.0) == (0.0, 0.0)
    qho = EffectiveHamiltonian.for_state(qho_state(0))
    assert qho.rhs(0.5, 0.0) == (0.0, 0.0)


def test_quantum_potential_and_value():
    airy = EffectiveHamiltonian.for_state(airy_state(0.0))
    x = -2.0
    # H = p^2/2 + x/2 + Tq(x) and the total is the state energy at p = S' = 0
    assert airy.value(x, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert airy.quantum_potential(x) == pytest.approx(-x / 2.0, abs=1e-12)
    lm = EffectiveHamiltonian.for_state(linear_momentum_state(0.0))
    assert lm.quantum_potential(1.0) == 0.0
    assert lm.quantum_force_gradient(1.0) == 0.0


def test_symplectic_break_linear_grows_quadratically():
    _, _, report = representation_pair(airy_state(0.0), 0.0, 0.0, 4.0)
    series = np.array(report.series)
    t, dx = series[:, 0], series[:, 1]
    dx_1 = float(dx[np.argmin(np.abs(t - 1.0))])
    dx_2 = float(dx[np.argmin(np.abs(t - 2.0))])
    assert dx_2 / dx_1 == pytest.approx(4.0, rel=1e-6)
    assert report.max_dx == pytest.approx(4.0, rel=1e-9)
    assert report.max_dp == pytest.approx(2.0, rel=1e-9)


@pytest.mark.parametrize("n", [0, 2])
def test_symplectic_hold_oscillator(n):
    _, _, report = representation_pair(qho_state(n), 0.0, 0.0, 4.0)
    assert max(report.max_dx, report.max_dp) <= 1e-10


def test_divergence_of_identical_records_is_zero():
    ham = EffectiveHamiltonian.for_state(qho_state(0))
    rec = integrate(ham, 0.5, 0.0, 1.0)
    report = symplectic_break(rec, rec)
    assert report.max_dx == 0.0 and report.max_dp == 0.0
    assert report.series[0] == (0.0, 0.0, 0.0)


def test_divergence_resamples_mismatched_grids():
    conf = integrate(EffectiveHamiltonian.for_state(airy_state(0.0)),
                     0.0, 0.0, 2.0, dt=1e-3)
    mom = integrate(EffectiveHamiltonian.for_state(linear_momentum_state(0.0)),
                    0.0, 0.0, 2.0, dt=2e-3)
    report = symplectic_break(conf, mom)
    assert report.max_dx == pytest.approx(1.0, rel=1e-6)
    assert len(report.series) == len(conf.t)


def test_divergence_json_shape():
    _, _, report = representation_pair(airy_state(0.0), 0.0, 0.0, 1.0)
    data = report.to_dict()
    assert set(data) == {"max_dx", "max_dp", "series"}
    assert data["series"][0] == [0.0, 0.0, 0.0]
    assert len(data["series"]) == 1001


def test_node_start_returns_partial_record():
    ham = EffectiveHamiltonian.for_state(qho_state(2))
    rec = integrate(ham, 1.0 / math.sqrt(2.0), 0.0, 1.0)
    assert rec.halted == "node-point"
    assert len(rec.t) == 1 and rec.t[0] == 0.0
    assert math.isnan(rec.H[0])


def test_causality_violation_raises():
    ham = EffectiveHamiltonian.for_state(qho_state(0))
    with pytest.raises(CausalityError):
        integrate(ham, 0.5, 0.3, 1.0)


def test_representation_mismatch_raises():
    with pytest.raises(IncompatibleError):
        EffectiveHamiltonian.for_state(qho_state(0), representation="momentum")


def test_energy_jump_raises_step_error():
    state = types.SimpleNamespace(
        label="fake", energy=0.0,
        units=types.SimpleNamespace(describe=lambda: "hbar=1 m=1 omega=1"))
    ham = types.SimpleNamespace(
        representation="configuration", state=state,
        causal_residual=lambda x, p: 0.0,
        value=lambda x, p: x,
        rhs=lambda x, p: (1000.0, 0.0))
    with pytest.raises(StepTooLargeError):
        integrate(ham, 0.0, 0.0, 1.0)


def test_rk4_is_fourth_order_on_oscillator():
    # classical oscillator flow is not polynomial in t, so the global error
    # must shrink by about 2^4 when the step halves
    def f(t, y):
        return np.array([y[1], -y[0]])

    def run(dt):
        y = np.array([1.0, 0.0])
        steps = int(round(2.0 / dt))
        for i in range(steps):
            y = rk4_step(f, i * dt, y, dt)
        exact = np.array([math.cos(2.0), -math.sin(2.0)])
        return float(np.max(np.abs(y - exact)))

    ratio = run(0.02) / run(0.01)
    assert ratio >= 16.0 * 0.9


def test_record_metadata():
    ham = EffectiveHamiltonian.for_state(qho_state(0))
    rec = integrate(ham, 0.5, 0.0, 0.1, dt=1e-3)
    assert rec.method == "rk4"
    assert rec.dt == 1e-3
    assert rec.representation == "configuration"
    assert rec.state_label == "qho:0"
    assert rec.energy == 0.5
    assert len(rec.t) == 101
    assert np.all(np.diff(rec.t) > 0)
    assert "hbar=1" in rec.units


def test_twin_state_mapping():
    assert isinstance(twin_state(airy_state(0.25)), LinearMomentumState)
    assert twin_state(airy_state(0.25)).energy == 0.25
    assert isinstance(twin_state(linear_momentum_state(0.5)), AiryState)
    t = twin_state(qho_state(1))
    assert t.axis == "p" and t.label == "qho:1"
    assert twin_state(t).axis == "x"
    grid = np.linspace(-1.0, 1.0, 33)
    with pytest.raises(IncompatibleError):
        twin_state(sampled_state(grid, np.ones(33, dtype=complex)))
