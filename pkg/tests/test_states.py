"""Analytic and sampled state providers."""

import math
from fractions import Fraction

import numpy as np
import pytest

from qpot import (NonUniformGridError, PhaseUnwrapFailure, UnitSystem,
                  airy_state, linear_momentum_state, qho_state, sampled_state)
from qpot.states import BOUNDARY_WIDTH, polynomial_state


def test_default_grids():
    a = airy_state(0.0).default_grid()
    assert a[0] == -12.0 and a[-1] == 4.0 and len(a) == 2001
    q = qho_state(0).default_grid()
    assert q[0] == -5.0 and q[-1] == 5.0 and len(q) == 2001
    lm = linear_momentum_state(0.0).default_grid()
    assert lm[0] == -4.0 and lm[-1] == 4.0 and len(lm) == 2001


def test_oscillator_eigen_equation():
    grid = np.linspace(-4.5, 4.5, 901)
    for n in range(6):
        state = qho_state(n)
        r0 = state.r_derivative(grid, 0)
        r2 = state.r_derivative(grid, 2)
        resid = -0.5 * r2 + 0.5 * grid * grid * r0 - state.energy * r0
        assert float(np.max(np.abs(resid))) <= 1e-10


def test_oscillator_eigen_equation_with_units():
    units = UnitSystem(hbar=2.0, mass=3.0, omega=0.5)
    grid = np.linspace(-2.5, 2.5, 501)
    for n in (0, 2):
        state = qho_state(n, units=units)
        r0 = state.r_derivative(grid, 0)
        r2 = state.r_derivative(grid, 2)
        resid = (-(units.hbar ** 2) / (2 * units.mass) * r2
                 + 0.5 * units.mass * units.omega ** 2 * grid * grid * r0
                 - state.energy * r0)
        assert state.energy == pytest.approx(units.hbar * units.omega * (n + 0.5))
        assert float(np.max(np.abs(resid))) <= 1e-10


def test_oscillator_nodes():
    state = qho_state(2)
    nodes = state.nodes()
    assert nodes == pytest.approx([-1 / math.sqrt(2), 1 / math.sqrt(2)],
                                  abs=1e-12)
    assert bool(state.is_node(float(nodes[1])))
    assert not bool(state.is_node(0.9))
    assert qho_state(0).nodes().size == 0


def test_oscillator_axis_symmetry():
    grid = np.linspace(-5, 5, 501)
    for n in (0, 1, 2, 3):
        on_x = qho_state(n, axis="x")
        on_p = qho_state(n, axis="p")
        for order in range(4):
            assert np.array_equal(on_x.r_derivative(grid, order),
                                  on_p.r_derivative(grid, order))
        assert on_x.energy == on_p.energy
        assert on_x.axis == "x" and on_p.axis == "p"


def test_airy_defining_residual():
    rng = np.random.default_rng(3)
    state = airy_state(0.0)
    xs = rng.uniform(-10.0, 3.0, 100)
    for x in xs:
        resid = float(state.r_derivative(float(x), 2)) - x * float(
            state.r_derivative(float(x), 0))
        assert abs(resid) <= 1e-12


def test_airy_energy_shift():
    # raising E translates the amplitude: R_E(x) = R_0(x - 2E)
    shifted = airy_state(0.7)
    base = airy_state(0.0)
    xs = np.linspace(-6.0, 2.0, 41)
    assert np.allclose(shifted.r_derivative(xs, 0),
                       base.r_derivative(xs - 1.4, 0), atol=1e-14)


def test_linear_momentum_phase_derivatives():
    state = linear_momentum_state(0.75)
    p = np.linspace(-3, 3, 61)
    assert np.allclose(state.s_derivative(p, 0), p ** 3 / 3 - 1.5 * p)
    assert np.allclose(state.s_derivative(p, 1), p ** 2 - 1.5)
    assert np.allclose(state.s_derivative(p, 2), 2 * p)
    assert np.allclose(state.s_derivative(p, 3), 2.0)
    assert np.all(state.s_derivative(p, 4) == 0.0)
    assert np.all(state.density(p) == 1.0)
    assert state.nodes().size == 0


def test_causal_maps():
    lm = linear_momentum_state(0.5)
    assert float(lm.causal_position(2.0)) == pytest.approx(-(4.0 - 1.0))
    qs = qho_state(1)
    assert float(qs.causal_momentum(0.3)) == 0.0


def test_sampled_oscillator_matches_analytic():
    analytic = qho_state(0)
    grid = np.linspace(-5, 5, 2001)
    psi = analytic.r_derivative(grid, 0).astype(complex)
    state = sampled_state(grid, psi)
    inner = np.abs(grid) <= 4.0
    for order in (1, 2):
        got = state.r_derivative(grid, order)[inner]
        want = analytic.r_derivative(grid, order)[inner]
        assert float(np.max(np.abs(got - want))) <= 1e-8


def test_sampled_constant_derivatives_vanish():
    grid = np.linspace(0.0, 1.0, 33)
    state = sampled_state(grid, np.ones(33, dtype=complex))
    for order in (1, 2, 3):
        assert float(np.max(np.abs(state.r_derivative(grid, order)))) <= 1e-12
    assert np.all(state.s_derivative(grid, 1) == 0.0)


def test_sampled_cubic_phase_matches():
    grid = np.linspace(-2.0, 2.0, 1601)
    psi = np.exp(1j * grid ** 3 / 3.0)
    state = sampled_state(grid, psi, axis="p")
    flags = state.boundary_flags
    got = state.s_derivative(grid, 1)[~flags]
    assert float(np.max(np.abs(got - grid[~flags] ** 2))) <= 1e-8


def test_sampled_sign_continuity_through_nodes():
    analytic = qho_state(2)
    grid = np.linspace(-5, 5, 2001)
    real_amp = analytic.r_derivative(grid, 0)
    state = sampled_state(grid, real_amp.astype(complex))
    rebuilt = state.r_derivative(grid, 0)
    direct = float(np.max(np.abs(rebuilt - real_amp)))
    flipped = float(np.max(np.abs(rebuilt + real_amp)))
    assert min(direct, flipped) <= 1e-12
    # the recovered amplitude changes sign (no absolute-value kink)
    assert float(np.min(rebuilt)) < 0 < float(np.max(rebuilt))


def test_sampled_reconstruction_roundtrip():
    grid = np.linspace(-1.0, 1.0, 257)
    psi = (1.1 + grid ** 2) * np.exp(1j * (0.3 + grid + 0.2 * grid ** 3))
    state = sampled_state(grid, psi)
    back = state.reconstructed()
    assert float(np.max(np.abs(back - psi))) <= 1e-10


def test_nonuniform_grid_rejected():
    grid = np.array([0.0, 0.1, 0.2, 0.35, 0.4, 0.5, 0.6, 0.7, 0.8])
    with pytest.raises(NonUniformGridError):
        sampled_state(grid, np.ones(9, dtype=complex))
    with pytest.raises(NonUniformGridError):
        sampled_state(np.linspace(0, 1, 5), np.ones(5, dtype=complex))


def test_phase_unwrap_failure_away_from_nodes():
    grid = np.linspace(0.0, 1.0, 11)
    phase = np.zeros(11)
    phase[5:] = 2.5  # jump of 2.5 rad with no amplitude dip
    with pytest.raises(PhaseUnwrapFailure):
        sampled_state(grid, np.exp(1j * phase))


def test_boundary_flags_width():
    grid = np.linspace(0.0, 1.0, 64)
    state = sampled_state(grid, np.exp(1j * grid))
    flags = state.boundary_flags
    assert np.all(flags[:BOUNDARY_WIDTH]) and np.all(flags[-BOUNDARY_WIDTH:])
    assert not np.any(flags[BOUNDARY_WIDTH:-BOUNDARY_WIDTH])


def test_finite_difference_convergence_order():
    analytic = qho_state(0)

    def worst_error(n_points):
        grid = np.linspace(-4.0, 4.0, n_points)
        state = sampled_state(grid, analytic.r_derivative(grid, 0).astype(complex))
        flags = state.boundary_flags
        err = (state.r_derivative(grid, 1) - analytic.r_derivative(grid, 1))
        return float(np.max(np.abs(err[~flags])))

    coarse = worst_error(101)
    fine = worst_error(201)
    assert coarse / fine >= 16.0


def test_polynomial_state_exact_matches_float():
    state = polynomial_state((Fraction(1), Fraction(1, 2), Fraction(1)),
                             (Fraction(0), Fraction(2)))
    xi = Fraction(1, 3)
    for order in range(3):
        exact = state.r_derivative_exact(xi, order)
        floated = float(state.r_derivative(float(xi), order))
        assert floated == pytest.approx(float(exact), rel=1e-15)


def test_unit_description_fields():
    units = UnitSystem(hbar=0.5, mass=2.0, omega=3.0)
    text = units.describe()
    assert "hbar=0.5" in text and "m=2" in text and "omega=3" in text
