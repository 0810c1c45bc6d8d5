"""Energy split, stationarity, continuity, and density-maxima detection."""

import math

import numpy as np
import pytest
from scipy import special

from qpot import (IncompatibleError, UnitSystem, airy_state,
                  continuity_residual, decompose_config,
                  decompose_momentum_qho, density_maxima,
                  linear_momentum_state, log_density_curvature, node_mask,
                  profile_for_state, qho_state, stationarity_residual)
from qpot.energetics import MASK_DILATION
from qpot.states import polynomial_state
from fractions import Fraction


def all_profiled_states():
    return (airy_state(0.0), qho_state(0), qho_state(2),
            qho_state(0, axis="p"), qho_state(2, axis="p"))


def test_split_identity():
    for state in all_profiled_states():
        profile = profile_for_state(state)
        ok = ~profile.mask
        gap = np.abs(profile.Q[ok] - profile.disp[ok] - profile.loc[ok])
        assert float(np.max(gap)) <= 1e-10


def test_dominance_and_gradient_identity():
    for state in all_profiled_states():
        profile = profile_for_state(state)
        ok = ~profile.mask
        diff = profile.disp[ok] - profile.loc[ok]
        assert float(np.min(diff)) >= -1e-12
        # disp - loc = (coef/4) (rho'/rho)^2 with rho'/rho = 2 R'/R;
        # coef/4 is hbar^2/(8m) on the configuration side
        grid = profile.axis[ok]
        r0 = state.r_derivative(grid, 0)
        r1 = state.r_derivative(grid, 1)
        want = (profile.coefficient / 4.0) * (2.0 * r1 / r0) ** 2
        gap = np.abs(diff - want) / np.maximum(1.0, np.abs(want))
        assert float(np.max(gap)) <= 1e-12


def test_equality_at_refined_maxima():
    for state in all_profiled_states():
        maxima = density_maxima(state)
        assert maxima.size > 0
        for z in maxima:
            r0 = float(state.r_derivative(z, 0))
            r1 = float(state.r_derivative(z, 1))
            r2 = float(state.r_derivative(z, 2))
            u, w = r1 / r0, r2 / r0
            coef = profile_for_state(state).coefficient
            disp = -(coef / 2.0) * (w - u * u)
            loc = -(coef / 2.0) * (w + u * u)
            assert abs(disp - loc) <= 1e-8
            assert disp == pytest.approx(-coef * w / 2.0, abs=1e-8)


def test_airy_maxima_sit_at_slope_zeros():
    maxima = density_maxima(airy_state(0.0))
    _, prime_zeros, _, _ = special.ai_zeros(9)
    assert maxima.size == 9
    assert np.max(np.abs(np.sort(maxima) - np.sort(prime_zeros))) <= 1e-10


def test_ground_state_profile_closed_forms():
    profile = decompose_config(qho_state(0))
    ok = ~profile.mask
    x = profile.axis[ok]
    assert float(np.max(np.abs(profile.disp[ok] - 0.25))) <= 1e-12
    assert float(np.max(np.abs(profile.loc[ok] - (0.25 - 0.5 * x * x)))) <= 1e-12
    assert float(np.max(np.abs(profile.Q[ok] - (0.5 - 0.5 * x * x)))) <= 1e-12


def test_momentum_prefactor_with_units():
    units = UnitSystem(hbar=0.5, mass=2.0, omega=3.0)
    state = qho_state(0, axis="p", units=units)
    profile = decompose_momentum_qho(state)
    coef = units.hbar ** 2 * units.mass * units.omega ** 2 / 2.0
    assert profile.coefficient == pytest.approx(coef)
    p = 1.25
    scale = 1.0 / (units.mass * units.omega * units.hbar)
    w = scale * (scale * p * p - 1.0)
    idx = int(np.argmin(np.abs(profile.axis - p)))
    assert profile.Q[idx] == pytest.approx(-coef * w, rel=1e-12)


def test_config_momentum_twins_identical_in_natural_units():
    for n in (0, 2):
        cfg = decompose_config(qho_state(n))
        mom = decompose_momentum_qho(qho_state(n, axis="p"))
        for name in ("rho", "Q", "disp", "loc", "Q_density", "disp_density",
                     "loc_density"):
            a, b = getattr(cfg, name), getattr(mom, name)
            assert np.array_equal(np.isnan(a), np.isnan(b))
            assert np.array_equal(a[~np.isnan(a)], b[~np.isnan(b)])


def test_amplitude_scale_invariance():
    base = polynomial_state((Fraction(1), Fraction(0), Fraction(1)),
                            (Fraction(0),))
    doubled = polynomial_state((Fraction(2), Fraction(0), Fraction(2)),
                               (Fraction(0),))
    pa = decompose_config(base)
    pb = decompose_config(doubled)
    for name in ("rho", "Q", "disp", "loc", "Q_density", "disp_density",
                 "loc_density"):
        assert np.array_equal(getattr(pa, name), getattr(pb, name))


def test_node_masking_and_finite_densities():
    profile = decompose_config(qho_state(2))
    grid = profile.axis
    h = grid[1] - grid[0]
    node = 1 / math.sqrt(2)
    near = np.abs(np.abs(grid) - node) <= (MASK_DILATION - 1) * h
    assert np.all(profile.mask[near])
    assert np.all(np.isnan(profile.Q[profile.mask]))
    assert np.all(np.isnan(profile.disp[profile.mask]))
    assert np.all(np.isnan(profile.loc[profile.mask]))
    for name in ("rho", "Q_density", "disp_density", "loc_density"):
        assert np.all(np.isfinite(getattr(profile, name)))
    # unmasked energies stay finite too
    assert np.all(np.isfinite(profile.Q[~profile.mask]))


def test_mask_dilation_width():
    state = qho_state(2)
    grid = state.default_grid()
    mask = node_mask(state, grid)
    blocks = np.flatnonzero(np.diff(np.concatenate(([0], mask.view(np.int8),
                                                    [0]))))
    widths = blocks[1::2] - blocks[0::2]
    assert len(widths) == 2
    # node between two grid cells, dilated 3 cells each side
    assert np.all(widths == 2 * MASK_DILATION + 2)


def test_stationarity_all_combinations():
    states = (airy_state(0.0), linear_momentum_state(0.0), qho_state(0),
              qho_state(2), qho_state(0, axis="p"), qho_state(2, axis="p"))
    for state in states:
        assert stationarity_residual(state) <= 1e-9


def test_stationarity_nonzero_energy_and_units():
    assert stationarity_residual(airy_state(0.8)) <= 1e-9
    units = UnitSystem(hbar=2.0, mass=0.5, omega=1.5)
    assert stationarity_residual(airy_state(0.3, units=units)) <= 1e-9
    assert stationarity_residual(qho_state(2, units=units)) <= 1e-9
    assert stationarity_residual(qho_state(2, axis="p", units=units)) <= 1e-9


def test_continuity_residual_vanishes_for_eigenstates():
    for state in (airy_state(0.0), qho_state(0), qho_state(2)):
        assert continuity_residual(state) <= 1e-10


def test_axis_mismatch_raises():
    with pytest.raises(IncompatibleError):
        decompose_config(qho_state(0, axis="p"))
    with pytest.raises(IncompatibleError):
        decompose_momentum_qho(qho_state(0))
    with pytest.raises(IncompatibleError):
        continuity_residual(qho_state(0), representation="momentum")


def test_linear_momentum_profile_is_flat():
    profile = decompose_momentum_qho(linear_momentum_state(0.0))
    assert np.all(profile.rho == 1.0)
    assert not np.any(profile.mask)
    for name in ("Q", "disp", "loc", "Q_density", "disp_density",
                 "loc_density"):
        assert np.all(getattr(profile, name) == 0.0)


def test_log_density_curvature_algebraic():
    state = qho_state(0)
    xs = np.linspace(-2, 2, 41)
    got = log_density_curvature(state, xs)
    assert np.allclose(got, -2.0, atol=1e-12)  # ln rho = -x^2 + const


def test_custom_grid_profile():
    grid = np.linspace(-2.0, 2.0, 101)
    profile = decompose_config(qho_state(0), grid=grid)
    assert profile.axis.shape == (101,)
    assert float(np.max(profile.rho)) == 1.0
