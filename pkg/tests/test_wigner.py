"""Wigner second-moment identity for real oscillator eigenstates."""

import numpy as np
import pytest

from qpot import (IncompatibleError, QuadratureNotConvergedError, qho_state,
                  sampled_state, wigner_moment_check)


def test_ground_state_identity():
    report = wigner_moment_check(qho_state(0))
    assert report.max_residual <= 1e-6
    # Gaussian density: Var(p | x) = hbar m omega / 2 at every x
    assert float(np.max(np.abs(report.variance - 0.5))) <= 1e-6
    assert float(np.max(np.abs(report.identity_rhs - 0.5))) <= 1e-12


def test_second_excited_identity():
    report = wigner_moment_check(qho_state(2))
    assert report.max_residual <= 1e-5
    # x points near the nodes at +-1/sqrt(2) are excluded
    for node in (-1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0)):
        assert float(np.min(np.abs(report.x - node))) >= 0.25


def test_excited_dispersion_exceeds_ground_value():
    # real-rooted amplitude: Var(p | x) = (1 + sum (x - x_i)^-2) / 2 > 1/2,
    # so the conditional momentum spread never dips below the ground value
    report = wigner_moment_check(qho_state(2))
    assert report.min_dispersion > 0.5


def test_doubled_resolution_is_reported():
    report = wigner_moment_check(qho_state(0), n_y=512)
    assert report.n_y == 1024


def test_coarse_quadrature_raises():
    with pytest.raises(QuadratureNotConvergedError):
        wigner_moment_check(qho_state(2), n_y=8)


def test_rejects_momentum_axis():
    with pytest.raises(IncompatibleError):
        wigner_moment_check(qho_state(0, axis="p"))


def test_rejects_complex_state():
    grid = np.linspace(-6.0, 6.0, 2001)
    psi = np.exp(-grid ** 2 / 2.0) * np.exp(1j * 0.3 * grid)
    with pytest.raises(IncompatibleError):
        wigner_moment_check(sampled_state(grid, psi))
