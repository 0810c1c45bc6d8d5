"""Quantum-potential energetics: dispersion/localisation split and checks.

The quantum part of a quadratic monomial is proportional to R''/R; it splits
into a dispersion energy -(c/8) d^2 ln(rho) and a localisation energy
-(c/8) rho''/rho (c the representation prefactor), which sum back to the
quantum potential and obey dispersion >= localisation pointwise with
equality exactly at density maxima.  Energies diverge at nodes and are
masked there; the corresponding energy densities (products with rho) stay
finite and are computed everywhere from unit-max-normalized density.

Also here: pointwise stationarity of the effective energy, the Wigner
second-moment identity checked against numerical phase-space quadrature,
and the continuity (imaginary-part) residual for stationary states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleError, QuadratureNotConvergedError
from .expansion import CONFIGURATION, MOMENTUM, expand, evaluate_expansion
from .oracle import operator_quotient
from .states import StateField

#: node mask is dilated this many grid cells to each side
MASK_DILATION = 3


@dataclass
class EnergyProfile:
    """Gridded energy decomposition; energies are NaN at masked points."""

    axis: np.ndarray
    rho: np.ndarray
    Q: np.ndarray
    disp: np.ndarray
    loc: np.ndarray
    Q_density: np.ndarray
    disp_density: np.ndarray
    loc_density: np.ndarray
    mask: np.ndarray
    representation: str
    state_label: str
    units: str
    energy: float
    coefficient: float


def node_mask(state: StateField, grid: np.ndarray) -> np.ndarray:
    """True within MASK_DILATION cells of any amplitude node or sign change."""
    r0 = np.asarray(state.r_derivative(grid, 0), dtype=float)
    base = np.asarray(state.is_node(grid), dtype=bool).copy()
    flip = np.signbit(r0[:-1]) != np.signbit(r0[1:])
    base[:-1] |= flip
    base[1:] |= flip
    width = 2 * MASK_DILATION + 1
    dilated = np.convolve(base.astype(float), np.ones(width), mode="same") > 0
    return dilated


def _decompose(state: StateField, coef: float, grid: np.ndarray,
               representation: str) -> EnergyProfile:
    r0 = np.asarray(state.r_derivative(grid, 0), dtype=float)
    r1 = np.asarray(state.r_derivative(grid, 1), dtype=float)
    r2 = np.asarray(state.r_derivative(grid, 2), dtype=float)
    mask = node_mask(state, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = r1 / r0
        w = r2 / r0
    q = -coef * w
    disp = -(coef / 2.0) * (w - u * u)
    loc = -(coef / 2.0) * (w + u * u)
    for arr in (q, disp, loc):
        arr[mask] = np.nan
    rho_raw = r0 * r0
    scale = 1.0 / float(np.max(rho_raw))
    q_density = -coef * (r0 * r2) * scale
    disp_density = -(coef / 2.0) * (r0 * r2 - r1 * r1) * scale
    loc_density = -(coef / 2.0) * (r1 * r1 + r0 * r2) * scale
    return EnergyProfile(
        axis=grid, rho=rho_raw * scale, Q=q, disp=disp, loc=loc,
        Q_density=q_density, disp_density=disp_density, loc_density=loc_density,
        mask=mask, representation=representation, state_label=state.label,
        units=state.units.describe(), energy=state.energy, coefficient=coef)


def decompose_config(state: StateField, grid=None) -> EnergyProfile:
    """Configuration-axis split: Q = -hbar^2 R''/(2 m R) and its components."""
    if state.axis != "x":
        raise IncompatibleError("configuration decomposition needs an x-axis state")
    if grid is None:
        grid = state.default_grid()
    u = state.units
    coef = u.hbar ** 2 / (2.0 * u.mass)
    return _decompose(state, coef, np.asarray(grid, dtype=float), CONFIGURATION)


def decompose_momentum_qho(state: StateField, grid=None) -> EnergyProfile:
    """Momentum-axis split with the oscillator prefactor hbar^2 m omega^2 / 2."""
    if state.axis != "p":
        raise IncompatibleError("momentum decomposition needs a p-axis state")
    if grid is None:
        grid = state.default_grid()
    u = state.units
    coef = u.hbar ** 2 * u.mass * u.omega ** 2 / 2.0
    return _decompose(state, coef, np.asarray(grid, dtype=float), MOMENTUM)


def profile_for_state(state: StateField, grid=None) -> EnergyProfile:
    if state.axis == "x":
        return decompose_config(state, grid)
    return decompose_momentum_qho(state, grid)


def log_density_curvature(state: StateField, points):
    """d^2 ln rho, algebraically 2 (R''/R - (R'/R)^2); never differences logs."""
    r0 = np.asarray(state.r_derivative(points, 0), dtype=float)
    r1 = np.asarray(state.r_derivative(points, 1), dtype=float)
    r2 = np.asarray(state.r_derivative(points, 2), dtype=float)
    u = r1 / r0
    return 2.0 * (r2 / r0 - u * u)


def density_maxima(state: StateField, grid=None) -> np.ndarray:
    """Local maxima of the density, Newton-refined on rho' = 2 R R'."""
    if grid is None:
        grid = state.default_grid()
    grid = np.asarray(grid, dtype=float)
    rho = np.asarray(state.density(grid), dtype=float)
    mask = node_mask(state, grid)
    cand = np.nonzero((rho[1:-1] >= rho[:-2]) & (rho[1:-1] >= rho[2:])
                      & ~mask[1:-1] & (rho[1:-1] > 0))[0] + 1
    h = grid[1] - grid[0]
    out: list[float] = []
    for i in cand:
        z = float(grid[i])
        ok = False
        for _ in range(60):
            r0 = float(state.r_derivative(z, 0))
            r1 = float(state.r_derivative(z, 1))
            r2 = float(state.r_derivative(z, 2))
            g = 2.0 * r0 * r1
            dg = 2.0 * (r1 * r1 + r0 * r2)
            if dg == 0.0:
                break
            step = g / dg
            z -= step
            if abs(step) < 1e-13 * max(1.0, abs(z)):
                ok = True
                break
        if not ok or abs(z - grid[i]) > 2.0 * h:
            continue
        r1 = float(state.r_derivative(z, 1))
        r0 = float(state.r_derivative(z, 0))
        r2 = float(state.r_derivative(z, 2))
        if r1 * r1 + r0 * r2 >= 0.0:  # rho'' >= 0: not a maximum
            continue
        if out and abs(z - out[-1]) <= h:
            continue
        out.append(z)
    return np.array(out)


def stationarity_residual(state: StateField, kinetic=None, potential=None,
                          grid=None) -> float:
    """max |H_eff - E| over unmasked grid points, with causal identification.

    Configuration: T(S') + quantum(T) + V(x); momentum: T(p) + quantum(V)
    + V(-S'), both evaluated through the expansion engine.
    """
    ops = state.hamiltonian()
    if kinetic is None or potential is None:
        if ops is None:
            raise IncompatibleError("state carries no Hamiltonian; pass operators")
        kinetic = kinetic if kinetic is not None else ops[0]
        potential = potential if potential is not None else ops[1]
    if grid is None:
        grid = state.default_grid()
    grid = np.asarray(grid, dtype=float)
    pts = grid[~node_mask(state, grid)]
    if state.axis == "x":
        ex = expand(kinetic, CONFIGURATION)
        total = evaluate_expansion(ex.terms, state, pts) + potential.classical_value(pts)
    else:
        ex = expand(potential, MOMENTUM)
        total = evaluate_expansion(ex.terms, state, pts) + kinetic.classical_value(pts)
    return float(np.max(np.abs(total - state.energy)))


def continuity_residual(state: StateField, op=None, representation=None,
                        grid=None) -> float:
    """max |Im (O psi / psi)| over unmasked points; 0 for stationary states."""
    if representation is None:
        representation = CONFIGURATION if state.axis == "x" else MOMENTUM
    if op is None:
        ops = state.hamiltonian()
        if ops is None:
            raise IncompatibleError("state carries no Hamiltonian; pass an operator")
        op = ops[0] if representation == CONFIGURATION else ops[1]
    if (representation == CONFIGURATION) != (state.axis == "x"):
        raise IncompatibleError("state axis does not match the representation")
    if grid is None:
        grid = state.default_grid()
    grid = np.asarray(grid, dtype=float)
    pts = grid[~node_mask(state, grid)]
    quot = operator_quotient(state, op, representation, pts)
    return float(np.max(np.abs(quot.imag)))


# ---------------------------------------------------------------------------
# Wigner second-moment identity
# ---------------------------------------------------------------------------


@dataclass
class WignerMomentReport:
    """Conditional p-variance versus the log-density curvature identity."""

    x: np.ndarray
    variance: np.ndarray
    identity_rhs: np.ndarray
    max_residual: float
    min_dispersion: float
    n_y: int


def _state_width(state: StateField) -> float:
    grid = state.default_grid()
    rho = np.asarray(state.density(grid), dtype=float)
    m0 = np.trapezoid(rho, grid)
    m2 = np.trapezoid(grid * grid * rho, grid)
    return math.sqrt(m2 / m0)


def _wigner_variance(state: StateField, x: np.ndarray, p: np.ndarray,
                     n_y: int, y_half: float, hbar: float) -> np.ndarray:
    y = np.linspace(-y_half, y_half, n_y)
    k = (np.asarray(state.r_derivative(x[:, None] + y[None, :], 0), dtype=float)
         * np.asarray(state.r_derivative(x[:, None] - y[None, :], 0), dtype=float))
    w_y = np.full(n_y, y[1] - y[0])
    w_y[0] *= 0.5
    w_y[-1] *= 0.5
    cos_py = np.cos(2.0 * np.outer(p, y) / hbar)  # (n_p, n_y)
    f = (k * w_y) @ cos_py.T / (math.pi * hbar)  # (n_x, n_p)
    rho = np.trapezoid(f, p, axis=1)
    p1 = np.trapezoid(f * p, p, axis=1)
    p2 = np.trapezoid(f * p * p, p, axis=1)
    return p2 / rho - (p1 / rho) ** 2


def wigner_moment_check(state: StateField, p_grid=None, x_window: float = 3.0,
                        n_x: int = 61, n_y: int = 1024,
                        node_radius: float = 0.25) -> WignerMomentReport:
    """Check Var(p | x) = -(hbar^2/4) d^2 ln rho via phase-space quadrature.

    The Wigner function of the real state is integrated by trapezoid in y
    (extent of 8 state widths) and p; x points within node_radius of a node
    are excluded.  Doubling the y resolution must move the residual by less
    than 10%, else QuadratureNotConvergedError.
    """
    if state.axis != "x":
        raise IncompatibleError("the moment check runs on configuration states")
    if float(np.max(np.abs(state.s_derivative(state.default_grid(), 1)))) != 0.0:
        raise IncompatibleError("the moment check needs a real (S = 0) state")
    hbar = state.units.hbar
    if p_grid is None:
        p_grid = np.linspace(-6.0, 6.0, 481)
    p_grid = np.asarray(p_grid, dtype=float)
    x = np.linspace(-x_window, x_window, n_x)
    for node in state.nodes():
        x = x[np.abs(x - node) >= node_radius]
    y_half = 8.0 * _state_width(state)
    rhs = -(hbar ** 2 / 4.0) * log_density_curvature(state, x)
    var_1 = _wigner_variance(state, x, p_grid, n_y, y_half, hbar)
    var_2 = _wigner_variance(state, x, p_grid, 2 * n_y, y_half, hbar)
    res_1 = float(np.max(np.abs(var_1 - rhs)))
    res_2 = float(np.max(np.abs(var_2 - rhs)))
    if abs(res_2 - res_1) > 0.1 * max(res_2, 1e-12):
        raise QuadratureNotConvergedError(
            f"residual moved {res_1:.3e} -> {res_2:.3e} on doubling the y grid")
    return WignerMomentReport(
        x=x, variance=var_2, identity_rhs=rhs, max_residual=res_2,
        min_dispersion=float(np.min(var_2)), n_y=2 * n_y)
