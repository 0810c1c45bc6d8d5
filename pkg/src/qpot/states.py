"""Reference states exposing amplitude/phase derivatives to arbitrary order.

Every state presents the same surface: a polar pair (R, S) on one axis
("x" for configuration, "p" for momentum) with r_derivative / s_derivative
of any order, a density, node detection, and the generating Hamiltonian
operators where one exists.  Analytic providers (Airy linear-potential
state, harmonic-oscillator eigenstates, the cubic-phase momentum plane
wave, exact polynomial test states) differentiate exactly; SampledState
reconstructs (R, S) from complex samples and differentiates numerically.

States are immutable after construction and safe to share across threads.
Normalization is arbitrary: all consumers use ratios or renormalize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .airy import airy_pair, airy_scalar, derivative_basis, polyval_int
from .errors import NonUniformGridError, PhaseUnwrapFailure
from .expansion import PolynomialOperator

#: |R| below this fraction of the state's amplitude scale counts as a node
NODE_FRACTION = 1e-10

#: points within this many cells of the ends of a sampled grid use one-sided
#: stencils and are flagged lower-accuracy
BOUNDARY_WIDTH = 4


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0

    def describe(self) -> str:
        return "hbar=%.17g m=%.17g omega=%.17g" % (self.hbar, self.mass, self.omega)


NATURAL = UnitSystem()


def _as_points(points):
    pts = np.asarray(points, dtype=float)
    return pts, pts.ndim == 0


class StateField:
    """Common surface of all states; subclasses fill in the derivatives."""

    axis: str = "x"
    provenance: str = "analytic"
    label: str = "state"

    def __init__(self, units: UnitSystem | None = None, energy: float = 0.0):
        self.units = units if units is not None else NATURAL
        self.energy = float(energy)

    # subclass API ---------------------------------------------------------

    def default_grid(self) -> np.ndarray:
        raise NotImplementedError

    def r_derivative(self, points, order: int):
        raise NotImplementedError

    def s_derivative(self, points, order: int):
        raise NotImplementedError

    def hamiltonian(self) -> tuple[PolynomialOperator, PolynomialOperator] | None:
        """(kinetic, potential) pair generating this state, if one exists."""
        return None

    # shared behavior -------------------------------------------------------

    @property
    def amplitude_scale(self) -> float:
        cached = getattr(self, "_amplitude_scale", None)
        if cached is None:
            cached = float(np.max(np.abs(self.r_derivative(self.default_grid(), 0))))
            object.__setattr__(self, "_amplitude_scale", cached)
        return cached

    def density(self, points):
        r = self.r_derivative(points, 0)
        return r * r

    def is_node(self, points):
        r = np.abs(np.asarray(self.r_derivative(points, 0), dtype=float))
        return r < NODE_FRACTION * self.amplitude_scale

    def nodes(self) -> np.ndarray:
        """Zeros of R inside the default grid, Newton-refined."""
        grid = self.default_grid()
        r = np.asarray(self.r_derivative(grid, 0), dtype=float)
        flips = np.nonzero(np.signbit(r[:-1]) != np.signbit(r[1:]))[0]
        out = []
        for i in flips:
            z = 0.5 * (grid[i] + grid[i + 1])
            for _ in range(60):
                f = float(self.r_derivative(z, 0))
                df = float(self.r_derivative(z, 1))
                if df == 0.0:
                    break
                step = f / df
                z -= step
                if abs(step) < 1e-14 * max(1.0, abs(z)):
                    break
            out.append(z)
        return np.array(out)

    def causal_momentum(self, x):
        """p = dS/dx along the configuration axis."""
        return self.s_derivative(x, 1)

    def causal_position(self, p):
        """x = -dS/dp along the momentum axis."""
        return -np.asarray(self.s_derivative(p, 1))


# ---------------------------------------------------------------------------
# analytic providers
# ---------------------------------------------------------------------------


class AiryState(StateField):
    """Stationary state of H = p^2/2m + x/2: R(x) = Ai(c (x - 2E)), S = 0.

    c = (m/hbar^2)^(1/3) reduces to 1 in natural units, where the amplitude
    satisfies R'' = (x - 2E) R.  All derivatives reduce to (Ai, Ai') through
    integer polynomials, so ratios like R''/R stay exact near nodes.
    """

    axis = "x"
    label = "airy"

    def __init__(self, energy: float = 0.0, units: UnitSystem | None = None):
        super().__init__(units, energy)
        self._c = (self.units.mass / self.units.hbar ** 2) ** (1.0 / 3.0)

    def default_grid(self) -> np.ndarray:
        return np.linspace(-12.0, 4.0, 2001)

    def _argument(self, points):
        return self._c * (points - 2.0 * self.energy)

    def r_derivative(self, points, order: int):
        pts, scalar = _as_points(points)
        u = self._argument(pts)
        p, q = derivative_basis(order)
        if scalar:
            ai, aip = airy_scalar(float(u))
        else:
            ai, aip = airy_pair(u)
        val = self._c ** order * (polyval_int(p, u) * ai + polyval_int(q, u) * aip)
        return float(val) if scalar else val

    def s_derivative(self, points, order: int):
        pts, scalar = _as_points(points)
        return 0.0 if scalar else np.zeros_like(pts)

    def ratio_basis(self, points, max_order: int):
        """(tau, [(P_n, Q_n)]) with R^(n)/R = P_n + Q_n tau, tau = Ai'/Ai.

        Lets expansion evaluation collect terms per power of tau, so the
        divergent parts of near-node ratio sums cancel at the coefficient
        level instead of numerically.
        """
        pts, scalar = _as_points(points)
        u = self._argument(pts)
        if scalar:
            ai, aip = airy_scalar(float(u))
        else:
            ai, aip = airy_pair(u)
        tau = aip / ai
        basis = []
        for order in range(max_order + 1):
            p, q = derivative_basis(order)
            cn = self._c ** order
            basis.append((cn * polyval_int(p, u), cn * polyval_int(q, u)))
        return tau, basis

    def hamiltonian(self):
        return (PolynomialOperator.kinetic(Fraction(self.units.mass)),
                PolynomialOperator.linear(Fraction(1, 2)))


@lru_cache(maxsize=512)
def _hermite_coeffs(n: int) -> tuple[int, ...]:
    """Physicists' Hermite H_n, ascending integer coefficients."""
    if n == 0:
        return (1,)
    if n == 1:
        return (0, 2)
    h_prev, h = (1,), (0, 2)
    for k in range(1, n):
        shifted = (0,) + h  # xi * H_k
        nxt = [2 * c for c in shifted]
        for i, c in enumerate(h_prev):
            nxt[i] -= 2 * k * c
        h_prev, h = h, tuple(nxt)
    return h


@lru_cache(maxsize=4096)
def _qho_derivative_poly(n: int, order: int) -> tuple[int, ...]:
    """P with d^order/du^order [H_n e^(-u^2/2)] = P(u) e^(-u^2/2); P_{j+1} = P_j' - u P_j."""
    if order == 0:
        return _hermite_coeffs(n)
    p = _qho_derivative_poly(n, order - 1)
    dp = tuple((i + 1) * c for i, c in enumerate(p[1:]))
    up = (0,) + p
    m = max(len(dp), len(up))
    return tuple((dp[i] if i < len(dp) else 0) - (up[i] if i < len(up) else 0)
                 for i in range(m))


class HarmonicState(StateField):
    """Oscillator eigenstate n on either axis: R = H_n(u) e^(-u^2/2), S = 0.

    u = sqrt(scale) * axis value with scale = m omega / hbar on x and
    1/(m omega hbar) on p; both reduce to u = axis value in natural units,
    making the two representations the same function of their argument.
    """

    def __init__(self, n: int, axis: str = "x", units: UnitSystem | None = None):
        if n < 0:
            raise ValueError("quantum number must be >= 0")
        if axis not in ("x", "p"):
            raise ValueError("axis must be 'x' or 'p'")
        u = units if units is not None else NATURAL
        super().__init__(u, u.hbar * u.omega * (n + 0.5))
        self.n = int(n)
        self.axis = axis
        self.label = f"qho:{n}"
        if axis == "x":
            scale = u.mass * u.omega / u.hbar
        else:
            scale = 1.0 / (u.mass * u.omega * u.hbar)
        self._root = math.sqrt(scale)

    def default_grid(self) -> np.ndarray:
        return np.linspace(-5.0, 5.0, 2001)

    def r_derivative(self, points, order: int):
        pts, scalar = _as_points(points)
        u = self._root * pts
        poly = _qho_derivative_poly(self.n, order)
        val = self._root ** order * polyval_int(poly, u) * np.exp(-0.5 * u * u)
        return float(val) if scalar else val

    def s_derivative(self, points, order: int):
        pts, scalar = _as_points(points)
        return 0.0 if scalar else np.zeros_like(pts)

    def nodes(self) -> np.ndarray:
        if self.n == 0:
            return np.array([])
        roots = np.polynomial.hermite.hermroots([0] * self.n + [1])
        return np.sort(roots) / self._root

    def hamiltonian(self):
        m = Fraction(self.units.mass)
        w = Fraction(self.units.omega)
        return (PolynomialOperator.kinetic(m), PolynomialOperator.harmonic(m, w))


class LinearMomentumState(StateField):
    """Momentum-representation stationary state of V = x/2: R = 1, cubic S.

    S(p) = hbar (p^3/3 - 2 p E), matching the plane-wave exponent; the causal
    position is x = -S' = 2E - p^2 in natural units.
    """

    axis = "p"
    label = "linear-momentum"

    def __init__(self, energy: float = 0.0, units: UnitSystem | None = None):
        super().__init__(units, energy)

    def default_grid(self) -> np.ndarray:
        return np.linspace(-4.0, 4.0, 2001)

    def r_derivative(self, points, order: int):
        pts, scalar = _as_points(points)
        if order == 0:
            return 1.0 if scalar else np.ones_like(pts)
        return 0.0 if scalar else np.zeros_like(pts)

    def s_derivative(self, points, order: int):
        pts, scalar = _as_points(points)
        hb = self.units.hbar
        e = self.energy
        if order == 0:
            val = hb * (pts ** 3 / 3.0 - 2.0 * pts * e)
        elif order == 1:
            val = hb * (pts * pts - 2.0 * e)
        elif order == 2:
            val = 2.0 * hb * pts
        elif order == 3:
            val = 2.0 * hb * np.ones_like(pts)
        else:
            val = np.zeros_like(pts)
        return float(val) if scalar else val

    def is_node(self, points):
        pts, _ = _as_points(points)
        return np.zeros(pts.shape, dtype=bool)

    def nodes(self) -> np.ndarray:
        return np.array([])

    def hamiltonian(self):
        return (PolynomialOperator.kinetic(Fraction(self.units.mass)),
                PolynomialOperator.linear(Fraction(1, 2)))


class PolynomialState(StateField):
    """Exact polynomial (R, S) pair for oracle comparisons.

    Coefficients are Fractions (ascending); float evaluation uses Horner on
    the exact values, and the *_exact variants stay in rational arithmetic.
    """

    label = "polynomial"

    def __init__(self, r_coeffs, s_coeffs, axis: str = "x",
                 units: UnitSystem | None = None):
        super().__init__(units, 0.0)
        if axis not in ("x", "p"):
            raise ValueError("axis must be 'x' or 'p'")
        self.axis = axis
        self.r_coeffs = tuple(Fraction(c) for c in r_coeffs)
        self.s_coeffs = tuple(Fraction(c) for c in s_coeffs)

    @staticmethod
    def _diff(coeffs: tuple[Fraction, ...], order: int) -> tuple[Fraction, ...]:
        for _ in range(order):
            coeffs = tuple(i * c for i, c in enumerate(coeffs))[1:]
        return coeffs

    @staticmethod
    def _eval_float(coeffs, pts):
        acc = np.zeros_like(pts)
        for c in reversed(coeffs):
            acc = acc * pts + float(c)
        return acc

    @staticmethod
    def _eval_exact(coeffs, xi: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * xi + c
        return acc

    def default_grid(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, 201)

    def r_derivative(self, points, order: int):
        pts, scalar = _as_points(points)
        val = self._eval_float(self._diff(self.r_coeffs, order), pts)
        return float(val) if scalar else val

    def s_derivative(self, points, order: int):
        pts, scalar = _as_points(points)
        val = self._eval_float(self._diff(self.s_coeffs, order), pts)
        return float(val) if scalar else val

    def r_derivative_exact(self, xi: Fraction, order: int) -> Fraction:
        return self._eval_exact(self._diff(self.r_coeffs, order), xi)

    def s_derivative_exact(self, xi: Fraction, order: int) -> Fraction:
        return self._eval_exact(self._diff(self.s_coeffs, order), xi)


# ---------------------------------------------------------------------------
# sampled states
# ---------------------------------------------------------------------------


def _fd_first_derivative(f: np.ndarray, h: float) -> np.ndarray:
    """First derivative on a uniform grid.

    Interior: one Richardson step over the 4th-order central stencil,
    (16 D_h - D_2h)/15.  Near-edge interior: plain 4th-order central.
    Outermost two points each side: one-sided 5-point 4th-order stencils.
    """
    n = len(f)
    out = np.empty_like(f)
    d_h = np.empty_like(f)
    d_h[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    if n >= 9:
        d_2h = (f[:-8] - 8.0 * f[2:-6] + 8.0 * f[6:-2] - f[8:]) / (24.0 * h)
        out[4:-4] = (16.0 * d_h[4:-4] - d_2h) / 15.0
    out[2:4] = d_h[2:4]
    out[-4:-2] = d_h[-4:-2]
    for j in (0, 1):
        out[j] = (-25.0 * f[j] + 48.0 * f[j + 1] - 36.0 * f[j + 2]
                  + 16.0 * f[j + 3] - 3.0 * f[j + 4]) / (12.0 * h)
    for j in (n - 2, n - 1):
        out[j] = (25.0 * f[j] - 48.0 * f[j - 1] + 36.0 * f[j - 2]
                  - 16.0 * f[j - 3] + 3.0 * f[j - 4]) / (12.0 * h)
    return out


class SampledState(StateField):
    """State reconstructed from complex samples on a uniform grid.

    R is |psi| with sign kept continuous through simple nodes (sign flips
    are accepted only where the amplitude dips below a quarter of its
    maximum); S is hbar times the unwrapped residual phase.  Derivatives use
    finite differences; boundary_flags marks the lower-accuracy edge points.
    """

    provenance = "sampled"
    label = "sampled"

    def __init__(self, grid, values, units: UnitSystem | None = None,
                 axis: str = "x", energy: float = 0.0):
        super().__init__(units, energy)
        if axis not in ("x", "p"):
            raise ValueError("axis must be 'x' or 'p'")
        self.axis = axis
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=complex)
        if grid.ndim != 1 or len(grid) < 9:
            raise NonUniformGridError("need at least 9 grid points")
        if values.shape != grid.shape:
            raise ValueError("grid and values must have matching shapes")
        steps = np.diff(grid)
        h = steps[0]
        if h <= 0 or np.max(np.abs(steps - h)) > 1e-12 * abs(h):
            raise NonUniformGridError("grid spacing is not uniform to 1e-12")
        self.grid = grid
        self.values = values
        self.h = float(h)
        self._r, self._s = self._polar_split(values, self.units.hbar)
        self._r_derivs = {0: self._r}
        self._s_derivs = {0: self._s}

    @staticmethod
    def _polar_split(values: np.ndarray, hbar: float):
        amp = np.abs(values)
        amax = float(np.max(amp))
        if amax == 0.0:
            return np.zeros(len(values)), np.zeros(len(values))
        phi = np.unwrap(np.angle(values))
        sign = np.ones(len(values))
        k0 = round(phi[0] / math.pi)
        if k0:
            phi = phi - k0 * math.pi
            sign *= (-1.0) ** k0
        jumps = np.diff(phi)
        for j in np.nonzero(np.abs(jumps) > 0.5 * math.pi)[0]:
            if min(amp[j], amp[j + 1]) >= 0.25 * amax:
                raise PhaseUnwrapFailure(
                    f"phase jump of {jumps[j]:.3f} rad between samples {j} and "
                    f"{j + 1} away from any node")
            k = round(jumps[j] / math.pi)
            phi[j + 1:] -= k * math.pi
            sign[j + 1:] *= (-1.0) ** k
        return sign * amp, hbar * phi

    @property
    def boundary_flags(self) -> np.ndarray:
        flags = np.zeros(len(self.grid), dtype=bool)
        flags[:BOUNDARY_WIDTH] = True
        flags[-BOUNDARY_WIDTH:] = True
        return flags

    def reconstructed(self) -> np.ndarray:
        return self._r * np.exp(1j * self._s / self.units.hbar)

    def default_grid(self) -> np.ndarray:
        return self.grid

    def _table(self, cache: dict, order: int) -> np.ndarray:
        top = max(cache)
        while top < order:
            cache[top + 1] = _fd_first_derivative(cache[top], self.h)
            top += 1
        return cache[order]

    def _lookup(self, table: np.ndarray, points):
        pts, scalar = _as_points(points)
        idx = np.rint((pts - self.grid[0]) / self.h).astype(int)
        idx = np.clip(idx, 0, len(self.grid) - 1)
        val = table[idx]
        return float(val) if scalar else val

    def r_derivative(self, points, order: int):
        return self._lookup(self._table(self._r_derivs, order), points)

    def s_derivative(self, points, order: int):
        return self._lookup(self._table(self._s_derivs, order), points)


# ---------------------------------------------------------------------------
# factories
# ---------------------------------------------------------------------------


def airy_state(energy: float = 0.0, units: UnitSystem | None = None) -> AiryState:
    return AiryState(energy, units)


def linear_momentum_state(energy: float = 0.0,
                          units: UnitSystem | None = None) -> LinearMomentumState:
    return LinearMomentumState(energy, units)


def qho_state(n: int, axis: str = "x", units: UnitSystem | None = None) -> HarmonicState:
    return HarmonicState(n, axis, units)


def sampled_state(grid, values, units: UnitSystem | None = None,
                  axis: str = "x") -> SampledState:
    return SampledState(grid, values, units, axis)


def polynomial_state(r_coeffs, s_coeffs, axis: str = "x",
                     units: UnitSystem | None = None) -> PolynomialState:
    return PolynomialState(r_coeffs, s_coeffs, axis, units)
