"""Airy function Ai and its derivative, self-contained float64 evaluation.

Maclaurin series of the defining ODE y'' = xi*y on |xi| <= SEAM, standard
asymptotic expansions beyond (exponentially decaying branch for xi > SEAM,
oscillatory branch for xi < -SEAM), with optimal truncation of the divergent
asymptotic series.  The only imported constants are the two initial values
Ai(0) and Ai'(0) expressed through the Gamma function.

Higher derivatives never need their own series: the ODE reduces every order
to the pair (Ai, Ai') through integer-coefficient polynomials, see
derivative_basis().
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

#: Ai(0) = 3^(-2/3) / Gamma(2/3)
AIRY_0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
#: Ai'(0) = -3^(-1/3) / Gamma(1/3)
AIRY_PRIME_0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)

#: series/asymptotics crossover point
SEAM = 6.0

_SQRT_PI = math.sqrt(math.pi)


def _maclaurin(xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Ai, Ai') by the ODE power series; accurate to ~1e-13 on |xi| <= 6."""
    xi3 = xi * xi * xi
    # y1 = 1 + xi^3/6 + ..., y2 = xi + xi^4/12 + ...; primed variants
    t_y1 = np.ones_like(xi)
    t_y2 = xi.copy()
    t_d1 = 0.5 * xi * xi  # first nonzero term of y1'
    t_d2 = np.ones_like(xi)
    y1 = t_y1.copy()
    y2 = t_y2.copy()
    d1 = t_d1.copy()
    d2 = t_d2.copy()
    for j in range(1, 200):
        k = 3.0 * (j - 1)
        t_y1 = t_y1 * xi3 / ((k + 2.0) * (k + 3.0))
        t_y2 = t_y2 * xi3 / ((k + 3.0) * (k + 4.0))
        t_d2 = t_d2 * xi3 / ((k + 1.0) * (k + 3.0))
        kj = 3.0 * j
        t_d1 = t_d1 * xi3 / (kj * (kj + 2.0))
        y1 += t_y1
        y2 += t_y2
        d1 += t_d1
        d2 += t_d2
        if (max(np.max(np.abs(t_y1)), np.max(np.abs(t_y2)),
                np.max(np.abs(t_d1)), np.max(np.abs(t_d2))) < 1e-22):
            break
    ai = AIRY_0 * y1 + AIRY_PRIME_0 * y2
    aip = AIRY_0 * d1 + AIRY_PRIME_0 * d2
    return ai, aip


def _asymptotic_u_v(n_max: int = 80) -> tuple[np.ndarray, np.ndarray]:
    u = np.empty(n_max)
    v = np.empty(n_max)
    u[0] = 1.0
    v[0] = 1.0
    for k in range(1, n_max):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1))
        v[k] = u[k] * (6 * k + 1) / (1.0 - 6 * k)
    return u, v


_U, _V = _asymptotic_u_v()


def _optimal_sum(coeffs: np.ndarray, inv_zeta: np.ndarray, alternate: bool,
                 stride: int = 1, offset: int = 0) -> np.ndarray:
    """Sum coeffs[offset::stride] * (+-1)^k * inv_zeta^(offset + stride*k).

    Each point's divergent series is truncated at its smallest term, keeping
    half of the first growing term (halves the optimal-truncation error of an
    alternating asymptotic series)."""
    out = np.zeros_like(inv_zeta)
    term = coeffs[offset] * inv_zeta ** offset
    prev_mag = np.full_like(inv_zeta, np.inf)
    active = np.ones(inv_zeta.shape, dtype=bool)
    sign = 1.0
    idx = offset
    while np.any(active) and idx + stride < len(coeffs):
        grow = np.abs(term) > prev_mag
        out = np.where(active & grow, out + 0.5 * sign * term, out)
        active = active & ~grow
        out = np.where(active, out + sign * term, out)
        prev_mag = np.abs(term)
        idx += stride
        term = coeffs[idx] * inv_zeta ** idx
        if alternate:
            sign = -sign
    return out


def _asymptotic_pos(xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Decaying branch for xi > SEAM."""
    zeta = (2.0 / 3.0) * xi ** 1.5
    iz = 1.0 / zeta
    s_u = _optimal_sum(_U, iz, alternate=True)
    s_v = _optimal_sum(_V, iz, alternate=True)
    root4 = xi ** 0.25
    pre = np.exp(-zeta) / (2.0 * _SQRT_PI)
    return pre / root4 * s_u, -pre * root4 * s_v


def _asymptotic_neg(xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Oscillatory branch for xi < -SEAM."""
    t = -xi
    zeta = (2.0 / 3.0) * t ** 1.5
    iz = 1.0 / zeta
    c = np.cos(zeta - 0.25 * math.pi)
    s = np.sin(zeta - 0.25 * math.pi)
    su_even = _optimal_sum(_U, iz, alternate=True, stride=2, offset=0)
    su_odd = _optimal_sum(_U, iz, alternate=True, stride=2, offset=1)
    sv_even = _optimal_sum(_V, iz, alternate=True, stride=2, offset=0)
    sv_odd = _optimal_sum(_V, iz, alternate=True, stride=2, offset=1)
    root4 = t ** 0.25
    ai = (c * su_even + s * su_odd) / (_SQRT_PI * root4)
    aip = (s * sv_even - c * sv_odd) * root4 / _SQRT_PI
    return ai, aip


def airy_pair(xi) -> tuple[np.ndarray, np.ndarray]:
    """Return (Ai(xi), Ai'(xi)) for scalar or array input (float64)."""
    x = np.asarray(xi, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    core = np.abs(x) <= SEAM
    if np.any(core):
        ai[core], aip[core] = _maclaurin(x[core])
    hi = x > SEAM
    if np.any(hi):
        ai[hi], aip[hi] = _asymptotic_pos(x[hi])
    lo = x < -SEAM
    if np.any(lo):
        ai[lo], aip[lo] = _asymptotic_neg(x[lo])
    if scalar:
        return float(ai[0]), float(aip[0])
    return ai, aip


@lru_cache(maxsize=65536)
def airy_scalar(xi: float) -> tuple[float, float]:
    """Cached scalar (Ai, Ai'); trajectory integration revisits points."""
    a, ap = airy_pair(float(xi))
    return a, ap


@lru_cache(maxsize=64)
def derivative_basis(order: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Integer polynomials (P_n, Q_n) with Ai^(n) = P_n(xi) Ai + Q_n(xi) Ai'.

    Coefficient tuples are ascending in xi.  From Ai'' = xi Ai:
    P_{n+1} = P_n' + xi Q_n and Q_{n+1} = P_n + Q_n'.
    """
    if order == 0:
        return (1,), (0,)
    p, q = derivative_basis(order - 1)
    dp = tuple((i + 1) * c for i, c in enumerate(p[1:], start=0))
    dq = tuple((i + 1) * c for i, c in enumerate(q[1:], start=0))
    xq = (0,) + q
    n = max(len(dp), len(xq), 1)
    new_p = tuple((dp[i] if i < len(dp) else 0) + (xq[i] if i < len(xq) else 0)
                  for i in range(n))
    m = max(len(p), len(dq), 1)
    new_q = tuple((p[i] if i < len(p) else 0) + (dq[i] if i < len(dq) else 0)
                  for i in range(m))

    def trim(c):
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        return c

    return trim(new_p) or (0,), trim(new_q) or (0,)


def polyval_int(coeffs: tuple[int, ...], x):
    """Horner evaluation of an ascending integer coefficient tuple."""
    acc = np.zeros_like(np.asarray(x, dtype=float))
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def airy_derivative(xi, order: int):
    """Ai^(order)(xi) through the (P, Q) reduction."""
    x = np.asarray(xi, dtype=float)
    ai, aip = airy_pair(x)
    p, q = derivative_basis(order)
    return polyval_int(p, x) * ai + polyval_int(q, x) * aip
