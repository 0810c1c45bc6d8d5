"""Independent evaluation of (O psi)/psi by complex Taylor arithmetic.

The expansion engine produces Re((O psi)/psi) through a combinatorial
derivation; this module computes the same quotient by a route that shares
none of that code: build the Taylor series of psi = R exp(iS/hbar) around
each evaluation point (series product of the R series with the exponential
series), read off psi^(m)/psi, and contract with the operator's monomials.
The float path works on any state; the exact path runs the identical
recurrences in rational complex arithmetic for polynomial (R, S), giving a
bit-for-bit ground truth.  The imaginary part doubles as the continuity
check for stationary states.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

import numpy as np

from .expansion import CONFIGURATION, ExpansionTerm, PolynomialOperator

#: d/d(axis) prefactor of the conjugate-variable operator per representation:
#: p_hat = -i hbar d/dx in configuration, x_hat = +i hbar d/dp in momentum
_UNIT = {CONFIGURATION: -1j, "momentum": 1j}


def quotient_derivatives(state, points, m_max: int, hbar: float | None = None) -> list:
    """[psi^(m)/psi for m in 0..m_max] as complex arrays, via Taylor series."""
    pts = np.asarray(points, dtype=float)
    hb = float(state.units.hbar if hbar is None else hbar)
    r = [np.asarray(state.r_derivative(pts, k), dtype=float) / factorial(k)
         for k in range(m_max + 1)]
    a = [1j * np.asarray(state.s_derivative(pts, k), dtype=float) / (hb * factorial(k))
         for k in range(m_max + 1)]
    e = [np.ones(pts.shape, dtype=complex)]
    for n in range(1, m_max + 1):
        acc = np.zeros(pts.shape, dtype=complex)
        for j in range(1, n + 1):
            acc = acc + j * a[j] * e[n - j]
        e.append(acc / n)
    out = []
    for m in range(m_max + 1):
        c_m = np.zeros(pts.shape, dtype=complex)
        for k in range(m + 1):
            c_m = c_m + r[k] * e[m - k]
        out.append(factorial(m) * c_m / r[0])
    return out


def operator_quotient(state, op: PolynomialOperator, representation: str, points,
                      hbar: float | None = None):
    """Complex (O psi)/psi for a polynomial operator in the representation
    where it differentiates."""
    pts = np.asarray(points, dtype=float)
    scalar = pts.ndim == 0
    hb = float(state.units.hbar if hbar is None else hbar)
    unit = _UNIT[representation] * hb
    quot = quotient_derivatives(state, pts, op.degree, hbar=hb)
    total = np.zeros(pts.shape, dtype=complex)
    for m, a_m in enumerate(op.coefficients):
        if a_m == 0:
            continue
        total = total + float(a_m) * unit ** m * quot[m]
    return complex(total) if scalar else total


# ---------------------------------------------------------------------------
# exact rational-complex path for polynomial (R, S)
# ---------------------------------------------------------------------------


class CFrac:
    """Complex number with Fraction components; just enough arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        o = other if isinstance(other, CFrac) else CFrac(other)
        return CFrac(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return CFrac(-self.re, -self.im)

    def __sub__(self, other):
        o = other if isinstance(other, CFrac) else CFrac(other)
        return CFrac(self.re - o.re, self.im - o.im)

    def __mul__(self, other):
        o = other if isinstance(other, CFrac) else CFrac(other)
        return CFrac(self.re * o.re - self.im * o.im,
                     self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = other if isinstance(other, CFrac) else CFrac(other)
        d = o.re * o.re + o.im * o.im
        return CFrac((self.re * o.re + self.im * o.im) / d,
                     (self.im * o.re - self.re * o.im) / d)

    def __eq__(self, other):
        o = other if isinstance(other, CFrac) else CFrac(other)
        return self.re == o.re and self.im == o.im

    def __repr__(self):
        return f"CFrac({self.re}, {self.im})"


def _poly_diff(poly: list[CFrac]) -> list[CFrac]:
    return [CFrac(i) * c for i, c in enumerate(poly)][1:] or [CFrac(0)]


def _poly_mul(a: list[CFrac], b: list[CFrac]) -> list[CFrac]:
    out = [CFrac(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return out

def _poly_add(a: list[CFrac], b: list[CFrac]) -> list[CFrac]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else CFrac(0)) + (b[i] if i < len(b) else CFrac(0))
            for i in range(n)]


def _poly_scale(a: list[CFrac], s: CFrac) -> list[CFrac]:
    return [s * c for c in a]


def _poly_eval(a: list[CFrac], xi: Fraction) -> CFrac:
    acc = CFrac(0)
    for c in reversed(a):
        acc = acc * CFrac(xi) + c
    return acc


def _real_poly(coeffs) -> list[CFrac]:
    return [CFrac(Fraction(c)) for c in coeffs]


def _fraction_diff(coeffs, order: int = 1):
    coeffs = tuple(Fraction(c) for c in coeffs)
    for _ in range(order):
        coeffs = tuple(i * c for i, c in enumerate(coeffs))[1:] or (Fraction(0),)
    return coeffs


def oracle_exact(op: PolynomialOperator, representation: str, r_coeffs, s_coeffs,
                 xi: Fraction, hbar: Fraction) -> CFrac:
    """(O psi)/psi at rational xi, exactly.

    psi^(j) = (C_j / R^j) psi with C_{j+1} = C_j' R + (1-j) C_j R' + (i/hbar) C_j S' R,
    from d/dxi log psi = R'/R + i S'/hbar.
    """
    hbar = Fraction(hbar)
    r = _real_poly(r_coeffs)
    r_prime = _poly_diff(r)
    s_prime = _real_poly(_fraction_diff(s_coeffs, 1))
    i_over_h = CFrac(0, 1 / hbar)
    unit = CFrac(0, -hbar) if representation == CONFIGURATION else CFrac(0, hbar)
    c_j = [CFrac(1)]
    r_at = _poly_eval(r, xi)
    total = CFrac(Fraction(op.coefficient(0)))
    unit_pow = CFrac(1)
    r_pow = CFrac(1)
    for j in range(1, op.degree + 1):
        c_j = _poly_add(
            _poly_add(_poly_mul(_poly_diff(c_j), r),
                      _poly_scale(_poly_mul(c_j, r_prime), CFrac(1 - (j - 1)))),
            _poly_scale(_poly_mul(_poly_mul(c_j, s_prime), r), i_over_h))
        unit_pow = unit_pow * unit
        r_pow = r_pow * r_at
        a_j = Fraction(op.coefficient(j))
        if a_j != 0:
            total = total + CFrac(a_j) * unit_pow * (_poly_eval(c_j, xi) / r_pow)
    return total


def evaluate_terms_exact(terms, r_coeffs, s_coeffs, xi: Fraction,
                         hbar: Fraction) -> Fraction:
    """Exact engine-side evaluation of expansion terms on polynomial (R, S)."""
    hbar = Fraction(hbar)
    xi = Fraction(xi)
    r0 = _eval_fraction(tuple(Fraction(c) for c in r_coeffs), xi)
    total = Fraction(0)
    for t in terms:
        acc = t.coefficient * hbar ** t.hbar_power
        for n in t.r_orders:
            acc *= _eval_fraction(_fraction_diff(r_coeffs, n), xi) / r0
        for n in t.s_orders:
            acc *= _eval_fraction(_fraction_diff(s_coeffs, n), xi)
        total += acc
    return total


def _eval_fraction(coeffs, xi: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * xi + c
    return acc
