"""Exact series decomposition of polynomial operators acting on polar wavefunctions.

For psi = R * exp(i S / hbar), the real part of (O psi)/psi for a polynomial
operator O splits into a classical part (a polynomial in the phase gradient
S') and a quantum part: a finite series of terms carrying even powers of
hbar, ratios R^(n)/R, and phase derivatives S^(n).  In the configuration
representation O is the kinetic polynomial T(p_hat) with p_hat = -i hbar d/dx;
in the momentum representation O is the potential polynomial V(x_hat) with
x_hat = +i hbar d/dp, which contributes one extra sign (-1)^m per monomial.

Each monomial a_m of degree m contributes, for every k with k <= m and
k + m even,

    a_m (-1)^m (-1)^((k+m)/2) hbar^(m-k) (1/k!) [d^m(R S^k)/dxi^m]_{S:0} / R

where [.]_{S:0} drops every Leibniz term that retains an undifferentiated
S factor.  The bracket is expanded over derivative-order multisets; the 1/k!
cancels against permutations of the identical S slots.  All arithmetic is
exact (fractions.Fraction); floats appear only in evaluate_expansion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from .errors import IncompatibleError, NodePointError

CONFIGURATION = "configuration"
MOMENTUM = "momentum"
REPRESENTATIONS = (CONFIGURATION, MOMENTUM)

#: axis variable whose polynomial becomes a derivative operator in each representation
_DERIVATIVE_VARIABLE = {CONFIGURATION: "p", MOMENTUM: "x"}


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value)  # exact binary value
    return Fraction(value)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialOperator:
    """Polynomial in one canonical variable ('p' kinetic, 'x' potential).

    coefficients[m] multiplies variable**m and is stored exactly.
    """

    coefficients: tuple[Fraction, ...]
    variable: str

    def __post_init__(self):
        if self.variable not in ("x", "p"):
            raise ValueError(f"variable must be 'x' or 'p', got {self.variable!r}")
        coeffs = tuple(_frac(c) for c in self.coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, m: int) -> Fraction:
        if 0 <= m < len(self.coefficients):
            return self.coefficients[m]
        return Fraction(0)

    def classical_value(self, y):
        """Evaluate the polynomial at y (float array or exact Fraction)."""
        if isinstance(y, Fraction):
            acc = Fraction(0)
            for c in reversed(self.coefficients):
                acc = acc * y + c
            return acc
        y = np.asarray(y, dtype=float)
        acc = np.zeros_like(y)
        for c in reversed(self.coefficients):
            acc = acc * y + float(c)
        return float(acc) if acc.ndim == 0 else acc

    def derivative(self) -> "PolynomialOperator":
        d = tuple(m * c for m, c in enumerate(self.coefficients))[1:]
        return PolynomialOperator(d, self.variable)

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for m, c in enumerate(self.coefficients):
            if c == 0:
                continue
            if m == 0:
                parts.append(str(c))
            else:
                head = "" if abs(c) == 1 else f"{abs(c)}*"
                sign = "-" if c < 0 else ""
                pow_ = "" if m == 1 else f"^{m}"
                parts.append(f"{sign}{head}{self.variable}{pow_}")
        out = " + ".join(p if not p.startswith("-") else p for p in parts)
        return out.replace("+ -", "- ")

    # standard systems -----------------------------------------------------

    @classmethod
    def kinetic(cls, mass=1) -> "PolynomialOperator":
        """p^2 / (2m)."""
        m = _frac(mass)
        return cls((Fraction(0), Fraction(0), Fraction(1, 2) / m), "p")

    @classmethod
    def harmonic(cls, mass=1, omega=1) -> "PolynomialOperator":
        """(1/2) m omega^2 x^2."""
        m, w = _frac(mass), _frac(omega)
        return cls((Fraction(0), Fraction(0), Fraction(1, 2) * m * w * w), "x")

    @classmethod
    def linear(cls, slope=Fraction(1, 2)) -> "PolynomialOperator":
        """slope * x (default x/2, the linear drop potential)."""
        return cls((Fraction(0), _frac(slope)), "x")

    @classmethod
    def monomial(cls, degree: int, variable: str, coeff=1) -> "PolynomialOperator":
        c = [Fraction(0)] * degree + [_frac(coeff)]
        return cls(tuple(c), variable)


# ---------------------------------------------------------------------------
# expansion terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpansionTerm:
    """One term: coefficient * hbar^hbar_power * prod R^(n)/R * prod S^(n).

    Each entry n of r_orders denotes the ratio R^(n)/R (so the family is
    closed under differentiation); entries of s_orders are derivative orders
    of S, all >= 1.  Both are stored sorted descending.
    """

    coefficient: Fraction
    hbar_power: int
    r_orders: tuple[int, ...] = ()
    s_orders: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coefficient", _frac(self.coefficient))
        object.__setattr__(self, "r_orders", tuple(sorted(self.r_orders, reverse=True)))
        object.__setattr__(self, "s_orders", tuple(sorted(self.s_orders, reverse=True)))
        if any(n < 1 for n in self.s_orders):
            raise ValueError("every S factor must carry a derivative (order >= 1)")
        if any(n < 1 for n in self.r_orders):
            raise ValueError("an R-ratio of order 0 is identically 1; drop it")

    def key(self):
        return (self.hbar_power, self.r_orders, self.s_orders)

    def sort_key(self):
        lead_r = self.r_orders[0] if self.r_orders else 0
        return (-self.hbar_power, -lead_r, tuple(-n for n in self.r_orders), self.s_orders)

    def to_dict(self) -> dict:
        return {
            "coeff": str(self.coefficient),
            "hbar_pow": self.hbar_power,
            "r_derivs": list(self.r_orders),
            "s_derivs": list(self.s_orders),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExpansionTerm":
        return cls(Fraction(d["coeff"]), int(d["hbar_pow"]),
                   tuple(d["r_derivs"]), tuple(d["s_derivs"]))

    def latex(self, with_sign: bool = False) -> str:
        c = self.coefficient
        sign = "-" if c < 0 else ("+" if with_sign else "")
        mag = abs(c)
        factors = []
        if self.hbar_power == 1:
            factors.append(r"\hbar")
        elif self.hbar_power > 1:
            factors.append(r"\hbar^{%d}" % self.hbar_power)
        num = [_grouped_factors("R", self.r_orders), _grouped_factors("S", self.s_orders)]
        num = [p for p in num if p]
        coeff_str = "" if (mag == 1 and (factors or num)) else _frac_latex(mag)
        body = r"\,".join(x for x in [coeff_str] + factors if x)
        num_str = r"\,".join(num)
        if self.r_orders:
            den = "R" if len(self.r_orders) == 1 else "R^{%d}" % len(self.r_orders)
            frac = r"\frac{%s}{%s}" % (num_str or "1", den)
            body = r"\,".join(x for x in [body, frac] if x)
        elif num_str:
            body = r"\,".join(x for x in [body, num_str] if x)
        return sign + (body or _frac_latex(mag))


def _frac_latex(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    return r"\tfrac{%d}{%d}" % (f.numerator, f.denominator)


def _deriv_symbol(sym: str, order: int) -> str:
    if order <= 3:
        return sym + "'" * order
    return "%s^{(%d)}" % (sym, order)


def _grouped_factors(sym: str, orders: tuple[int, ...]) -> str:
    """Render e.g. (1,1,2) of S as (S')^{2}\\,S''."""
    out = []
    for order in sorted(set(orders), reverse=True):
        p = orders.count(order)
        base = _deriv_symbol(sym, order)
        if p == 1:
            out.append(base)
        else:
            out.append("(%s)^{%d}" % (base, p))
    return r"\,".join(out)


def _merge(terms: Iterable[ExpansionTerm]) -> tuple[ExpansionTerm, ...]:
    acc: dict = {}
    for t in terms:
        acc[t.key()] = acc.get(t.key(), Fraction(0)) + t.coefficient
    merged = [ExpansionTerm(c, h, r, s) for (h, r, s), c in acc.items() if c != 0]
    return tuple(sorted(merged, key=ExpansionTerm.sort_key))


# ---------------------------------------------------------------------------
# the expansion proper
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QhjExpansion:
    """Quantum Hamilton-Jacobi split of Re(O psi / psi) for one operator."""

    representation: str
    operator: PolynomialOperator | None
    quantum: tuple[ExpansionTerm, ...]
    classical: tuple[ExpansionTerm, ...]

    @property
    def terms(self) -> tuple[ExpansionTerm, ...]:
        return self.quantum + self.classical

    def to_dict(self) -> dict:
        return {
            "representation": self.representation,
            "quantum": [t.to_dict() for t in self.quantum],
            "classical": [t.to_dict() for t in self.classical],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict, operator: PolynomialOperator | None = None) -> "QhjExpansion":
        return cls(
            d["representation"],
            operator,
            tuple(ExpansionTerm.from_dict(t) for t in d["quantum"]),
            tuple(ExpansionTerm.from_dict(t) for t in d["classical"]),
        )

    def latex(self, part: str = "quantum") -> str:
        terms = {"quantum": self.quantum, "classical": self.classical}[part]
        if not terms:
            return "0"
        out = terms[0].latex()
        for t in terms[1:]:
            out += " " + t.latex(with_sign=True)
        return out


def _partitions(total: int, parts: int, minimum: int = 1):
    """Non-decreasing tuples of `parts` integers >= minimum summing to total."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(minimum, total // parts + 1):
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def _s0_leibniz(m: int, k: int):
    """Yield (n0, s_orders, weight) for [d^m(R S^k)]_{S:0}.

    n0 is the derivative order landing on R; s_orders is the multiset on the
    k identical S factors (every entry >= 1 by the S:0 rule); weight is the
    merged multinomial count m!/(n0! prod(nj!) prod(mult_d!)), already
    collapsed against the 1/k! prefactor.
    """
    fact_m = factorial(m)
    for n0 in range(0, m - k + 1):
        for s_orders in _partitions(m - n0, k, 1):
            denom = factorial(n0)
            for n in s_orders:
                denom *= factorial(n)
            for order in set(s_orders):
                denom *= factorial(s_orders.count(order))
            yield n0, s_orders, Fraction(fact_m, denom)


def expand(op: PolynomialOperator, representation: str) -> QhjExpansion:
    """Split Re(O psi / psi) into quantum and classical term tuples.

    The configuration representation expands a kinetic polynomial T(p_hat);
    the momentum representation expands a potential polynomial V(x_hat).
    Mismatched pairs act multiplicatively (no derivative structure) and are
    rejected.
    """
    if representation not in REPRESENTATIONS:
        raise ValueError(f"unknown representation {representation!r}")
    want = _DERIVATIVE_VARIABLE[representation]
    if op.variable != want:
        raise IncompatibleError(
            f"{representation} representation expands polynomials in {want!r}; "
            f"got an operator in {op.variable!r} (it acts multiplicatively there)"
        )
    quantum: list[ExpansionTerm] = []
    classical: list[ExpansionTerm] = []
    for m, a_m in enumerate(op.coefficients):
        if a_m == 0:
            continue
        rep_sign = (-1) ** m if representation == MOMENTUM else 1
        for k in range(m % 2, m + 1, 2):
            base = a_m * (-1) ** m * (-1) ** ((k + m) // 2) * rep_sign
            hbar_power = m - k
            for n0, s_orders, weight in _s0_leibniz(m, k):
                term = ExpansionTerm(
                    base * weight,
                    hbar_power,
                    (n0,) if n0 else (),
                    s_orders,
                )
                (classical if hbar_power == 0 else quantum).append(term)
    return QhjExpansion(representation, op, _merge(quantum), _merge(classical))


@dataclass(frozen=True)
class LatticePoint:
    """One contributing (k, m) pair of the expansion lattice."""

    k: int
    m: int
    hbar_power: int
    kind: str  # "classical" | "quantum"


def km_lattice(op: PolynomialOperator) -> tuple[LatticePoint, ...]:
    """Enumerate the contributing (k, m) pairs: a_m != 0, k <= m, k + m even."""
    points = []
    for m, a_m in enumerate(op.coefficients):
        if a_m == 0:
            continue
        for k in range(m % 2, m + 1, 2):
            points.append(LatticePoint(k, m, m - k, "classical" if k == m else "quantum"))
    return tuple(sorted(points, key=lambda p: (p.m, p.k)))


# ---------------------------------------------------------------------------
# evaluation and term calculus
# ---------------------------------------------------------------------------


def evaluate_expansion(terms: Sequence[ExpansionTerm], state, points, hbar: float | None = None,
                       guard_nodes: bool = True):
    """Evaluate a term list on a state at the given point(s).

    Returns sum over terms of coeff * hbar^h * prod R^(n)/R * prod S^(n).
    Raises NodePointError when an R-ratio is requested at a node of the state
    (|R| below the node threshold) and guard_nodes is on.

    When the state exposes ratio_basis (R^(n)/R = P_n + Q_n * tau for a single
    transcendental ratio tau), the term sum is collected as a polynomial in
    tau first; diverging near-node contributions then cancel at the
    coefficient level instead of numerically.
    """
    pts = np.asarray(points, dtype=float)
    scalar = pts.ndim == 0
    hb = float(state.units.hbar if hbar is None else hbar)
    needs_r = any(t.r_orders for t in terms)
    if needs_r:
        nodes = state.is_node(pts)
        if guard_nodes and np.any(nodes):
            where = float(pts) if scalar else float(np.asarray(pts)[np.argmax(nodes)])
            raise NodePointError(f"amplitude vanishes at {where!r}; R-ratios undefined", where)
    basis_fn = getattr(state, "ratio_basis", None)
    if needs_r and basis_fn is not None:
        total = _evaluate_with_basis(terms, state, pts, hb, basis_fn)
    else:
        r0 = state.r_derivative(pts, 0) if needs_r else None
        total = np.zeros(pts.shape, dtype=float)
        for t in terms:
            acc = np.full(pts.shape, float(t.coefficient) * hb ** t.hbar_power)
            for n in t.r_orders:
                acc = acc * (np.asarray(state.r_derivative(pts, n), dtype=float) / r0)
            for n in t.s_orders:
                acc = acc * np.asarray(state.s_derivative(pts, n), dtype=float)
            total = total + acc
    return float(total) if scalar else total


def _evaluate_with_basis(terms, state, pts, hb, basis_fn):
    max_order = max((max(t.r_orders) for t in terms if t.r_orders), default=0)
    max_factors = max((len(t.r_orders) for t in terms), default=0)
    tau, basis = basis_fn(pts, max_order)
    tau = np.asarray(tau, dtype=float)
    powers = [np.zeros(pts.shape) for _ in range(max_factors + 1)]
    for t in terms:
        lead = np.full(pts.shape, float(t.coefficient) * hb ** t.hbar_power)
        for n in t.s_orders:
            lead = lead * np.asarray(state.s_derivative(pts, n), dtype=float)
        poly = [lead]
        for n in t.r_orders:
            p_n = np.asarray(basis[n][0], dtype=float)
            q_n = np.asarray(basis[n][1], dtype=float)
            nxt = [poly[0] * p_n]
            for k in range(1, len(poly) + 1):
                hi = poly[k] * p_n if k < len(poly) else 0.0
                nxt.append(hi + poly[k - 1] * q_n)
            poly = nxt
        for k, c in enumerate(poly):
            powers[k] = powers[k] + c
    total = powers[-1]
    for k in range(len(powers) - 2, -1, -1):
        total = total * tau + powers[k]
    return total


def differentiate_terms(terms: Sequence[ExpansionTerm]) -> tuple[ExpansionTerm, ...]:
    """Formal d/dxi of a term list within the same term family.

    Uses d/dxi [R^(n)/R] = R^(n+1)/R - (R'/R)(R^(n)/R) and
    d/dxi [S^(n)] = S^(n+1); the result is merged and canonically ordered.
    """
    out: list[ExpansionTerm] = []
    for t in terms:
        r = list(t.r_orders)
        s = list(t.s_orders)
        for i, n in enumerate(r):
            bumped = r[:i] + [n + 1] + r[i + 1:]
            out.append(ExpansionTerm(t.coefficient, t.hbar_power, tuple(bumped), t.s_orders))
            out.append(ExpansionTerm(-t.coefficient, t.hbar_power, tuple(r + [1]), t.s_orders))
        for i, n in enumerate(s):
            bumped = s[:i] + [n + 1] + s[i + 1:]
            out.append(ExpansionTerm(t.coefficient, t.hbar_power, t.r_orders, tuple(bumped)))
    return _merge(out)
