"""Differential operators with polynomial coefficients and their algebra.

An operator A acts on test functions as
    (A f)(x) = sum_m p_m(x) f^(m)(x),
with each p_m an exact rational polynomial. Besides application and exact
expectations for W = P(Z), this module provides translation, normalization
and proportionality comparison, and the moment recursion obtained by
feeding monomials into E[(A f)(W)] = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .gaussian import pushforward_moment
from .poly import Polynomial, RationalLike, rational


@dataclass(frozen=True)
class DiffOperator:
    """Coefficient polynomials indexed by derivative order, trimmed at the top.

    The empty tuple is the zero operator (order -1); any other value has a
    nonzero highest-order coefficient.
    """

    coefficients: tuple[Polynomial, ...]

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        while coeffs and coeffs[-1].is_zero:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RationalLike]]) -> "DiffOperator":
        return cls(tuple(Polynomial(row) for row in rows))

    @classmethod
    def single(cls, order: int, coefficient: Polynomial) -> "DiffOperator":
        return cls((Polynomial.zero(),) * order + (coefficient,))

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    def coefficient(self, m: int) -> Polynomial:
        if 0 <= m < len(self.coefficients):
            return self.coefficients[m]
        return Polynomial.zero()

    def apply(self, f: Polynomial) -> Polynomial:
        """(A f)(x) = sum_m p_m(x) f^(m)(x), exactly."""
        out = Polynomial.zero()
        for m, pm in enumerate(self.coefficients):
            if pm.is_zero:
                continue
            fm = f.derivative(m)
            if not fm.is_zero:
                out = out + pm * fm
        return out

    def scaled(self, c: RationalLike) -> "DiffOperator":
        c = rational(c)
        return DiffOperator(tuple(p * c for p in self.coefficients))

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        n = max(len(self.coefficients), len(other.coefficients))
        return DiffOperator(tuple(self.coefficient(m) + other.coefficient(m)
                                  for m in range(n)))

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + other.scaled(-1)

    def compose_derivative(self, k: int = 1) -> "DiffOperator":
        """The operator f -> A(f^(k)): coefficients shift up by k orders."""
        if k < 0:
            raise ValueError("k must be nonnegative")
        return DiffOperator((Polynomial.zero(),) * k + self.coefficients)

    def to_dict(self) -> dict:
        return {"order": self.order,
                "coefficients": [p.to_strings() for p in self.coefficients]}

    @classmethod
    def from_dict(cls, data: dict) -> "DiffOperator":
        return cls(tuple(Polynomial.from_strings(row)
                         for row in data["coefficients"]))

    def latex(self) -> str:
        """Highest derivative first, in the style 'p_M(x)f^{(M)}(x) + ...'."""
        if self.is_zero:
            return "0"
        parts: list[str] = []
        for m in range(self.order, -1, -1):
            pm = self.coefficients[m]
            if pm.is_zero:
                continue
            fpart = "f(x)" if m == 0 else ("f'(x)" if m == 1 else
                                           ("f''(x)" if m == 2 else f"f^{{({m})}}(x)"))
            body, sign = _latex_coefficient(pm)
            parts.append((sign, body + fpart))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += sign + body
        return text

    def __str__(self) -> str:
        return self.latex()


def _latex_coefficient(p: Polynomial) -> tuple[str, str]:
    """Render a coefficient polynomial for the emitter; returns (body, sign)."""
    if p.degree == 0 or (p.degree >= 1 and sum(1 for c in p.coeffs if c != 0) == 1):
        # monomial: inline it
        d = p.degree
        c = p.coeffs[d]
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        xs = "" if d == 0 else ("x" if d == 1 else f"x^{{{d}}}")
        if mag == 1:
            return xs, sign  # unit constants render as the bare f-part
        return f"{mag}{xs}", sign
    # general polynomial: parenthesized, descending powers
    terms = []
    for d in range(p.degree, -1, -1):
        c = p.coeffs[d]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        xs = "" if d == 0 else ("x" if d == 1 else f"x^{{{d}}}")
        body = xs if (mag == 1 and d > 0) else f"{mag}{xs}"
        terms.append((sign, body))
    inner = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        inner += sign + body
    return f"({inner})", "+"


def apply_to_polynomial(op: DiffOperator, f: Polynomial) -> Polynomial:
    return op.apply(f)


def expectation_applied(op: DiffOperator, P: Polynomial, f: Polynomial) -> Fraction:
    """Exact E[(A f)(W)] for W = P(Z), via pushforward moments."""
    g = op.apply(f)
    return sum((c * pushforward_moment(P, d) for d, c in enumerate(g.coeffs)),
               Fraction(0))


def translate_operator(op: DiffOperator, c: RationalLike) -> DiffOperator:
    """Replace each p_m(x) by p_m(x - c); annihilation moves from W to W + c."""
    c = rational(c)
    shift = Polynomial((-c, 1))
    return DiffOperator(tuple(p.compose(shift) for p in op.coefficients))


def normalize_operator(op: DiffOperator) -> DiffOperator:
    """Primitive integer coefficients with a fixed sign convention:
    the order-0 coefficient gets a negative leading coefficient, or, when it
    is zero, the first nonzero coefficient gets a positive one."""
    if op.is_zero:
        raise ValueError("zero operator cannot be normalized")
    denom_lcm = 1
    num_gcd = 0
    for p in op.coefficients:
        for v in p.coeffs:
            if v != 0:
                denom_lcm = denom_lcm * v.denominator // math.gcd(denom_lcm, v.denominator)
                num_gcd = math.gcd(num_gcd, abs(v.numerator))
    out = op.scaled(Fraction(denom_lcm, num_gcd))
    p0 = out.coefficients[0]
    if not p0.is_zero:
        flip = p0.leading_coefficient > 0
    else:
        first = next(p for p in out.coefficients if not p.is_zero)
        flip = first.leading_coefficient < 0
    return out.scaled(-1) if flip else out


def proportional_eq(op1: DiffOperator, op2: DiffOperator
                    ) -> tuple[bool, Optional[Fraction]]:
    """Whether op1 = r * op2 for a nonzero rational r; returns (equal, r)."""
    if op1.is_zero or op2.is_zero:
        raise ValueError("proportionality is defined for nonzero operators")
    if op1.order != op2.order:
        return False, None
    top1 = op1.coefficients[-1]
    top2 = op2.coefficients[-1]
    if top1.degree != top2.degree:
        return False, None
    ratio = top1.leading_coefficient / top2.leading_coefficient
    if all(p1 == p2 * ratio for p1, p2 in zip(op1.coefficients, op2.coefficients)):
        return True, ratio
    return False, None


class RecursionNotClosed(ValueError):
    """The monomial relations have no unique highest-degree moment term."""


class InsufficientSeeds(ValueError):
    pass


def moment_recursion(op: DiffOperator, seed_moments: Sequence[RationalLike],
                     n: int) -> list[Fraction]:
    """Moments mu_0..mu_n of any W with E[(A f)(W)] = 0 for all polynomials f.

    Feeding f = x^k turns the expectation into a linear relation among
    moments; the order-0 coefficient must contribute a strictly dominant
    top-degree term so each relation determines exactly one new moment.
    """
    if op.is_zero:
        raise RecursionNotClosed("zero operator yields no relations")
    p0 = op.coefficients[0]
    if p0.is_zero:
        raise RecursionNotClosed("order-0 coefficient is zero")
    d0 = p0.degree
    top = p0.coeffs[d0]
    for m, pm in enumerate(op.coefficients):
        if m == 0:
            continue
        for d, q in enumerate(pm.coeffs):
            if q != 0 and d - m >= d0:
                raise RecursionNotClosed(
                    f"coefficient at order {m}, degree {d} reaches the top term")
    seeds = [rational(s) for s in seed_moments]
    if len(seeds) < d0:
        raise InsufficientSeeds(f"need at least {d0} seed moments")
    mus: list[Fraction] = list(seeds)
    k = 0
    while True:
        t = k + d0
        if t > n:
            break
        total = Fraction(0)
        for m, pm in enumerate(op.coefficients):
            if m > k:
                continue
            fall = Fraction(math.prod(range(k - m + 1, k + 1)))
            for d, q in enumerate(pm.coeffs):
                if q == 0 or (m == 0 and d == d0):
                    continue
                idx = d + k - m
                if idx >= len(mus):
                    raise InsufficientSeeds(
                        f"moment {idx} needed before it is determined")
                total += q * fall * mus[idx]
        value = -total / top
        if t < len(mus):
            if mus[t] != value:
                raise ValueError(
                    f"seed moment {t} contradicts the operator relations")
        else:
            mus.append(value)
        k += 1
    return mus[: n + 1]
