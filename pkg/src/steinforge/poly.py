"""Exact rational scalars and dense univariate polynomials.

Everything downstream (identity generation, elimination, certificates)
relies on these values being exact, so coefficients are `fractions.Fraction`
throughout and every operation returns a trimmed canonical form.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction

RationalLike = Union[int, float, str, Fraction]


def rational(value: RationalLike) -> Fraction:
    """Coerce ints, "p/q" strings, floats or Fractions to an exact rational.

    Floats convert via their exact binary value, so only pass them for
    quantities that are themselves float-typed (e.g. distribution params).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str, float)):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def format_rational(q: Fraction) -> str:
    """Render as "p/q", or "p" when the denominator is 1."""
    return str(q)


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


class Polynomial:
    """Dense univariate polynomial over the rationals.

    Coefficients are stored lowest degree first; the zero polynomial is the
    empty tuple and any other value has a nonzero top coefficient.
    Instances are immutable and hashable.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "_coeffs", tuple(cs))

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(())

    @classmethod
    def constant(cls, c: RationalLike) -> "Polynomial":
        return cls((c,))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls((0, 1))

    @classmethod
    def monomial(cls, degree: int, coeff: RationalLike = 1) -> "Polynomial":
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        return cls((0,) * degree + (coeff,))

    # -- basic structure -------------------------------------------------------

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def leading_coefficient(self) -> Fraction:
        if not self._coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self._coeffs[-1]

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._coeffs, other._coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self._coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if self.is_zero or other.is_zero:
                return Polynomial.zero()
            out = [Fraction(0)] * (len(self._coeffs) + len(other._coeffs) - 1)
            for i, a in enumerate(self._coeffs):
                if a == 0:
                    continue
                for j, b in enumerate(other._coeffs):
                    out[i + j] += a * b
            return Polynomial(out)
        if isinstance(other, (int, Fraction)):
            return Polynomial(tuple(c * other for c in self._coeffs))
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Exact euclidean division; other must be nonzero."""
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self._coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other._coeffs) + 1, 0)
        d = other.degree
        lead = other.leading_coefficient
        while len(rem) - 1 >= d and rem:
            shift = len(rem) - 1 - d
            factor = rem[-1] / lead
            q[shift] = factor
            for i, c in enumerate(other._coeffs):
                rem[shift + i] -= factor * c
            while rem and rem[-1] == 0:
                rem.pop()
        return Polynomial(q), Polynomial(rem)

    def divides(self, other: "Polynomial") -> bool:
        """True when self divides other exactly (zero divides only zero)."""
        if self.is_zero:
            return other.is_zero
        _, rem = divmod(other, self)
        return rem.is_zero

    def derivative(self, order: int = 1) -> "Polynomial":
        """Exact order-th derivative; zero when order exceeds the degree."""
        if order < 0:
            raise ValueError("order must be nonnegative")
        cs = self._coeffs
        for _ in range(order):
            if len(cs) <= 1:
                return Polynomial.zero()
            cs = tuple(cs[i] * i for i in range(1, len(cs)))
        return Polynomial(cs)

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """Exact composition self(inner(x)) via Horner over the outer coefficients."""
        result = Polynomial.zero()
        for c in reversed(self._coeffs):
            result = result * inner + Polynomial.constant(c)
        return result

    def __call__(self, x: RationalLike) -> Fraction:
        """Exact Horner evaluation."""
        x = rational(x)
        acc = Fraction(0)
        for c in reversed(self._coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x):
        """Round-to-nearest Horner evaluation; accepts floats or numpy arrays."""
        acc = 0.0 * x
        for c in reversed(self._coeffs):
            acc = acc * x + float(c)
        return acc

    # -- serialization ---------------------------------------------------------

    def to_strings(self) -> list[str]:
        """JSON form: array of "p/q" strings, lowest degree first."""
        return [format_rational(c) for c in self._coeffs]

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "Polynomial":
        return cls(Fraction(s) for s in items)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts: list[str] = []
        for d in range(self.degree, -1, -1):
            c = self._coeffs[d]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if d == 0:
                body = str(mag)
            else:
                xs = "x" if d == 1 else f"x^{d}"
                body = xs if mag == 1 else f"{mag}{xs}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Polynomial({self!s})"
