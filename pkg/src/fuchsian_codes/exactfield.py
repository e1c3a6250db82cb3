"""Exact arithmetic in real quadratic fields and in the biquadratic field Q(sqrt2, sqrt3).

Coefficients are :class:`fractions.Fraction` throughout.  Floating point only
appears in the ``__float__`` projections, which avoid cancellation by
rationalising against the Galois conjugate whenever the two parts of an element
have opposite signs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import NotAUnitMultiple, PellBoundExceeded

Rational = Fraction
Number = Union[int, Fraction]


def _frac(v: Number) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _sign(v: Fraction) -> int:
    return (v > 0) - (v < 0)


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def _quad_sign(p: Fraction, q: Fraction, d: int) -> int:
    """Exact sign of p + q*sqrt(d)."""
    sp, sq = _sign(p), _sign(q)
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    # opposite signs: compare p^2 with d q^2
    return sp * _sign(p * p - d * q * q)


def _quad_float(p: Fraction, q: Fraction, d: int) -> float:
    if p == 0 or q == 0 or (p > 0) == (q > 0):
        return float(p) + float(q) * math.sqrt(d)
    n = p * p - d * q * q
    # p - q sqrt(d) has same-signed parts, so no cancellation
    return float(n) / (float(p) - float(q) * math.sqrt(d))


@dataclass(frozen=True)
class QuadElement:
    """The number ``p + q*sqrt(d)`` with ``d`` square-free and at least 2."""

    d: int
    p: Fraction
    q: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", _frac(self.p))
        object.__setattr__(self, "q", _frac(self.q))

    @classmethod
    def rational(cls, d: int, value: Number) -> "QuadElement":
        return cls(d, _frac(value), Fraction(0))

    def _coerce(self, other) -> "QuadElement":
        if isinstance(other, QuadElement):
            if other.d != self.d:
                raise ValueError(f"mixing Q(sqrt{self.d}) and Q(sqrt{other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElement(self.d, _frac(other), Fraction(0))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElement(self.d, self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __neg__(self) -> "QuadElement":
        return QuadElement(self.d, -self.p, -self.q)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElement(self.d, self.p - o.p, self.q - o.q)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElement(
            self.d,
            self.p * o.p + self.d * self.q * o.q,
            self.p * o.q + self.q * o.p,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadElement":
        return QuadElement(self.d, self.p, -self.q)

    def norm(self) -> Fraction:
        return self.p * self.p - self.d * self.q * self.q

    def inverse(self) -> "QuadElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadElement(self.d, self.p / n, -self.q / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, m: int) -> "QuadElement":
        return unit_power(self, m) if m < 0 else _binpow(self, m)

    def is_rational(self) -> bool:
        return self.q == 0

    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    def sign(self) -> int:
        return _quad_sign(self.p, self.q, self.d)

    def __float__(self) -> float:
        return _quad_float(self.p, self.q, self.d)

    def __str__(self) -> str:
        return f"{self.p}{'+' if self.q >= 0 else '-'}{abs(self.q)}*sqrt{self.d}"


def _binpow(x: QuadElement, m: int) -> QuadElement:
    result = QuadElement.rational(x.d, 1)
    base = x
    while m:
        if m & 1:
            result = result * base
        base = base * base
        m >>= 1
    return result


def galois_conjugate(x: QuadElement) -> QuadElement:
    return x.conjugate()


def pell_fundamental_unit(d: int, max_bits: int = 4096) -> QuadElement:
    """Smallest ``a + b*sqrt(d)`` with ``a, b > 0`` and ``a^2 - d b^2 = 1``.

    Walks the continued fraction of ``sqrt(d)``; a norm -1 convergent is squared.
    """
    if d < 2 or not is_squarefree(d):
        raise ValueError(f"d must be square-free and >= 2, got {d}")
    a0 = math.isqrt(d)
    m, den, a = 0, 1, a0
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    while True:
        n = h * h - d * k * k
        if n == 1:
            return QuadElement(d, Fraction(h), Fraction(k))
        if n == -1:
            return QuadElement(d, Fraction(h * h + d * k * k), Fraction(2 * h * k))
        m = den * a - m
        den = (d - m * m) // den
        a = (a0 + m) // den
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        if h.bit_length() > max_bits:
            raise PellBoundExceeded(f"convergents for d={d} exceed {max_bits} bits")


def unit_power(eps: QuadElement, m: int) -> QuadElement:
    """``eps**m`` for a norm-one ``eps``; negative powers go through the conjugate."""
    if m < 0:
        if eps.norm() != 1:
            raise ValueError("negative powers need a norm-one unit")
        return _binpow(eps.conjugate(), -m)
    return _binpow(eps, m)


def unit_log(x: QuadElement, eps: QuadElement, bound: int = 10_000) -> int:
    """Return ``k`` with ``x * eps**(-k)`` rational.

    Each multiplication by ``eps**(-1)`` shrinks ``|log|x/x'||`` by ``2 log eps``;
    the walk stops at the first rational residual or when it would start growing.
    """
    if x.is_zero():
        raise NotAUnitMultiple("zero is not a unit multiple")
    eps_inv = eps.conjugate() if eps.norm() == 1 else eps.inverse()
    k = 0
    cur = x
    while not cur.is_rational():
        r = _log_ratio(cur)
        step, nxt = (1, cur * eps_inv) if r > 0 else (-1, cur * eps)
        if abs(_log_ratio(nxt)) >= abs(r) and not nxt.is_rational():
            raise NotAUnitMultiple(f"{x} is not a rational multiple of a power of {eps}")
        cur = nxt
        k += step
        if abs(k) > bound:
            raise NotAUnitMultiple(f"no exponent within {bound}")
    return k


def _log_abs_fraction(v: Fraction) -> float:
    return math.log(abs(v.numerator)) - math.log(v.denominator)


def _log_abs(x: QuadElement) -> float:
    """log|p + q sqrt(d)| without converting large coefficients to float."""
    p, q = x.p, x.q
    if q == 0:
        return _log_abs_fraction(p)
    lq = _log_abs_fraction(q) + 0.5 * math.log(x.d)
    if p == 0:
        return lq
    if (p > 0) == (q > 0):
        return float(np.logaddexp(_log_abs_fraction(p), lq))
    return _log_abs_fraction(x.norm()) - _log_abs(x.conjugate())


def _log_ratio(x: QuadElement) -> float:
    """log|x / x'|."""
    return _log_abs(x) - _log_abs(x.conjugate())


# ---------------------------------------------------------------------------
# Q(sqrt2, sqrt3)


@dataclass(frozen=True)
class TowerElement:
    """``c1 + c2*sqrt2 + c3*sqrt3 + c6*sqrt6`` with rational coefficients."""

    c1: Fraction = Fraction(0)
    c2: Fraction = Fraction(0)
    c3: Fraction = Fraction(0)
    c6: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        for name in ("c1", "c2", "c3", "c6"):
            object.__setattr__(self, name, _frac(getattr(self, name)))

    @classmethod
    def from_quad(cls, x: QuadElement) -> "TowerElement":
        if x.d == 2:
            return cls(x.p, x.q, 0, 0)
        if x.d == 3:
            return cls(x.p, 0, x.q, 0)
        if x.d == 6:
            return cls(x.p, 0, 0, x.q)
        raise ValueError(f"Q(sqrt{x.d}) does not embed in Q(sqrt2, sqrt3)")

    @classmethod
    def parse(cls, text: str) -> "TowerElement":
        """Parse four whitespace-separated rationals, e.g. ``'0 1/2 0 1/2'``."""
        parts = text.split()
        if len(parts) != 4:
            raise ValueError(f"expected 4 coefficients, got {text!r}")
        return cls(*(Fraction(p) for p in parts))

    def coefficients(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.c1, self.c2, self.c3, self.c6)

    def _coerce(self, other):
        if isinstance(other, TowerElement):
            return other
        if isinstance(other, (int, Fraction)):
            return TowerElement(_frac(other))
        if isinstance(other, QuadElement):
            return TowerElement.from_quad(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return TowerElement(self.c1 + o.c1, self.c2 + o.c2, self.c3 + o.c3, self.c6 + o.c6)

    __radd__ = __add__

    def __neg__(self) -> "TowerElement":
        return TowerElement(-self.c1, -self.c2, -self.c3, -self.c6)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a1, a2, a3, a6 = self.coefficients()
        b1, b2, b3, b6 = o.coefficients()
        # sqrt2*sqrt3 = sqrt6, sqrt2*sqrt6 = 2 sqrt3, sqrt3*sqrt6 = 3 sqrt2
        return TowerElement(
            a1 * b1 + 2 * a2 * b2 + 3 * a3 * b3 + 6 * a6 * b6,
            a1 * b2 + a2 * b1 + 3 * (a3 * b6 + a6 * b3),
            a1 * b3 + a3 * b1 + 2 * (a2 * b6 + a6 * b2),
            a1 * b6 + a6 * b1 + a2 * b3 + a3 * b2,
        )

    __rmul__ = __mul__

    def sigma2(self) -> "TowerElement":
        """Automorphism sqrt2 -> -sqrt2 (so sqrt6 -> -sqrt6)."""
        return TowerElement(self.c1, -self.c2, self.c3, -self.c6)

    def _split(self) -> tuple[QuadElement, QuadElement]:
        # self = A + B*sqrt2 with A, B in Q(sqrt3)
        return QuadElement(3, self.c1, self.c3), QuadElement(3, self.c2, self.c6)

    def inverse(self) -> "TowerElement":
        a, b = self._split()
        n = a * a - 2 * b * b  # = self * sigma2(self), lies in Q(sqrt3)
        if n.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self.sigma2() * TowerElement.from_quad(n.inverse())

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __pow__(self, m: int) -> "TowerElement":
        base = self if m >= 0 else self.inverse()
        m = abs(m)
        result = TowerElement(1)
        while m:
            if m & 1:
                result = result * base
            base = base * base
            m >>= 1
        return result

    def is_zero(self) -> bool:
        return not (self.c1 or self.c2 or self.c3 or self.c6)

    def in_sqrt3_field(self) -> bool:
        return self.c2 == 0 and self.c6 == 0

    def as_quad3(self) -> QuadElement:
        if not self.in_sqrt3_field():
            raise ValueError(f"{self} is not in Q(sqrt3)")
        return QuadElement(3, self.c1, self.c3)

    def sign(self) -> int:
        a, b = self._split()
        sa, sb = a.sign(), b.sign()
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        return sa * (a * a - 2 * b * b).sign()

    def __float__(self) -> float:
        a, b = self._split()
        fa, fb = float(a), float(b)
        if fa == 0.0 or fb == 0.0 or (fa > 0) == (fb > 0):
            return fa + fb * math.sqrt(2)
        n = a * a - 2 * b * b
        return float(n) / (fa - fb * math.sqrt(2))

    def __str__(self) -> str:
        terms = []
        for c, r in zip(self.coefficients(), ("", "*sqrt2", "*sqrt3", "*sqrt6")):
            if c:
                terms.append(f"{c}{r}")
        return " + ".join(terms) if terms else "0"


SQRT2 = TowerElement(0, 1, 0, 0)
SQRT3 = TowerElement(0, 0, 1, 0)
SQRT6 = TowerElement(0, 0, 0, 1)
ONE = TowerElement(1)
ZERO = TowerElement()
