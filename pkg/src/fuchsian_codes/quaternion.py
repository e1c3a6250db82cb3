"""Quaternion algebras (a, b / Q) and their matrix embedding."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import NormMismatch, UnsupportedField
from .exactfield import QuadElement, TowerElement, pell_fundamental_unit
from .matrices import GroupMatrix


@dataclass(frozen=True)
class AlgebraParams:
    a: int = 3
    b: int = -1
    discriminant_label: Optional[int] = 6

    def __post_init__(self) -> None:
        if self.a == 0 or self.b == 0:
            raise ValueError("quaternion algebra parameters must be nonzero")


DEFAULT_ALGEBRA = AlgebraParams()


@dataclass(frozen=True)
class Quaternion:
    """``x + y I + z J + t K`` with ``I^2 = a``, ``J^2 = b``, ``K = IJ = -JI``."""

    x: Fraction
    y: Fraction = Fraction(0)
    z: Fraction = Fraction(0)
    t: Fraction = Fraction(0)
    algebra: AlgebraParams = DEFAULT_ALGEBRA

    def __post_init__(self) -> None:
        for name in ("x", "y", "z", "t"):
            v = getattr(self, name)
            if not isinstance(v, Fraction):
                object.__setattr__(self, name, Fraction(v))

    @classmethod
    def from_tuple(cls, coords, algebra: AlgebraParams = DEFAULT_ALGEBRA) -> "Quaternion":
        x, y, z, t = coords
        return cls(x, y, z, t, algebra)

    def coords(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.x, self.y, self.z, self.t)

    def _check(self, other: "Quaternion") -> None:
        if other.algebra != self.algebra:
            raise ValueError("quaternions from different algebras")

    def __add__(self, other: "Quaternion") -> "Quaternion":
        self._check(other)
        return Quaternion(self.x + other.x, self.y + other.y, self.z + other.z,
                          self.t + other.t, self.algebra)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return self + (-other)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.x, -self.y, -self.z, -self.t, self.algebra)

    def scale(self, r) -> "Quaternion":
        return Quaternion(r * self.x, r * self.y, r * self.z, r * self.t, self.algebra)

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        self._check(other)
        a, b = self.algebra.a, self.algebra.b
        x1, y1, z1, t1 = self.coords()
        x2, y2, z2, t2 = other.coords()
        return Quaternion(
            x1 * x2 + a * y1 * y2 + b * z1 * z2 - a * b * t1 * t2,
            x1 * y2 + y1 * x2 - b * z1 * t2 + b * t1 * z2,
            x1 * z2 + z1 * x2 + a * y1 * t2 - a * t1 * y2,
            x1 * t2 + t1 * x2 + y1 * z2 - z1 * y2,
            self.algebra,
        )

    def __pow__(self, m: int) -> "Quaternion":
        if m < 0:
            raise ValueError("only non-negative powers")
        result = Quaternion(1, 0, 0, 0, self.algebra)
        base = self
        while m:
            if m & 1:
                result = result * base
            base = base * base
            m >>= 1
        return result

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.x, -self.y, -self.z, -self.t, self.algebra)

    def is_pure(self) -> bool:
        return self.x == 0


def reduced_norm(q: Quaternion) -> Fraction:
    a, b = q.algebra.a, q.algebra.b
    return q.x ** 2 - a * q.y ** 2 - b * q.z ** 2 + a * b * q.t ** 2


def reduced_trace(q: Quaternion) -> Fraction:
    return 2 * q.x


def _sqrt_in_tower(a: int) -> TowerElement:
    if a not in (2, 3, 6):
        raise UnsupportedField(f"sqrt({a}) is not in Q(sqrt2, sqrt3)")
    return TowerElement.from_quad(QuadElement(a, 0, 1))


def embed_phi(q: Quaternion) -> GroupMatrix:
    """``((x + y r, z + t r), (b (z - t r), x - y r))`` with ``r = sqrt(a)``."""
    r = _sqrt_in_tower(q.algebra.a)
    b = q.algebra.b
    return GroupMatrix(
        q.x + q.y * r,
        q.z + q.t * r,
        (q.z - q.t * r) * b,
        q.x - q.y * r,
    )


def pure_quaternion_solutions(d: int, box: int) -> list[tuple[int, int, int]]:
    """Integer ``(x, y, z)`` with ``3x^2 - y^2 + 3z^2 = d`` inside ``[-box, box]^3``.

    Exhaustive enumeration; lexicographic order fixes the numbering of solutions.
    """
    rng = range(-box, box + 1)
    return [(x, y, z) for x, y, z in itertools.product(rng, rng, rng)
            if 3 * x * x - y * y + 3 * z * z == d]


def pure_quaternion(sol: tuple[int, int, int], algebra: AlgebraParams = DEFAULT_ALGEBRA) -> Quaternion:
    x, y, z = sol
    return Quaternion(0, x, y, z, algebra)


def psi_d(d: int, omega: Quaternion, m: int) -> Quaternion:
    """``(a_d + b_d omega)^m`` where ``a_d + b_d sqrt(d)`` is the fundamental unit.

    ``omega`` squares to ``d``, so this is the image of ``eps^m`` under the
    embedding ``sqrt(d) -> omega``; its reduced norm is 1.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if not omega.is_pure() or reduced_norm(omega) != -d:
        raise NormMismatch(f"omega must be pure with reduced norm {-d}")
    eps = pell_fundamental_unit(d)
    base = Quaternion(eps.p, 0, 0, 0, omega.algebra) + omega.scale(eps.q)
    return base ** m
