"""Determinant-one 2x2 matrices over Q(sqrt2, sqrt3)."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exactfield import ONE, ZERO, TowerElement


@dataclass(frozen=True, eq=False)
class GroupMatrix:
    """Exact matrix ``((a, b), (c, d))``.

    ``det`` is not enforced at construction so callers can build a candidate and
    check it; everything produced by this package has ``det == 1``.
    """

    a: TowerElement
    b: TowerElement
    c: TowerElement
    d: TowerElement

    @classmethod
    def of(cls, a, b, c, d) -> "GroupMatrix":
        return cls(*(x if isinstance(x, TowerElement) else TowerElement(x) for x in (a, b, c, d)))

    @classmethod
    def identity(cls) -> "GroupMatrix":
        return cls(ONE, ZERO, ZERO, ONE)

    @classmethod
    def diagonal(cls, x: TowerElement) -> "GroupMatrix":
        return cls(x, ZERO, ZERO, x.inverse())

    @cached_property
    def det(self) -> TowerElement:
        return self.a * self.d - self.b * self.c

    @cached_property
    def numeric(self) -> np.ndarray:
        return np.array([[float(self.a), float(self.b)], [float(self.c), float(self.d)]])

    def entries(self) -> tuple[TowerElement, TowerElement, TowerElement, TowerElement]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "GroupMatrix") -> "GroupMatrix":
        return GroupMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "GroupMatrix":
        return GroupMatrix(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "GroupMatrix":
        if self.det == ONE:
            return GroupMatrix(self.d, -self.b, -self.c, self.a)
        k = self.det.inverse()
        return GroupMatrix(self.d * k, -self.b * k, -self.c * k, self.a * k)

    def __pow__(self, n: int) -> "GroupMatrix":
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = GroupMatrix.identity()
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def conjugate_by_scale(self, s: TowerElement) -> "GroupMatrix":
        """``D g D^-1`` for ``D = diag(m, 1/m)`` with ``m^2 = s``."""
        return GroupMatrix(self.a, self.b * s, self.c * s.inverse(), self.d)

    def trace(self) -> TowerElement:
        return self.a + self.d

    def is_identity(self) -> bool:
        return self == GroupMatrix.identity()

    def is_plus_minus_identity(self) -> bool:
        return self.is_identity() or (-self).is_identity()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupMatrix):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self) -> int:
        return hash(self.entries())

    def __repr__(self) -> str:
        return f"GroupMatrix(({self.a}, {self.b}), ({self.c}, {self.d}))"
