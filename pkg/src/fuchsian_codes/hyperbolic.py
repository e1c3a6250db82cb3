"""Upper half-plane geometry.

Points are plain Python ``complex`` numbers (or numpy complex arrays for the
vectorised helpers) with positive imaginary part.  Matrices stay exact; their
float projections are only used to move points around.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .errors import DegeneratePoint, EmptyDomain, IdentityMatrix
from .matrices import GroupMatrix

DEFAULT_TOL = 1e-9


class Verdict(enum.IntEnum):
    INTERIOR = 0
    BOUNDARY = 1
    OUTSIDE = 2


@dataclass(frozen=True)
class IsometryCircle:
    center: float
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError("isometry circle radius must be positive")

    def signed_gap(self, z):
        """``|z - center| - radius``; negative inside the circle."""
        return np.abs(z - self.center) - self.radius


@dataclass(frozen=True)
class StripAndCircles:
    """``{1/lam <= |z| <= lam}`` minus the interiors of ``circles``."""

    lam: float
    circles: tuple[IsometryCircle, ...] = ()

    def __post_init__(self) -> None:
        if not self.lam > 1:
            raise ValueError("strip parameter must exceed 1")
        object.__setattr__(self, "circles", tuple(self.circles))

    def boundary_geodesics(self) -> list[tuple[float, float]]:
        """(center, radius) of every geodesic bounding the domain."""
        return [(0.0, self.lam), (0.0, 1.0 / self.lam)] + [(c.center, c.radius) for c in self.circles]


@dataclass(frozen=True, eq=False)
class Dirichlet:
    """``{z : d(z, center) <= d(g z, center) for every g in generators}``."""

    center: complex
    generators: tuple[GroupMatrix, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))

    @cached_property
    def numeric_stack(self) -> np.ndarray:
        return np.stack([g.numeric for g in self.generators]) if self.generators else np.zeros((0, 2, 2))


DomainSpec = Union[StripAndCircles, Dirichlet]


def moebius_numeric(m: np.ndarray, z):
    """Apply a float 2x2 matrix to a point or an array of points."""
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def moebius_apply(g: GroupMatrix, z: complex) -> complex:
    m = g.numeric
    den = m[1, 0] * z + m[1, 1]
    if abs(den) < 1e-300:
        raise DegeneratePoint(f"{z} is mapped to infinity")
    return complex((m[0, 0] * z + m[0, 1]) / den)


def isometry_circle(g: GroupMatrix) -> IsometryCircle:
    if g.is_plus_minus_identity():
        raise IdentityMatrix("the identity has no isometry circle")
    m = g.numeric
    a, c, d = m[0, 0], m[1, 0], m[1, 1]
    if not g.c.is_zero():
        return IsometryCircle(float(-d / c), float(1.0 / abs(c)))
    if not g.b.is_zero():
        raise ValueError("parabolic fixing infinity has no isometry circle")
    # homothety diag(l, 1/l): the circle {|l z| = 1}
    return IsometryCircle(0.0, float(1.0 / abs(a)))


def hyperbolic_distance(z, w):
    z = np.asarray(z)
    w = np.asarray(w)
    arg = 1.0 + np.abs(z - w) ** 2 / (2.0 * z.imag * w.imag)
    out = np.arccosh(np.maximum(arg, 1.0))
    return float(out) if out.ndim == 0 else out


def geodesic_distance(z, center: float, radius: float):
    """Hyperbolic distance from ``z`` to the geodesic ``|w - center| = radius``."""
    z = np.asarray(z)
    return np.arcsinh(np.abs(np.abs(z - center) ** 2 - radius ** 2) / (2.0 * radius * z.imag))


def classify(dom: DomainSpec, z, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Vectorised membership: an int8 array of :class:`Verdict` codes."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if isinstance(dom, StripAndCircles):
        r = np.abs(z)
        lo, hi = 1.0 / dom.lam, dom.lam
        outside = (r < lo - tol) | (r > hi + tol)
        interior = (r >= lo + tol) & (r <= hi - tol)
        for circ in dom.circles:
            gap = circ.signed_gap(z)
            outside |= gap < -tol
            interior &= gap >= tol
    else:
        d0 = hyperbolic_distance(z, dom.center)
        d0 = np.atleast_1d(d0)
        if len(dom.generators) == 0:
            return np.full(z.shape, Verdict.INTERIOR, dtype=np.int8)
        imgs = _apply_stack(dom.numeric_stack, z)
        dg = np.atleast_2d(hyperbolic_distance(imgs, dom.center))
        outside = np.any(dg < d0[:, None] - tol, axis=1)
        interior = np.all(dg >= d0[:, None] + tol, axis=1)
    out = np.full(z.shape, Verdict.BOUNDARY, dtype=np.int8)
    out[interior] = Verdict.INTERIOR
    out[outside] = Verdict.OUTSIDE
    return out


def _apply_stack(stack: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Images of every point under every matrix, shape ``(len(z), len(stack))``."""
    zc = z[:, None]
    return (stack[:, 0, 0] * zc + stack[:, 0, 1]) / (stack[:, 1, 0] * zc + stack[:, 1, 1])


def domain_contains(dom: DomainSpec, z: complex, tol: float = DEFAULT_TOL) -> Verdict:
    return Verdict(int(classify(dom, z, tol)[0]))


def strip_exponent(z: complex, lam: float) -> int:
    """``n`` with ``1/lam <= lam^(2n) |z| <= lam``."""
    r = abs(z)
    if r == 0:
        raise DegeneratePoint("|z| = 0")
    log_lam = math.log(lam)
    n = -round(math.log(r) / (2.0 * log_lam))
    # guard against rounding at the edges of the bracket
    while math.log(r) + 2 * n * log_lam > log_lam + 1e-15:
        n -= 1
    while math.log(r) + 2 * n * log_lam < -log_lam - 1e-15:
        n += 1
    return n


def boundary_depth(dom: StripAndCircles, z) -> np.ndarray:
    """Hyperbolic distance from each point to the nearest bounding geodesic."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return np.min([geodesic_distance(z, c, r) for c, r in dom.boundary_geodesics()], axis=0)


def grid_search(dom: StripAndCircles, objective, grid: int = 41, levels: int = 14,
                tol: float = DEFAULT_TOL) -> complex:
    """Coarse-to-fine minimisation of ``objective`` over interior points.

    Searches in ``(Re z, log Im z)`` coordinates; each level re-centres a grid
    of the same resolution on the best point, shrunk to two cells either side.
    """
    if grid < 3:
        raise ValueError("grid resolution must be at least 3")
    lam = dom.lam
    x_lo, x_hi = -lam, lam
    s_lo, s_hi = math.log(lam * 1e-3), math.log(lam)
    best = None
    best_val = math.inf
    for _ in range(levels):
        xs = np.linspace(x_lo, x_hi, grid)
        ss = np.linspace(s_lo, s_hi, grid)
        X, S = np.meshgrid(xs, ss, indexing="ij")
        Z = (X + 1j * np.exp(S)).ravel()
        inside = classify(dom, Z, tol) == Verdict.INTERIOR
        if not inside.any():
            if best is None:
                raise EmptyDomain("no interior grid point")
            break
        vals = np.where(inside, objective(Z), np.inf)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val = float(vals[k])
            best = complex(Z[k])
        dx = 2 * (x_hi - x_lo) / (grid - 1)
        ds = 2 * (s_hi - s_lo) / (grid - 1)
        bx, bs = best.real, math.log(best.imag)
        x_lo, x_hi = bx - dx, bx + dx
        s_lo, s_hi = bs - ds, bs + ds
    return best


def deepest_point(dom: DomainSpec, grid: int = 41) -> complex:
    """Interior point maximising the hyperbolic distance to the boundary."""
    if not isinstance(dom, StripAndCircles):
        raise TypeError("deepest_point needs a strip-and-circles domain")
    return grid_search(dom, lambda z: -boundary_depth(dom, z), grid)


def circles_from_generators(generators: Sequence[GroupMatrix]) -> tuple[IsometryCircle, ...]:
    return tuple(isometry_circle(g) for g in generators)
