"""Group presets and point reduction.

Two reduction strategies are provided:

* strip-and-circles reduction for groups generated by a homothety ``alpha`` and
  side pairings whose isometry circles cut out the domain (the ``e2d1D6ii``
  preset);
* greedy Dirichlet descent for any finite generating set closed under
  inversion (the ``gamma61`` preset, generated by small norm-one units).

Both are implemented once as vectorised numpy kernels that move float points
and record the generator letters they apply.  The exact reducer is rebuilt
from the recorded word, so the float path never leaks into the exact result.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    MaxStepsExceeded,
    PresetError,
    SignUndecidable,
    UnknownGenerator,
)
from .exactfield import ONE, TowerElement
from .hyperbolic import (
    DEFAULT_TOL,
    Dirichlet,
    DomainSpec,
    StripAndCircles,
    Verdict,
    classify,
    hyperbolic_distance,
    isometry_circle,
    moebius_apply,
)
from .matrices import GroupMatrix
from .quaternion import DEFAULT_ALGEBRA, Quaternion, embed_phi

Letter = tuple[str, int]
Word = list[Letter]

DEFAULT_MAX_STEPS = 256

# kernel status codes
OK, TOO_MANY_STEPS, DEGENERATE = 0, 1, 2


@dataclass(frozen=True, eq=False)
class GroupPreset:
    """A Fuchsian group with a fundamental domain and a reduction strategy.

    ``letters`` lists the moves the reduction may make.  For strip presets
    ``letters[0]`` is the homothety (its exponent is chosen per step) and
    ``letters[i]`` for ``i >= 1`` is applied to points inside
    ``domain.circles[i - 1]``.  For Dirichlet presets ``letters[i]`` is the
    element ``domain.generators[i]``.

    Codebook matrices are built in the quaternion frame and moved into the
    preset frame by ``conjugate_by_scale(frame_scale)``.
    """

    name: str
    generators: Mapping[str, GroupMatrix]
    domain: DomainSpec
    base_point_default: complex
    letters: tuple[Letter, ...]
    frame_scale: TowerElement = ONE

    @property
    def is_strip(self) -> bool:
        return isinstance(self.domain, StripAndCircles)

    @cached_property
    def letter_matrices(self) -> tuple[GroupMatrix, ...]:
        return tuple(self.generators[n] ** e for n, e in self.letters)

    @cached_property
    def homothety_factor(self) -> float:
        """Numeric factor ``h`` of ``alpha = diag(h, 1/h)``; alpha scales by ``h^2``."""
        return abs(float(self.letter_matrices[0].a))

    @cached_property
    def _prefix_cache(self) -> dict:
        return {}

    def to_frame(self, g: GroupMatrix) -> GroupMatrix:
        return g if self.frame_scale == ONE else g.conjugate_by_scale(self.frame_scale)

    def from_frame(self, g: GroupMatrix) -> GroupMatrix:
        return g if self.frame_scale == ONE else g.conjugate_by_scale(self.frame_scale.inverse())


@dataclass(frozen=True)
class ReductionResult:
    word: Word
    matrix: GroupMatrix
    reduced_point: complex
    steps: int


# ---------------------------------------------------------------------------
# exact helpers


def sign_normalize(g: GroupMatrix) -> tuple[GroupMatrix, int]:
    """Choose the sign of ``g`` that makes its first-column sum positive."""
    s = float(g.a + g.c)
    if abs(s) < 1e-12:
        raise SignUndecidable(f"first column of {g} sums to zero")
    return (g, 1) if s > 0 else (-g, -1)


_PREFIX_CACHE_LIMIT = 1 << 16
_PREFIX_CACHE_MAX_LEN = 8


def word_to_matrix(word: Sequence[Letter], preset: Union[GroupPreset, Mapping[str, GroupMatrix]]) -> GroupMatrix:
    """Exact product of the letters, left to right.

    For presets, products of short prefixes are memoised, since decoders and
    word enumerations keep rebuilding the same prefixes.
    """
    if not isinstance(preset, GroupPreset):
        return _word_product(tuple(word), preset)
    key = tuple((n, int(e)) for n, e in word)
    cache = preset._prefix_cache
    if key in cache:
        return cache[key]
    if not key:
        return GroupMatrix.identity()
    result = word_to_matrix(key[:-1], preset) @ _word_product(key[-1:], preset.generators)
    if len(key) <= _PREFIX_CACHE_MAX_LEN and len(cache) < _PREFIX_CACHE_LIMIT:
        cache[key] = result
    return result


def _word_product(word: Sequence[Letter], gens: Mapping[str, GroupMatrix]) -> GroupMatrix:
    result = GroupMatrix.identity()
    for name, exp in word:
        try:
            g = gens[name]
        except KeyError:
            raise UnknownGenerator(name) from None
        result = result @ (g ** exp)
    return result


def norm_one_tuples(box: int) -> list[tuple[int, int, int, int]]:
    """Integer solutions of ``x^2 - 3y^2 + z^2 - 3t^2 = 1`` in ``[-box, box]^4``."""
    if box < 1:
        raise ValueError("box must be at least 1")
    rng = range(-box, box + 1)
    return [(x, y, z, t) for x, y, z, t in itertools.product(rng, rng, rng, rng)
            if x * x - 3 * y * y + z * z - 3 * t * t == 1]


def enumerate_norm_one_units(box: int) -> list[GroupMatrix]:
    return [embed_phi(Quaternion.from_tuple(u, DEFAULT_ALGEBRA)) for u in norm_one_tuples(box)]


def reduced_words(max_len: int, names: Sequence[str] = ("alpha", "beta")) -> list[Word]:
    """Freely reduced words of length ``<= max_len`` in shortlex order."""
    alphabet = [(n, e) for n in names for e in (1, -1)]
    words: list[Word] = [[]]
    frontier: list[Word] = [[]]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for letter in alphabet:
                if w and w[-1][0] == letter[0] and w[-1][1] == -letter[1]:
                    continue
                nxt.append(w + [letter])
        words.extend(nxt)
        frontier = nxt
    return words


def word_length(word: Sequence[Letter]) -> int:
    return sum(abs(e) for _, e in word)


# ---------------------------------------------------------------------------
# numeric kernels


@dataclass
class KernelResult:
    points: np.ndarray
    letter_idx: np.ndarray   # (n, L) int32, -1 padded, in application order
    letter_exp: np.ndarray   # (n, L) int32
    n_letters: np.ndarray
    steps: np.ndarray
    status: np.ndarray

    def word(self, preset: GroupPreset, i: int) -> Word:
        """Reducer word (product order) for point ``i``."""
        applied = [
            (preset.letters[k][0], preset.letters[k][1] * int(e))
            for k, e in zip(self.letter_idx[i, : self.n_letters[i]], self.letter_exp[i, : self.n_letters[i]])
        ]
        return applied[::-1]

    def word_keys(self) -> tuple[np.ndarray, np.ndarray]:
        """Unique (letter, exponent) rows and the inverse index into them."""
        width = int(self.n_letters.max()) if len(self.n_letters) else 0
        packed = np.concatenate([self.letter_idx[:, :width], self.letter_exp[:, :width]], axis=1)
        if packed.shape[1] == 0:
            packed = np.zeros((len(self.n_letters), 1), dtype=np.int32)
        uniq, inverse = np.unique(packed, axis=0, return_inverse=True)
        return uniq, inverse.reshape(-1)


def _strip_kernel(preset: GroupPreset, z: np.ndarray, max_steps: int, tol: float) -> KernelResult:
    dom = preset.domain
    n = len(z)
    lam = dom.lam
    log_lam = math.log(lam)
    h2 = preset.homothety_factor ** 2
    walls = [(c.center, c.radius) for c in dom.circles]
    wall_mats = [preset.letter_matrices[i + 1].numeric for i in range(len(walls))]

    z = z.astype(complex).copy()
    idx = np.full((n, max_steps), -1, dtype=np.int32)
    exp = np.zeros((n, max_steps), dtype=np.int32)
    nl = np.zeros(n, dtype=np.int64)
    steps = np.zeros(n, dtype=np.int64)
    status = np.full(n, OK, dtype=np.int8)
    tries = np.zeros(n, dtype=np.int8)
    active = np.arange(n)

    while active.size:
        za = z[active]
        bad = ~np.isfinite(za) | (za.imag <= 0)
        verdict = classify(dom, za, tol)
        done = (verdict == Verdict.INTERIOR) | ((verdict == Verdict.BOUNDARY) & (tries[active] >= 1))
        status[active[bad]] = DEGENERATE
        done |= bad

        r = np.abs(za)
        move = np.full(za.shape, -1, dtype=np.int64)
        out_strip = (r < 1.0 / lam) | (r > lam)
        move[out_strip & ~done] = 0
        for k, (c, rad) in enumerate(walls):
            sel = (move == -1) & ~done & (np.abs(za - c) < rad)
            move[sel] = k + 1
        done |= move == -1

        act = active[~done]
        mv = move[~done]
        if act.size == 0:
            break
        zz = z[act]
        e = np.ones(act.size, dtype=np.int64)
        hom = mv == 0
        if hom.any():
            rr = np.abs(zz[hom])
            nexp = -np.rint(np.log(rr) / (2.0 * log_lam)).astype(np.int64)
            lg = np.log(rr) + 2 * nexp * log_lam
            nexp[lg > log_lam] -= 1
            nexp[lg < -log_lam] += 1
            nexp[nexp == 0] = np.where(np.log(rr[nexp == 0]) > 0, -1, 1)
            e[hom] = nexp
            zz[hom] = zz[hom] * h2 ** nexp.astype(float)
        for k, m in enumerate(wall_mats):
            sel = mv == k + 1
            if sel.any():
                w = zz[sel]
                zz[sel] = (m[0, 0] * w + m[0, 1]) / (m[1, 0] * w + m[1, 1])
        z[act] = zz
        slot = nl[act]
        overflow = slot >= max_steps
        ok_slot = ~overflow
        idx[act[ok_slot], slot[ok_slot]] = mv[ok_slot]
        exp[act[ok_slot], slot[ok_slot]] = e[ok_slot]
        nl[act] += 1
        steps[act] += np.abs(e)
        was_boundary = verdict[~done] == Verdict.BOUNDARY
        tries[act[was_boundary]] += 1
        over = steps[act] > max_steps
        status[act[over]] = TOO_MANY_STEPS
        active = act[~over]
    return KernelResult(z, idx, exp, np.minimum(nl, max_steps), steps, status)


def _dirichlet_kernel(stack: np.ndarray, center: complex, z: np.ndarray, max_steps: int,
                      improvement: float = 1e-12) -> KernelResult:
    n = len(z)
    z = z.astype(complex).copy()
    idx = np.full((n, max_steps), -1, dtype=np.int32)
    exp = np.zeros((n, max_steps), dtype=np.int32)
    nl = np.zeros(n, dtype=np.int64)
    status = np.full(n, OK, dtype=np.int8)
    active = np.arange(n)
    a, b, c, d = stack[:, 0, 0], stack[:, 0, 1], stack[:, 1, 0], stack[:, 1, 1]
    while active.size:
        za = z[active]
        bad = ~np.isfinite(za) | (za.imag <= 0)
        status[active[bad]] = DEGENERATE
        za_safe = np.where(bad, center, za)
        d0 = np.atleast_1d(hyperbolic_distance(za_safe, center))
        zc = za_safe[:, None]
        imgs = (a * zc + b) / (c * zc + d)
        dg = np.atleast_2d(hyperbolic_distance(imgs, center))
        j = np.argmin(dg, axis=1)
        best = dg[np.arange(len(j)), j]
        improve = (best < d0 - improvement) & ~bad
        act = active[improve]
        if act.size == 0:
            break
        jj = j[improve]
        z[act] = imgs[improve, jj]
        slot = nl[act]
        over = slot >= max_steps
        idx[act[~over], slot[~over]] = jj[~over]
        exp[act[~over], slot[~over]] = 1
        nl[act] += 1
        status[act[over]] = TOO_MANY_STEPS
        active = act[~over]
    return KernelResult(z, idx, exp, nl.copy(), nl.copy(), status)


def reduce_numeric(preset: GroupPreset, z, max_steps: int = DEFAULT_MAX_STEPS,
                   tol: float = DEFAULT_TOL) -> KernelResult:
    """Vectorised reduction of many points; see :class:`KernelResult`."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if preset.is_strip:
        return _strip_kernel(preset, z, max_steps, tol)
    dom = preset.domain
    return _dirichlet_kernel(dom.numeric_stack, dom.center, z, max_steps)


def _result_from_kernel(kr: KernelResult, preset: GroupPreset, max_steps: int) -> ReductionResult:
    if kr.status[0] == TOO_MANY_STEPS:
        raise MaxStepsExceeded(f"no reduction within {max_steps} steps")
    if kr.status[0] == DEGENERATE:
        raise MaxStepsExceeded("reduction left the upper half-plane")
    word = kr.word(preset, 0)
    return ReductionResult(word, word_to_matrix(word, preset), complex(kr.points[0]), int(kr.steps[0]))


def reduce_point_1e(preset: GroupPreset, z: complex, max_steps: int = DEFAULT_MAX_STEPS,
                    tol: float = DEFAULT_TOL) -> ReductionResult:
    """Strip-and-circles reduction: homothety into the strip, then side pairings.

    The reducer ``delta`` satisfies ``delta(z) = reduced_point``; the word is in
    product order, so ``word_to_matrix(word) == delta``.
    """
    if not preset.is_strip:
        raise TypeError(f"preset {preset.name} has no fundamental strip")
    kr = _strip_kernel(preset, np.array([z], dtype=complex), max_steps, tol)
    return _result_from_kernel(kr, preset, max_steps)


def reduce_point_dirichlet(generators: Union[Sequence[GroupMatrix], Mapping[str, GroupMatrix]],
                           center: complex, z: complex,
                           max_steps: int = DEFAULT_MAX_STEPS) -> ReductionResult:
    """Greedy descent towards ``center``: apply the generator that brings the
    point closest to it while that strictly helps."""
    if isinstance(generators, Mapping):
        named = dict(generators)
    else:
        named = {f"g{i}": g for i, g in enumerate(generators)}
    preset = GroupPreset(
        name="dirichlet",
        generators=named,
        domain=Dirichlet(center, tuple(named.values())),
        base_point_default=center,
        letters=tuple((n, 1) for n in named),
    )
    kr = reduce_numeric(preset, z, max_steps)
    return _result_from_kernel(kr, preset, max_steps)


def reduce_point(preset: GroupPreset, z: complex, max_steps: int = DEFAULT_MAX_STEPS) -> ReductionResult:
    kr = reduce_numeric(preset, z, max_steps)
    return _result_from_kernel(kr, preset, max_steps)


def in_group(preset: GroupPreset, g: GroupMatrix, max_steps: int = DEFAULT_MAX_STEPS) -> bool:
    """Exact membership test for a matrix already in the preset frame.

    Reduces ``g(base)`` and checks that the reducer cancels ``g`` up to sign,
    which holds exactly when ``g`` lies in the group (the base point is
    interior, so its stabiliser is trivial).
    """
    try:
        res = reduce_point(preset, moebius_apply(g, preset.base_point_default), max_steps)
    except MaxStepsExceeded:
        return False
    return (res.matrix @ g).is_plus_minus_identity()


# ---------------------------------------------------------------------------
# preset files
#
# One directive per line, '#' starts a comment.  Tower elements are four
# rationals (coefficients of 1, sqrt2, sqrt3, sqrt6); matrices are four tower
# elements in row order.
#
#   name <string>
#   kind strip | dirichlet
#   generator <name> <16 rationals>
#   homothety <name>                 (strip)
#   wall <name> | <name>^-1          (strip; apply this letter inside its circle)
#   unit_box <int>                   (dirichlet; add norm-one units of the natural order)
#   center <re> <im>                 (dirichlet)
#   base_point <re> <im>
#   frame_scale <4 rationals>


def _parse_matrix(fields: Sequence[str]) -> GroupMatrix:
    if len(fields) != 16:
        raise PresetError(f"a matrix needs 16 coefficients, got {len(fields)}")
    vals = [Fraction(f) for f in fields]
    return GroupMatrix(*(TowerElement(*vals[4 * i: 4 * i + 4]) for i in range(4)))


def _parse_letter(token: str) -> Letter:
    if token.endswith("^-1"):
        return token[:-3], -1
    return token, 1


def parse_preset(text: str) -> GroupPreset:
    name = None
    kind = None
    generators: dict[str, GroupMatrix] = {}
    homothety = None
    walls: list[Letter] = []
    unit_box = 0
    center = None
    base = None
    frame = ONE
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        try:
            if key == "name":
                name = rest[0]
            elif key == "kind":
                kind = rest[0]
            elif key == "generator":
                generators[rest[0]] = _parse_matrix(rest[1:])
            elif key == "homothety":
                homothety = rest[0]
            elif key == "wall":
                walls.append(_parse_letter(rest[0]))
            elif key == "unit_box":
                unit_box = int(rest[0])
            elif key == "center":
                center = complex(float(rest[0]), float(rest[1]))
            elif key == "base_point":
                base = complex(float(rest[0]), float(rest[1]))
            elif key == "frame_scale":
                frame = TowerElement(*(Fraction(f) for f in rest))
            else:
                raise PresetError(f"unknown directive {key!r}")
        except (IndexError, ValueError, ZeroDivisionError, TypeError) as exc:
            raise PresetError(f"line {lineno}: cannot parse {raw.strip()!r}: {exc}") from None

    if name is None or kind not in ("strip", "dirichlet"):
        raise PresetError("preset needs a name and kind strip|dirichlet")
    for gname, g in generators.items():
        if g.det != ONE:
            raise PresetError(f"generator {gname} has determinant {g.det}, expected 1")
    if frame.is_zero():
        raise PresetError("frame_scale must be nonzero")

    if kind == "strip":
        if homothety not in generators:
            raise PresetError("strip preset needs a homothety generator")
        h = generators[homothety]
        if not (h.b.is_zero() and h.c.is_zero()):
            raise PresetError(f"{homothety} is not diagonal")
        lam = abs(float(h.a))
        if lam < 1:
            generators[homothety] = h = h.inverse()
            lam = 1 / lam
        for wname, _ in walls:
            if wname not in generators:
                raise PresetError(f"wall refers to unknown generator {wname}")
        letters = ((homothety, 1),) + tuple(walls)
        circles = tuple(isometry_circle(generators[n] ** e) for n, e in walls)
        domain: DomainSpec = StripAndCircles(lam, circles)
        if base is None:
            base = 1j
    else:
        if center is None:
            raise PresetError("dirichlet preset needs a center")
        named: dict[str, GroupMatrix] = {}
        seen: set[GroupMatrix] = set()

        def add(label: str, g: GroupMatrix) -> None:
            if g.is_plus_minus_identity() or g in seen or -g in seen:
                return
            seen.add(g)
            named[label] = g

        for gname, g in generators.items():
            add(gname, g)
            add(gname + "^-1", g.inverse())
        for u in norm_one_tuples(unit_box) if unit_box else []:
            add("u({},{},{},{})".format(*u), embed_phi(Quaternion.from_tuple(u)))
        if not named:
            raise PresetError("dirichlet preset has no generators")
        generators = named
        letters = tuple((n, 1) for n in named)
        domain = Dirichlet(center, tuple(named.values()))
        if base is None:
            base = center

    preset = GroupPreset(name, generators, domain, base, letters, frame)
    if classify(domain, base)[0] != Verdict.INTERIOR:
        raise PresetError(f"base point {base} is not interior to the domain of {name}")
    return preset


def load_preset(name_or_path: Union[str, Path]) -> GroupPreset:
    """Load a built-in preset by name, or a preset file by path."""
    p = Path(name_or_path)
    if p.suffix and p.exists():
        return parse_preset(p.read_text())
    builtin = resources.files(__package__).joinpath("presets").joinpath(f"{name_or_path}.txt")
    if not builtin.is_file():
        raise KeyError(f"unknown preset {name_or_path!r}; available: {', '.join(available_presets())}")
    return _load_builtin(str(name_or_path))


_BUILTIN_CACHE: dict[str, GroupPreset] = {}


def _load_builtin(name: str) -> GroupPreset:
    if name not in _BUILTIN_CACHE:
        text = resources.files(__package__).joinpath("presets").joinpath(f"{name}.txt").read_text()
        _BUILTIN_CACHE[name] = parse_preset(text)
    return _BUILTIN_CACHE[name]


def available_presets() -> list[str]:
    folder = resources.files(__package__).joinpath("presets")
    return sorted(p.name[:-4] for p in folder.iterdir() if p.name.endswith(".txt"))


def step_profile(preset: GroupPreset, words: Sequence[Word], tau: Optional[complex] = None) -> list[int]:
    """Reduction step counts for the zero-noise images ``w(tau)``."""
    tau = preset.base_point_default if tau is None else tau
    pts = np.array([moebius_apply(word_to_matrix(w, preset), tau) for w in words])
    kr = reduce_numeric(preset, pts)
    if np.any(kr.status != OK):
        raise MaxStepsExceeded("a codeword failed to reduce")
    return [int(s) for s in kr.steps]
