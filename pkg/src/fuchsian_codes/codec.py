"""Constellations built from norm-one quaternions, and their decoder.

A label ``(m, k1, k2)`` picks the integer 4-tuple

    x + sqrt3 y = a_m eps^k1,   z + sqrt3 t = sqrt3 b_m eps^k2,

where ``eps = 2 + sqrt3`` and ``a_m + sqrt3 b_m = eps^m``.  The tuple is a
unit of reduced norm one; its matrix ``gamma`` sends the base point ``tau`` to
the transmitted symbol ``gamma(tau)``.  Decoding reduces the received point
into the fundamental domain and reads the label back off the reducer.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from math import isqrt
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import (
    CollidingPoints,
    FuchsianError,
    NotAUnitMultiple,
    NotInGroup,
    NotInImage,
    NotInOrderPattern,
    RealAxisSignal,
    ReductionFailed,
    TauNotInterior,
    UnknownLabel,
)
from .exactfield import QuadElement, pell_fundamental_unit, unit_log, unit_power
from .fuchsian import OK, GroupPreset, in_group, reduce_numeric, sign_normalize, word_to_matrix
from .hyperbolic import (
    DomainSpec,
    StripAndCircles,
    Verdict,
    classify,
    deepest_point,
    grid_search,
    moebius_apply,
    moebius_numeric,
)
from .matrices import GroupMatrix
from .quaternion import Quaternion, embed_phi

EPS = pell_fundamental_unit(3)
CODE_DIMENSIONS = 3
MIN_POINT_SEPARATION = 1e-9


class Tuple4(NamedTuple):
    x: int
    y: int
    z: int
    t: int


class LabelTriple(NamedTuple):
    m: int
    k1: int
    k2: int

    def negated(self) -> "LabelTriple":
        return LabelTriple(-self.m, self.k1, self.k2)


def normic_form(t: Sequence[int]) -> int:
    x, y, z, w = t
    return x * x - 3 * y * y + z * z - 3 * w * w


# ---------------------------------------------------------------------------
# the labelling map and its inverse


def gen_phi(m: int, k1: int, k2: int) -> Tuple4:
    if m < 1 or k1 < 0 or k2 < 0:
        raise ValueError(f"label ({m},{k1},{k2}) needs m >= 1 and k1, k2 >= 0")
    em = unit_power(EPS, m)
    a_m, b_m = em.p, em.q
    u = unit_power(EPS, k1) * a_m
    v = unit_power(EPS, k2) * QuadElement(3, 0, b_m)
    return Tuple4(int(u.p), int(u.q), int(v.p), int(v.q))


def _exact_log(x: QuadElement) -> int:
    """``k`` with ``x == eps^k`` exactly, else :class:`NotInImage`."""
    try:
        k = unit_log(x, EPS)
    except NotAUnitMultiple as exc:
        raise NotInImage(str(exc)) from None
    if unit_power(EPS, k) != x:
        raise NotInImage(f"{x} is not a power of {EPS}")
    return k


def invert_phi(t: Sequence[int]) -> LabelTriple:
    x, y, z, w = (int(v) for v in t)
    a2 = x * x - 3 * y * y
    b2_3 = 3 * w * w - z * z
    if a2 <= 0 or b2_3 <= 0 or b2_3 % 3:
        raise NotInImage(f"{tuple(t)} is not in the image of the labelling map")
    a_m, b_m = isqrt(a2), isqrt(b2_3 // 3)
    if a_m * a_m != a2 or b_m * b_m != b2_3 // 3:
        raise NotInImage(f"{tuple(t)}: a_m or b_m is not an integer")
    m = _exact_log(QuadElement(3, a_m, b_m))
    k1 = _exact_log(QuadElement(3, Fraction(x, a_m), Fraction(y, a_m)))
    # (z + sqrt3 w) / (sqrt3 b_m) = w / b_m + (z / (3 b_m)) sqrt3
    k2 = _exact_log(QuadElement(3, Fraction(w, b_m), Fraction(z, 3 * b_m)))
    if m < 1 or k1 < 0 or k2 < 0:
        raise NotInImage(f"{tuple(t)} decodes to ({m},{k1},{k2}), outside the label range")
    return LabelTriple(m, k1, k2)


def _integer(v: Fraction, what: str) -> int:
    if v.denominator != 1:
        raise NotInOrderPattern(f"{what} = {v} is not an integer")
    return int(v)


def matrix_to_tuple(g: GroupMatrix) -> Tuple4:
    """Read ``(x, y, z, t)`` off ``((x + y r, z + t r), (-(z - t r), x - y r))``, ``r = sqrt3``."""
    if not all(e.in_sqrt3_field() for e in g.entries()):
        raise NotInOrderPattern("entries leave Q(sqrt3)")
    a, b, c, d = (e.as_quad3() for e in g.entries())
    if d != a.conjugate() or c != -b.conjugate():
        raise NotInOrderPattern(f"{g} does not have the shape of an embedded quaternion")
    return Tuple4(_integer(a.p, "x"), _integer(a.q, "y"), _integer(b.p, "z"), _integer(b.q, "t"))


def label_matrix(label: Sequence[int]) -> GroupMatrix:
    """Sign-normalized matrix of a positive label, in the quaternion frame."""
    g, _ = sign_normalize(embed_phi(Quaternion.from_tuple(gen_phi(*label))))
    return g


def spiral(max_level: Optional[int] = None) -> Iterator[LabelTriple]:
    """All labels with ``m >= 1``, by max coordinate, then lexicographically."""
    for level in itertools.count(1) if max_level is None else range(1, max_level + 1):
        for m, k1, k2 in itertools.product(range(1, level + 1), range(level + 1), range(level + 1)):
            if max(m, k1, k2) == level:
                yield LabelTriple(m, k1, k2)


def spiral_labels(preset: GroupPreset, size: int, max_level: int = 64) -> list[LabelTriple]:
    """The first ``size`` spiral labels whose matrix lies in the preset's group."""
    if size < 0:
        raise ValueError("size must be non-negative")
    out: list[LabelTriple] = []
    if size == 0:
        return out
    for label in spiral(max_level):
        if in_group(preset, preset.to_frame(label_matrix(label))):
            out.append(label)
            if len(out) == size:
                return out
    raise NotInGroup(f"only {len(out)} admissible labels up to level {max_level}")


# ---------------------------------------------------------------------------
# codebooks


@dataclass(frozen=True)
class CodebookEntry:
    label: LabelTriple
    tuple: Tuple4
    matrix: GroupMatrix       # sign-normalized, quaternion frame
    point: complex
    sign: int


@dataclass(frozen=True, eq=False)
class Codebook:
    entries: tuple[CodebookEntry, ...]
    tau: complex
    preset: Optional[GroupPreset]
    _index: dict = field(default_factory=dict, repr=False)
    _word_cache: dict = field(default_factory=dict, repr=False)
    _match_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        self._index.update({e.label: i for i, e in enumerate(self.entries)})

    @cached_property
    def _framed(self) -> dict:
        """Preset-frame matrices of the positive labels."""
        return {e.label: self.preset.to_frame(e.matrix) for e in self.entries if e.sign > 0}

    @property
    def preset_name(self) -> str:
        return self.preset.name if self.preset is not None else ""

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def labels(self) -> list[LabelTriple]:
        return [e.label for e in self.entries]

    @property
    def points(self) -> np.ndarray:
        return np.array([e.point for e in self.entries], dtype=complex)

    def index_of(self, label: Sequence[int]) -> int:
        try:
            return self._index[LabelTriple(*label)]
        except KeyError:
            raise UnknownLabel(f"{tuple(label)} is not in the codebook") from None


def _check_separation(points: np.ndarray) -> None:
    if len(points) < 2:
        return
    diff = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(diff, np.inf)
    i, j = np.unravel_index(int(np.argmin(diff)), diff.shape)
    if diff[i, j] <= MIN_POINT_SEPARATION:
        raise CollidingPoints(f"codewords {i} and {j} coincide at {points[i]}")


def build_codebook(labels: Iterable[Sequence[int]], preset: Optional[GroupPreset], tau: complex,
                   duplicate: bool = False) -> Codebook:
    """Codebook of the points ``gamma(tau)``; ``preset=None`` skips the group checks.

    With ``duplicate`` each label ``(m, k1, k2)`` also gets ``(-m, k1, k2)``
    mapped to ``-gamma(tau)`` in the lower half-plane.
    """
    labels = [LabelTriple(*lab) for lab in labels]
    if len(set(labels)) != len(labels):
        raise ValueError("labels must be distinct")
    tau = complex(tau)
    if preset is not None and classify(preset.domain, tau)[0] != Verdict.INTERIOR:
        raise TauNotInterior(f"tau = {tau} is not interior to the domain of {preset.name}")
    entries = []
    for lab in labels:
        tup = gen_phi(*lab)
        g = label_matrix(lab)
        framed = g if preset is None else preset.to_frame(g)
        if preset is not None and not in_group(preset, framed):
            raise NotInGroup(f"label {tuple(lab)} does not give an element of {preset.name}")
        entries.append(CodebookEntry(lab, tup, g, moebius_apply(framed, tau), 1))
    if duplicate:
        entries += [CodebookEntry(e.label.negated(), e.tuple, e.matrix, -e.point, -1) for e in list(entries)]
    book = Codebook(tuple(entries), tau, preset)
    _check_separation(book.points)
    return book


def optimize_tau(matrices: Sequence[GroupMatrix], dom: DomainSpec, grid: int = 41) -> complex:
    """Interior point minimising ``sum_k |gamma_k(z) - gamma_k(c)|^2``, ``c`` the deepest point."""
    if not isinstance(dom, StripAndCircles):
        raise TypeError("optimize_tau needs a strip-and-circles domain")
    if not matrices:
        raise ValueError("need at least one matrix")
    c = deepest_point(dom, grid)
    nums = [g.numeric for g in matrices]
    targets = [moebius_numeric(m, c) for m in nums]

    def objective(z):
        return sum(np.abs(moebius_numeric(m, z) - ck) ** 2 for m, ck in zip(nums, targets))

    return grid_search(dom, objective, grid)


def default_tau(preset: GroupPreset, labels: Sequence[Sequence[int]], grid: int = 41) -> complex:
    """Optimized ``tau`` for strip presets; the domain centre for Dirichlet presets."""
    if not preset.is_strip or not labels:
        return preset.base_point_default
    return optimize_tau([preset.to_frame(label_matrix(lab)) for lab in labels], preset.domain, grid)


def nuf_codebook(preset: GroupPreset, size: int, tau: Optional[complex] = None,
                 duplicate: bool = False) -> Codebook:
    """The ``size``-point constellation (before duplication) from the label spiral."""
    labels = spiral_labels(preset, size)
    if tau is None:
        tau = default_tau(preset, labels)
    return build_codebook(labels, preset, tau, duplicate)


def encode(book: Codebook, label: Sequence[int]) -> complex:
    return book.entries[book.index_of(label)].point


def compute_rates(book: Codebook) -> tuple[float, int]:
    """``(R, Rc)``: bits and integer dimensions per channel use."""
    if len(book) < 1:
        raise ValueError("empty codebook has no rate")
    return math.log2(len(book)), CODE_DIMENSIONS


# ---------------------------------------------------------------------------
# decoding


def _label_from_word(book: Codebook, key: tuple) -> Union[LabelTriple, FuchsianError]:
    preset = book.preset
    word = [(preset.letters[k][0], preset.letters[k][1] * e) for k, e in reversed(key)]
    try:
        g, _ = sign_normalize(preset.from_frame(word_to_matrix(word, preset).inverse()))
        return invert_phi(matrix_to_tuple(g))
    except FuchsianError as exc:
        return exc


def _word_numeric(preset: GroupPreset, key: tuple) -> np.ndarray:
    """Float matrix of the reducer word (product order)."""
    out = np.eye(2)
    for k, e in key:
        out = np.linalg.matrix_power(preset.letter_matrices[k].numeric, e) @ out
    return out


def _book_match(book: Codebook, key: tuple) -> Optional[LabelTriple]:
    """Positive label whose matrix the reducer inverts, if any.

    Candidates are found in floating point and confirmed exactly, so foreign
    words never pay for an exact product.
    """
    preset = book.preset
    w = _word_numeric(preset, key)
    for lab, g in book._framed.items():
        prod = w @ g.numeric
        scale = 1e-7 * max(1.0, float(np.abs(w).max()) * float(np.abs(g.numeric).max()))
        if min(np.abs(prod - np.eye(2)).max(), np.abs(prod + np.eye(2)).max()) < scale:
            word = [(preset.letters[k][0], preset.letters[k][1] * e) for k, e in reversed(key)]
            if (word_to_matrix(word, preset) @ g).is_plus_minus_identity():
                return lab
    return None


def _decode_upper(book: Codebook, v: np.ndarray, exact: bool) -> list:
    """Labels (or the failure) for points in the upper half-plane.

    With ``exact`` unset, words that do not invert a codebook matrix resolve to
    ``None`` instead of their (foreign) label.
    """
    if book.preset is None:
        raise ValueError("a codebook without a preset cannot be decoded")
    kr = reduce_numeric(book.preset, v)
    uniq, inverse = kr.word_keys()
    width = uniq.shape[1] // 2 if kr.n_letters.max(initial=0) else 0
    cache = book._word_cache if exact else book._match_cache
    resolved = []
    for row in uniq:
        key = tuple((int(i), int(e)) for i, e in zip(row[:width], row[width:]) if i >= 0)
        if key not in cache:
            cache[key] = _label_from_word(book, key) if exact else _book_match(book, key)
        resolved.append(cache[key])
    return [resolved[u] if kr.status[i] == OK else ReductionFailed(f"reduction of {v[i]} failed")
            for i, u in enumerate(inverse)]


def decode_labels(book: Codebook, v, exact: bool = True) -> list:
    """Vectorised decode; each item is a label or the error that stopped it."""
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    out: list = [None] * len(v)
    finite = np.isfinite(v)
    lower = v.imag < 0
    ok = finite & (v.imag != 0)
    for i in np.flatnonzero(~ok):
        out[i] = RealAxisSignal(f"{v[i]} is on the real axis") if finite[i] else ReductionFailed("non-finite signal")
    idx = np.flatnonzero(ok)
    if idx.size:
        res = _decode_upper(book, np.where(lower[idx], -v[idx], v[idx]), exact)
        for i, r in zip(idx, res):
            out[i] = r.negated() if lower[i] and isinstance(r, LabelTriple) else r
    return out


def decode(book: Codebook, v: complex) -> LabelTriple:
    r = decode_labels(book, [v])[0]
    if isinstance(r, FuchsianError):
        raise r
    return r


def decode_batch(book: Codebook, v) -> np.ndarray:
    """Codebook indices of the decoded labels; ``-1`` for errors and foreign labels."""
    return np.array([book._index.get(r, -1) if isinstance(r, LabelTriple) else -1
                     for r in decode_labels(book, v, exact=False)], dtype=np.int64)


# ---------------------------------------------------------------------------
# CSV


CODEBOOK_COLUMNS = ("m", "k1", "k2", "x", "y", "z", "t", "re", "im", "sign")


def _g17(v: float) -> str:
    return format(float(v), ".17g")


def write_codebook_csv(book: Codebook, path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CODEBOOK_COLUMNS)
        for e in book.entries:
            w.writerow([*e.label, *e.tuple, _g17(e.point.real), _g17(e.point.imag), e.sign])


def read_codebook_csv(path: Union[str, Path], preset: Optional[GroupPreset]) -> Codebook:
    """Rebuild a codebook from its CSV; ``tau`` is recovered from the first entry."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CODEBOOK_COLUMNS:
            raise ValueError(f"expected columns {','.join(CODEBOOK_COLUMNS)}")
        rows = list(reader)
    entries = []
    for row in rows:
        label = LabelTriple(int(row["m"]), int(row["k1"]), int(row["k2"]))
        tup = Tuple4(*(int(row[c]) for c in "xyzt"))
        sign = int(row["sign"])
        if sign not in (1, -1) or (label.m > 0) != (sign > 0):
            raise ValueError(f"row {tuple(label)}: sign {sign} does not match m")
        if gen_phi(abs(label.m), label.k1, label.k2) != tup:
            raise ValueError(f"row {tuple(label)}: tuple {tuple(tup)} is not its image")
        g = label_matrix((abs(label.m), label.k1, label.k2))
        entries.append(CodebookEntry(label, tup, g, complex(float(row["re"]), float(row["im"])), sign))
    tau = 1j if preset is None else preset.base_point_default
    if entries:
        e = entries[0]
        framed = e.matrix if preset is None else preset.to_frame(e.matrix)
        tau = moebius_apply(framed.inverse(), e.sign * e.point)
    book = Codebook(tuple(entries), tau, preset)
    _check_separation(book.points)
    return book
