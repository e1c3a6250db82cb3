import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fuchsian_codes.errors import MaxStepsExceeded, PresetError, SignUndecidable, UnknownGenerator
from fuchsian_codes.exactfield import TowerElement
from fuchsian_codes.fuchsian import (
    available_presets,
    enumerate_norm_one_units,
    in_group,
    load_preset,
    norm_one_tuples,
    parse_preset,
    reduce_numeric,
    reduce_point,
    reduce_point_1e,
    reduce_point_dirichlet,
    reduced_words,
    sign_normalize,
    step_profile,
    word_length,
    word_to_matrix,
)
from fuchsian_codes.hyperbolic import Verdict, classify, deepest_point, domain_contains, moebius_apply
from fuchsian_codes.matrices import GroupMatrix
from fuchsian_codes.quaternion import Quaternion, embed_phi

R2, R6 = math.sqrt(2), math.sqrt(6)


def test_builtin_presets():
    assert available_presets() == ["e2d1D6ii", "gamma61"]
    with pytest.raises(KeyError):
        load_preset("nope")


def test_e2d1_generators(e2d1):
    a, b = e2d1.generators["alpha"], e2d1.generators["beta"]
    assert np.allclose(a.numeric, [[(R6 + R2) / 2, 0], [0, (R6 - R2) / 2]])
    assert np.allclose(b.numeric, [[R2, 1], [1, R2]])
    assert a.det == TowerElement(1) and b.det == TowerElement(1)
    assert e2d1.domain.lam == pytest.approx((R6 + R2) / 2)
    assert sorted(c.center for c in e2d1.domain.circles) == pytest.approx([-R2, R2])


def test_reduce_examples(e2d1):
    r = reduce_point_1e(e2d1, 1j)
    assert r.word == [] and r.matrix.is_identity() and r.steps == 0
    r = reduce_point_1e(e2d1, moebius_apply(e2d1.generators["alpha"], 1j))
    assert r.word == [("alpha", -1)] and r.reduced_point == pytest.approx(1j)
    r = reduce_point_1e(e2d1, moebius_apply(e2d1.generators["beta"], 1j))
    assert r.word == [("beta", -1)] and r.reduced_point == pytest.approx(1j)


def test_reduce_result_invariants(e2d1):
    rng = np.random.default_rng(3)
    for _ in range(50):
        z = complex(rng.uniform(-20, 20), math.exp(rng.uniform(-6, 3)))
        r = reduce_point_1e(e2d1, z)
        assert abs(moebius_apply(r.matrix, z) - r.reduced_point) < 1e-6 * max(1, abs(z))
        assert domain_contains(e2d1.domain, r.reduced_point) != Verdict.OUTSIDE
        assert r.matrix == word_to_matrix(r.word, e2d1)


def test_reduce_max_steps(e2d1):
    with pytest.raises(MaxStepsExceeded):
        reduce_point_1e(e2d1, 1e-7 + 1e-9j, max_steps=2)


def test_round_trip_words_up_to_six(e2d1):
    words = reduced_words(6)
    assert len(words) == 1 + sum(4 * 3 ** (k - 1) for k in range(1, 7))
    pts = np.array([moebius_apply(word_to_matrix(w, e2d1), 1j) for w in words])
    kr = reduce_numeric(e2d1, pts)
    for i, w in enumerate(words):
        delta = word_to_matrix(kr.word(e2d1, i), e2d1)
        assert (delta @ word_to_matrix(w, e2d1)).is_plus_minus_identity(), w


def test_step_bound_by_word_length(e2d1):
    words = reduced_words(5)
    for w, s in zip(words, step_profile(e2d1, words)):
        assert s <= word_length(w)


def test_distinct_words_give_distinct_reducers(e2d1):
    words = reduced_words(3)
    mats = [word_to_matrix(w, e2d1) for w in words]
    pts = np.array([moebius_apply(g, 1j) for g in mats])
    kr = reduce_numeric(e2d1, pts)
    reducers = [word_to_matrix(kr.word(e2d1, i), e2d1) for i in range(len(words))]
    seen = set()
    for g in reducers:
        key = sign_normalize(g)[0]
        assert key not in seen
        seen.add(key)


def test_dirichlet_examples(e2d1, gamma61):
    c = deepest_point(e2d1.domain)
    gens = {"a": e2d1.generators["alpha"], "A": e2d1.generators["alpha"].inverse(),
            "b": e2d1.generators["beta"], "B": e2d1.generators["beta"].inverse()}
    assert reduce_point_dirichlet(gens, c, c).word == []
    ba = word_to_matrix([("beta", 1), ("alpha", 1)], e2d1)
    r = reduce_point_dirichlet(gens, c, moebius_apply(ba, 1j))
    assert (word_to_matrix(r.word, gens) @ ba).is_plus_minus_identity()
    r = reduce_point_dirichlet(list(gens.values()), c, moebius_apply(ba, c))
    assert r.reduced_point == pytest.approx(c)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 24), min_size=1, max_size=4), st.complex_numbers(max_magnitude=1e-6))
def test_gamma61_round_trip(gamma61, letters, noise):
    names = [n for n, _ in gamma61.letters]
    g = word_to_matrix([(names[i], 1) for i in letters], gamma61)
    tau = gamma61.base_point_default
    r = reduce_point(gamma61, moebius_apply(g, tau) + noise)
    assert (r.matrix @ g).is_plus_minus_identity()
    assert classify(gamma61.domain, r.reduced_point)[0] != Verdict.OUTSIDE


def test_norm_one_enumeration():
    units = norm_one_tuples(1)
    assert (1, 0, 0, 0) in units
    assert (2, 0, 3, 2) in norm_one_tuples(4)
    assert (2, 1, 0, 0) in norm_one_tuples(2)
    mats = enumerate_norm_one_units(4)
    assert embed_phi(Quaternion(2, 0, 3, 2)) in mats
    assert all(g.det == TowerElement(1) for g in mats)
    assert norm_one_tuples(2) == sorted(norm_one_tuples(2))


def test_sign_normalize(e2d1):
    b = e2d1.generators["beta"]
    assert sign_normalize(b) == (b, 1)
    assert sign_normalize(-b) == (b, -1)
    assert sign_normalize(GroupMatrix.identity()) == (GroupMatrix.identity(), 1)
    for w in reduced_words(3):
        g = word_to_matrix(w, e2d1)
        assert sign_normalize(-g)[0] == sign_normalize(g)[0]
    with pytest.raises(SignUndecidable):
        sign_normalize(GroupMatrix.of(1, 0, -1, 1))


def test_word_to_matrix(e2d1):
    assert word_to_matrix([], e2d1).is_identity()
    assert word_to_matrix([("alpha", 1), ("alpha", -1)], e2d1).is_identity()
    a, b = e2d1.generators["alpha"], e2d1.generators["beta"]
    g = word_to_matrix([("beta", 1), ("alpha", 1)], e2d1)
    assert g == b @ a and g.det == TowerElement(1)
    assert word_to_matrix([("beta", 1), ("alpha", 1)], {"alpha": a, "beta": b}) == g
    with pytest.raises(UnknownGenerator):
        word_to_matrix([("gamma", 1)], e2d1)


def test_in_group(e2d1):
    assert in_group(e2d1, word_to_matrix([("beta", 1), ("alpha", -2)], e2d1))
    s = GroupMatrix.of(0, -1, 1, 0)  # fixes i but lies outside the group
    assert not in_group(e2d1, s)


def test_parse_preset_errors():
    with pytest.raises(PresetError):
        parse_preset("garbage")
    with pytest.raises(PresetError):
        parse_preset("name x\nkind strip\ngenerator a 2 0 0 0  0 0 0 0  0 0 0 0  1 0 0 0\nhomothety a\n")
    with pytest.raises(PresetError):
        parse_preset("name x\nkind dirichlet\n")
    with pytest.raises(PresetError):
        parse_preset("name x\nkind strip\ngenerator a 1 2 3\n")


def test_parse_preset_minimal_strip():
    p = parse_preset("name hom\nkind strip\ngenerator a 2 0 0 0  0 0 0 0  0 0 0 0  1/2 0 0 0\nhomothety a\n")
    assert p.domain.lam == pytest.approx(2)
    assert reduce_point(p, 16j).word == [("a", -2)]  # alpha scales by 4


def test_parse_preset_inverts_shrinking_homothety():
    p = parse_preset("name hom\nkind strip\ngenerator a 1/2 0 0 0  0 0 0 0  0 0 0 0  2 0 0 0\nhomothety a\n")
    assert p.domain.lam == pytest.approx(2)


def test_gamma61_preset(gamma61):
    assert len(gamma61.letters) == 25
    assert classify(gamma61.domain, gamma61.base_point_default)[0] == Verdict.INTERIOR
    mats = list(gamma61.generators.values())
    for g, h in itertools.combinations(mats, 2):
        assert g != h and g != -h
