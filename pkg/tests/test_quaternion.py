import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fuchsian_codes.errors import NormMismatch, UnsupportedField
from fuchsian_codes.exactfield import SQRT3, TowerElement
from fuchsian_codes.matrices import GroupMatrix
from fuchsian_codes.quaternion import (
    AlgebraParams,
    Quaternion,
    embed_phi,
    psi_d,
    pure_quaternion,
    pure_quaternion_solutions,
    reduced_norm,
    reduced_trace,
)

small = st.fractions(min_value=-20, max_value=20, max_denominator=6)
quats = st.builds(Quaternion, small, small, small, small)
ONE = Quaternion(1)
I = Quaternion(0, 1)
J = Quaternion(0, 0, 1)
K = Quaternion(0, 0, 0, 1)


def test_basis_relations():
    assert I * I == Quaternion(3)
    assert J * J == Quaternion(-1)
    assert I * J == K
    assert J * I == -K


def test_reduced_norm_examples():
    assert reduced_norm(ONE) == 1
    assert reduced_norm(Quaternion(2, 1)) == 1
    assert reduced_norm(K) == -3


def test_reduced_trace_examples():
    assert reduced_trace(ONE) == 2
    assert reduced_trace(Quaternion(2, 1)) == 4
    assert reduced_trace(K) == 0


def test_embed_phi_examples():
    assert embed_phi(ONE).is_identity()
    g = embed_phi(Quaternion(2, 1))
    assert g == GroupMatrix.diagonal(TowerElement(2, 0, 1))
    g = embed_phi(Quaternion(2, 0, 3, 2))
    assert g == GroupMatrix(TowerElement(2), 3 + 2 * SQRT3, -(3 - 2 * SQRT3), TowerElement(2))
    assert g.det == TowerElement(1)


def test_embed_phi_unsupported_field():
    with pytest.raises(UnsupportedField):
        embed_phi(Quaternion(1, 1, algebra=AlgebraParams(5, -1)))
    for a in (2, 6):
        embed_phi(Quaternion(1, 1, 1, 1, algebra=AlgebraParams(a, -1)))


def test_algebra_params_validate():
    with pytest.raises(ValueError):
        AlgebraParams(0, 1)


@settings(max_examples=200)
@given(quats)
def test_norm_is_determinant_and_trace(q):
    g = embed_phi(q)
    assert g.det == TowerElement(reduced_norm(q))
    assert g.trace() == TowerElement(reduced_trace(q))
    assert q * q.conjugate() == Quaternion(reduced_norm(q))
    assert q.conjugate().conjugate() == q


@settings(max_examples=100)
@given(quats, quats)
def test_embed_phi_is_ring_homomorphism(p, q):
    assert embed_phi(p + q) == GroupMatrix(*(x + y for x, y in zip(embed_phi(p).entries(), embed_phi(q).entries())))
    assert embed_phi(p * q) == embed_phi(p) @ embed_phi(q)


def test_pure_solutions_examples():
    assert (1, 0, 0) in pure_quaternion_solutions(3, 2)
    assert (1, 0, 1) in pure_quaternion_solutions(6, 2)
    assert pure_quaternion_solutions(1, 50) == []


def test_pure_solutions_complete_and_sorted():
    box = 4
    sols = pure_quaternion_solutions(6, box)
    assert sols == sorted(sols)
    brute = [s for s in itertools.product(range(-box, box + 1), repeat=3)
             if 3 * s[0] ** 2 - s[1] ** 2 + 3 * s[2] ** 2 == 6]
    assert sols == brute
    for s in sols:
        assert reduced_norm(pure_quaternion(s)) == -6


def test_psi_examples():
    assert psi_d(3, I, 1) == Quaternion(2, 1)
    q = psi_d(3, I, 2)
    assert q == Quaternion(7, 4) and reduced_norm(q) == 1
    assert psi_d(6, pure_quaternion((1, 0, 1)), 0) == ONE


def test_psi_norm_mismatch():
    with pytest.raises(NormMismatch):
        psi_d(3, J, 1)
    with pytest.raises(NormMismatch):
        psi_d(3, Quaternion(1, 1), 1)


def _psi_images(d, box=3, ms=range(1, 7)):
    return [psi_d(d, pure_quaternion(s), m) for s in pure_quaternion_solutions(d, box) for m in ms]


def test_psi_injective():
    imgs = _psi_images(3)
    assert len(imgs) > 0
    assert len({q.coords() for q in imgs}) == len(imgs)
    assert all(reduced_norm(q) == 1 for q in imgs)


def test_psi_images_do_not_overlap():
    a = {q.coords() for q in _psi_images(3)}
    b = {q.coords() for q in _psi_images(6)}
    assert a and b and not (a & b)


def test_quaternion_power():
    q = Quaternion(Fraction(1, 2), 1, -1, 2)
    assert q ** 3 == q * q * q
    assert q ** 0 == ONE
