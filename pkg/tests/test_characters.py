from fractions import Fraction

import numpy as np
import pytest

from nfdelta import alg1_uniformizer, enumerate_ideals
from nfdelta.characters import (admissible_elements, all_characters_distinct, build_primitive_char,
                                char_orthogonality_sum, extend_to_ideal, primitive_char_sum,
                                primitive_char_sum_direct, primitive_char_sum_mobius)
from nfdelta.ideals import denominator_ideal


def test_rational_character(Q):
    sigma = build_primitive_char(Q.ideal(7))
    g = sigma.gamma.coords[0]
    assert g.denominator == 7
    vals = [sigma(Q(x)) for x in range(7)]
    expect = [np.exp(2j * np.pi * g.numerator * x / 7) for x in range(7)]
    assert np.allclose(vals, expect)


def test_certificate_norms(Qi, Q5):
    sigma = build_primitive_char(Qi.ideal(2))
    assert sigma.certificate == Qi.ideal(2) * Qi.different
    assert sigma.certificate.norm == 16
    sigma = build_primitive_char(Q5.ideal(2, Q5([1, 1])))
    assert sigma.certificate.norm == 40
    assert denominator_ideal(sigma.gamma) == sigma.b * Q5.different


def test_orthogonality_examples(Qi):
    b = Qi.ideal(2)
    assert char_orthogonality_sum(b, Qi(2)) == pytest.approx(4)
    assert abs(char_orthogonality_sum(b, Qi(1))) < 1e-12
    assert char_orthogonality_sum(Qi.unit_ideal, Qi([3, 1])) == pytest.approx(1)


def test_periodic_unit_modulus_additive(fields):
    for K in fields.values():
        for b in enumerate_ideals(K, 20)[1:]:
            sigma = build_primitive_char(b)
            R = b.residues
            vals = sigma.values(R)
            assert np.allclose(np.abs(vals), 1.0)
            shifted = sigma.values(R + np.array(b.hnf[0]))
            assert np.allclose(shifted, vals)
            i, j = len(R) // 3, len(R) - 1
            assert sigma.values(R[i] + R[j]) == pytest.approx(vals[i] * vals[j])
            assert sigma.is_primitive()


def test_all_characters_once(fields):
    for K in fields.values():
        for b in enumerate_ideals(K, 16)[1:]:
            assert all_characters_distinct(build_primitive_char(b))


def test_ramanujan_sums(Q):
    b = Q.ideal(7)
    for m in range(1, 30):
        expect = 6 if m % 7 == 0 else -1
        assert primitive_char_sum(b, Q.ideal(m)) == pytest.approx(expect)


def test_primitive_sum_divisible_is_phi(Qi):
    b = Qi.ideal(Qi([1, 1])) ** 2
    assert primitive_char_sum(b, Qi.ideal(4)) == pytest.approx(b.phi)
    direct = primitive_char_sum_direct(b, Qi.unit_ideal)
    assert direct == pytest.approx(primitive_char_sum_mobius(b, Qi.unit_ideal), abs=1e-8)
    assert primitive_char_sum_mobius(b, Qi.unit_ideal) == 0


def test_extend_to_unit_ideal(Qi):
    sigma = build_primitive_char(Qi.ideal(3))
    val, alpha = extend_to_ideal(sigma, Qi.unit_ideal)
    assert abs(abs(val) - 1) < 1e-12


def test_full_sum_over_divisible_ideal(Qi):
    b = Qi.ideal(3)
    a = Qi.ideal(6)
    sigma = build_primitive_char(b)
    _, alpha = extend_to_ideal(sigma, a)
    assert char_orthogonality_sum(b, alpha, sigma) == pytest.approx(b.norm)


def test_independence_of_admissible_element(fields):
    for K in fields.values():
        ideals = [a for a in enumerate_ideals(K, 12) if a.norm > 1]
        for b in ideals[:4]:
            sigma = build_primitive_char(b)
            for a in ideals[:4]:
                al1, al2 = admissible_elements(a, b, 2)
                s1 = primitive_char_sum_direct(b, a, sigma, al1)
                s2 = primitive_char_sum_direct(b, a, sigma, al2)
                assert abs(s1 - s2) < 1e-8


def test_twist_and_exact_angle(Qi):
    b = Qi.ideal(5)
    sigma = build_primitive_char(b)
    tw = sigma.with_twist([2, 0])
    x = Qi([1, 3])
    assert tw(x) == pytest.approx(sigma(x * 2))
    assert tw(x) == pytest.approx(tw.values(np.array([1, 3])))


def test_uniformizer_admissible(Qi):
    a = Qi.ideal(6)
    alpha = alg1_uniformizer(a, a * Qi.ideal(5) * Qi.different)
    assert a.contains(alpha.coords)
    assert not (a * Qi.ideal(Qi([1, 1]))).contains(alpha.coords)
    assert Fraction(alpha.norm()) % 36 == 0
