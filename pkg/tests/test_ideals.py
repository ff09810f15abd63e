import numpy as np
import pytest

from nfdelta import (Ideal, IdealError, alg1_principalize, alg1_uniformizer, denominator_ideal, dual_ideal,
                     enumerate_ideals, factor_ideal, ideal_counts, primes_above, squarefree_squarefull_split)
from nfdelta.ideals import (divisors, kronecker, mobius, prime_factors, principal_generator, primes_up_to,
                            valuation)


def test_ramified_square(Qi):
    p = Qi.ideal(Qi([1, 1]))
    assert p * p == Qi.ideal(2)


def test_nonprincipal_square(Q5):
    p = Q5.ideal(2, Q5([1, 1]))
    assert principal_generator(p) is None
    assert p * p == Q5.ideal(2)


def test_residues_mod_two(Qi):
    R = Qi.ideal(2).residues
    assert sorted(map(tuple, R.tolist())) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_factor_split_prime(Qi):
    fac = factor_ideal(Qi.ideal(5))
    assert [(P.norm, e) for P, e in fac] == [(5, 1), (5, 1)]
    gens = {P.ideal for P, _ in fac}
    assert gens == {Qi.ideal(Qi([2, 1])), Qi.ideal(Qi([2, -1]))}


def test_factor_inert_prime(Qi):
    fac = factor_ideal(Qi.ideal(3))
    assert len(fac) == 1
    P, e = fac[0]
    assert (P.norm, P.f, e) == (9, 2, 1)


def test_factor_ramified(Q5):
    fac = factor_ideal(Q5.ideal(2))
    assert len(fac) == 1
    P, e = fac[0]
    assert e == 2 and P.ideal == Q5.ideal(2, Q5([1, 1]))


def test_different(Q, Qi, Q5):
    assert Q.different == Q.unit_ideal
    assert Qi.different == Qi.ideal(Qi([0, 2]))
    assert Qi.different.norm == 4
    assert Q5.different.norm == 20
    a = Q.ideal(6)
    assert dual_ideal(a) == a.inverse()


def test_denominator_ideal(Q, Qi):
    from fractions import Fraction
    assert denominator_ideal(Q(Fraction(1, 2))) == Q.ideal(2)
    assert denominator_ideal(Qi([1, 1]).inverse()) == Qi.ideal(Qi([1, 1]))
    assert denominator_ideal(Qi([5, -3])) == Qi.unit_ideal


def test_uniformizer_examples(Qi, Q5):
    assert alg1_uniformizer(Qi.unit_ideal, Qi.ideal(7)) == Qi.one
    b = Qi.ideal(Qi([1, 1])) ** 2
    alpha = alg1_uniformizer(b, Qi.ideal(2))
    assert alpha.coords == (2, 0)
    p = Q5.ideal(2, Q5([1, 1]))
    alpha = alg1_uniformizer(p, p)
    assert alpha.coords == (1, 1)
    (P, _), = factor_ideal(p)
    assert valuation(P, alpha) == 1


def test_principalize_two(Q5):
    b = Q5.ideal(2, Q5([1, 1]))
    alpha, P = alg1_principalize(b)
    assert alpha.coords == (1, -1)
    assert P.ideal == Q5.ideal(3, Q5([1, -1]))
    assert Ideal.principal(Q5, alpha) == b * P.ideal


def test_principalize_three(Q5):
    # the companion prime must be unramified, so (2, 1+w) is not admissible; (3, 1-w) is
    b = Q5.ideal(3, Q5([1, 1]))
    alpha, P = alg1_principalize(b)
    assert P.unramified and P.norm == 3
    assert P.ideal == Q5.ideal(3, Q5([1, -1]))
    assert Ideal.principal(Q5, alpha) == b * P.ideal


def test_principalize_class_number_one(Qi):
    b = Qi.ideal(Qi([2, 1]))
    alpha, P = alg1_principalize(b, avoid=Qi.ideal(3))
    assert P.norm == 5 and P.ideal != b
    assert Ideal.principal(Qi, alpha) == b * P.ideal


def test_ideal_counts(fields):
    for K in fields.values():
        assert ideal_counts(K, 10)[1] == 1
    a = ideal_counts(fields["Qi"], 10)
    assert a[5] == 2 and a[3] == 0 and a[9] == 1
    assert list(a) == [0, 1, 1, 0, 1, 2, 0, 0, 1, 1, 2]


def test_enumeration_matches_counts(fields):
    for K in fields.values():
        ideals = enumerate_ideals(K, 60)
        assert len(set(ideals)) == len(ideals)
        counts = np.bincount([int(a.norm) for a in ideals], minlength=61)
        assert np.array_equal(counts, ideal_counts(K, 60))


def test_enumeration_bound(Q):
    with pytest.raises(IdealError):
        enumerate_ideals(Q, 10 ** 7)


def test_squarefree_split(Q, Qi):
    b1, b2 = squarefree_squarefull_split(Q.ideal(12))
    assert (b1, b2) == (Q.ideal(3), Q.ideal(4))
    p = Qi.ideal(Qi([1, 1]))
    b1, b2 = squarefree_squarefull_split(p ** 3 * Qi.ideal(3))
    assert (b1, b2) == (Qi.ideal(3), p ** 3)
    b1, b2 = squarefree_squarefull_split(Qi.ideal(15))
    assert b2 == Qi.unit_ideal


def test_mobius_and_divisors(Qi):
    assert mobius(Qi.ideal(5)) == 1
    assert mobius(Qi.ideal(2)) == 0
    assert mobius(Qi.ideal(3)) == -1
    assert len(divisors(Qi.ideal(10))) == 3 * 2 * 2


def test_kronecker_splitting(Q5):
    assert kronecker(-20, 3) == 1
    assert [P.norm for P in primes_above(Q5, 3)] == [3, 3]
    assert [P.norm for P in primes_above(Q5, 11)] == [121]
    norms = [P.norm for P in primes_up_to(Q5, 30)]
    assert norms == sorted(norms)


def test_prime_factors_of_product(Q2):
    a = Q2.ideal(Q2([3, 1])) * Q2.ideal(7)
    prod = Q2.unit_ideal
    for P, e in factor_ideal(a):
        prod = prod * P.ideal ** e
    assert prod == a
    assert all(P.ideal.divides(a) for P in prime_factors(a))
