from fractions import Fraction

import numpy as np
import pytest

from nfdelta.expsums import (CostBoundExceeded, S_b, S_tilde, averaged_bound_tables, binary_cubic_disc,
                             classical_sum_Q, deligne_check, deligne_sample, dual_form_vanishes,
                             dual_nonvanishing_mod_p, gamma_independence, is_nonsingular_mod,
                             multiplicativity_check, ram_identity_check, relation_check,
                             restricted_binary_cubic, squarefree_bound)
from nfdelta.forms import CubicForm
from nfdelta.ideals import primes_above

FERMAT = {(3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1}


@pytest.fixture(scope="module")
def fermat(Q):
    return CubicForm.parse(Q, "x3+y3+z3")


def test_unit_modulus(fermat, Q):
    assert S_b(fermat, Q.unit_ideal, [0, 0, 0]).value == 1
    assert S_tilde(fermat, Q.unit_ideal, [1, 2, 3]).value == 1


def test_fermat_mod_seven(fermat, Q):
    s = S_b(fermat, Q.ideal(7), [0, 0, 0]).value
    assert s == pytest.approx(42)
    assert s == pytest.approx(classical_sum_Q(FERMAT, 7))
    m = [Fraction(1, 7), Fraction(2, 7), 0]
    assert S_b(fermat, Q.ideal(7), m).value == pytest.approx(-7)
    assert classical_sum_Q(FERMAT, 7, [1, 2, 0]) == pytest.approx(-7)


def test_conjugation(fermat, Q):
    m = [Fraction(1, 9), Fraction(4, 9), Fraction(-2, 9)]
    a = S_b(fermat, Q.ideal(9), m).value
    b = S_b(fermat, Q.ideal(9), [-x for x in m]).value
    assert a == pytest.approx(np.conj(b))


def test_relation_and_gamma(fields):
    Qi = fields["Qi"]
    F = CubicForm.parse(Qi, "x3+2y3+3z3+xyz")
    b = Qi.ideal(3)
    lhs, rhs, diff = relation_check(F, b, [Qi([Fraction(1, 6), 0]), Qi([0, Fraction(1, 2)]), Qi(0)])
    assert diff <= 1e-8 * max(1, abs(lhs))
    _, _, diff = gamma_independence(F, b, [Qi([1, 2]), Qi(1), Qi([0, 1])])
    assert diff < 1e-8


def test_inert_prime_direct_paths(Qi):
    F = CubicForm.parse(Qi, "x3+y3-2z3")
    b = Qi.ideal(3)
    a = S_tilde(F, b, [0, 0, 0], method="diagonal").value
    c = S_tilde(F, b, [0, 0, 0], method="direct").value
    assert a == pytest.approx(c, abs=1e-8)
    assert S_b(F, b, [0, 0, 0]).value == pytest.approx(a, abs=1e-8)


def test_multiplicativity_examples(Q, Qi):
    F = CubicForm.parse(Qi, "x3+2y3+3z3+xyz")
    p = Qi.ideal(Qi([1, 1]))
    v = [Qi([1, 1]), Qi(2), Qi([0, 1])]
    lhs, rhs, diff = multiplicativity_check(F, p ** 2, Qi.ideal(3), v)
    assert diff <= 1e-8 * max(1, abs(lhs))
    lhs, rhs, diff = multiplicativity_check(F, Qi.ideal(3), Qi.unit_ideal, v)
    assert diff < 1e-10
    G = CubicForm.parse(Q, "x3+2y3+3z3+xyz")
    lhs, rhs, diff = multiplicativity_check(G, Q.ideal(4), Q.ideal(9), [1, 0, 5])
    assert diff <= 1e-8 * max(1, abs(lhs))


def test_ram_identity(Q, Qi):
    F = CubicForm.parse(Qi, "x3+2y3+3z3+xyz")
    m = [Qi([Fraction(1, 6), 0]), Qi(0), Qi([0, Fraction(1, 2)])]
    lhs, rhs, diff = ram_identity_check(F, Qi.ideal(3), m)
    assert diff <= 1e-6 * max(1, abs(lhs))
    p = Qi.ideal(Qi([1, 1]))
    lhs, rhs, diff = ram_identity_check(F, p ** 2, [0, 0, 0])
    assert diff <= 1e-6 * max(1, abs(lhs))
    G = CubicForm.parse(Q, "x3+y3+z3")
    lhs, rhs, diff = ram_identity_check(G, Q.ideal(5), [Fraction(1, 5), 0, 0])
    assert diff < 1e-10


def test_dual_argument_checked(fermat, Q):
    with pytest.raises(ValueError):
        S_b(fermat, Q.ideal(7), [Fraction(1, 49), 0, 0])
    with pytest.raises(ValueError):
        S_tilde(fermat, Q.ideal(7), [Fraction(1, 2), 0, 0])


def test_cost_bound(Q):
    F = CubicForm.diagonal(Q, [1] * 8)
    with pytest.raises(CostBoundExceeded):
        S_b(F, Q.ideal(97), [0] * 8)


def test_deligne_example(fermat, Q):
    (P,) = primes_above(Q, 7)
    r = deligne_check(fermat, P, [1, 1, 1])
    assert not r.excluded
    assert r.ratio <= 10


def test_deligne_excludes_zero_and_singular(fermat, Q):
    (P,) = primes_above(Q, 7)
    assert deligne_check(fermat, P, [7, 14, 0]).reason == "v = 0 mod p"
    assert deligne_check(fermat, P, [1, 1, 0]).excluded
    (P3,) = primes_above(Q, 3)
    assert deligne_check(fermat, P3, [1, 1, 1]).excluded


def test_deligne_inert_gaussian(Qi):
    F = CubicForm.parse(Qi, "x3+y3+z3")
    (P,) = primes_above(Qi, 7)
    kept, _ = deligne_sample(F, P, count=3, seed=1)
    assert len(kept) == 3
    assert all(r.ratio <= 10 for r in kept)


def test_dual_nonvanishing_against_discriminant(fermat, Q):
    for p in (7, 13):
        (P,) = primes_above(Q, p)
        for v in [(1, 1, 1), (1, 2, 3), (2, 5, 1), (1, -1, 0), (3, 0, 1)]:
            disc = binary_cubic_disc(*restricted_binary_cubic(fermat, v))
            expect = Fraction(disc.coords[0]) % p != 0
            assert dual_nonvanishing_mod_p(fermat, v, P) == expect


def test_dual_nonvanishing_zero_vector(fermat, Q):
    (P,) = primes_above(Q, 7)
    with pytest.raises(ValueError):
        dual_nonvanishing_mod_p(fermat, [7, 0, 0], P)


def test_dual_form_vanishes(fermat):
    # x + y = 0 is the tangent plane at (1, -1, 0): F restricts to z^3
    assert dual_form_vanishes(fermat, [1, 1, 0])
    assert not dual_form_vanishes(fermat, [1, -1, 0])
    assert not dual_form_vanishes(fermat, [1, 1, 1])


def test_nonsingular_scan(Q):
    # x^3 + y^3 + z^3 - 3k xyz is singular exactly when k^3 = 1; here k = -1/3
    hesse = CubicForm.parse(Q, "x3+y3+z3+xyz")
    (P7,) = primes_above(Q, 7)
    (P13,) = primes_above(Q, 13)
    assert not is_nonsingular_mod(hesse, P7)
    assert is_nonsingular_mod(hesse, P13)
    assert not is_nonsingular_mod(CubicForm.parse(Q, "x3+y3+7z3"), P7)


def test_averaged_tables(fermat, Q):
    # over Q the twist by gamma is a unit mod 4, and |S(-v)| = |S(v)|, so the plain sum is an oracle
    (row,) = averaged_bound_tables(fermat, 2, [Q.ideal(4)])
    box = [(a, b, c) for a in range(-2, 3) for b in range(-2, 3) for c in range(-2, 3)]
    oracle = sum(abs(classical_sum_Q(FERMAT, 4, list(v))) for v in box)
    assert row.count == 125
    assert row.lhs == pytest.approx(oracle, rel=1e-9)
    assert row.rhs == pytest.approx(4 ** 2.5 * (2 ** 3 + 4))
    rows = averaged_bound_tables(fermat, 2, [Q.ideal(4), Q.ideal(8), Q.ideal(9)], variant="dual-zero")
    assert all(0 < r.count < 125 and np.isfinite(r.ratio) for r in rows)
    with pytest.raises(CostBoundExceeded):
        averaged_bound_tables(fermat, 30, [Q.ideal(4)])


def test_squarefree_constant(fermat, Q):
    rec = squarefree_bound(fermat, [Q.ideal(7), Q.ideal(13), Q.ideal(91)], [[1, 1, 1], [1, 2, 4]])
    assert rec.rows
    assert rec.C <= 10
