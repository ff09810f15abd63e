import json
from itertools import product

import numpy as np
import pytest

from nfdelta.checks import count_instance
from nfdelta.counting import (count_decomposed, count_direct, main_term, m_zero_term, series_deltas,
                              singular_series, zero_count_box)
from nfdelta.expsums import CostBoundExceeded
from nfdelta.forms import CubicForm
from nfdelta.oscillatory import CountingWeight, I_b, singular_integral

P6 = 6.0


@pytest.fixture(scope="module")
def instance():
    return count_instance(P6)


@pytest.fixture(scope="module")
def direct(instance):
    return count_direct(*instance)


@pytest.fixture(scope="module")
def reports(instance, direct):
    F, W = instance
    return [count_decomposed(F, W, tol=t, direct=direct) for t in (3e-2, 1e-3, 1e-4)]


def test_direct_against_loops(instance, direct):
    F, W = instance
    total = 0.0
    for x, y, z in product(range(-4, 12), repeat=3):
        if x ** 3 + y ** 3 - 2 * z ** 3 == 0:
            total += float(W([np.array([x, y, z]) / P6]))
    assert direct == pytest.approx(total, rel=1e-13)
    assert direct == pytest.approx(1.6125117689232158, rel=1e-12)


def test_direct_gaussian_against_loops(Qi):
    F = CubicForm.parse(Qi, "x3+y3-2z3")
    W = CountingWeight.default(F, 3.0, xi=np.ones(3) / np.sqrt(3))
    pts = [complex(a, b) for a in range(-3, 6) for b in range(-3, 6)]
    total = 0.0
    for x, y, z in product(pts, repeat=3):
        if x ** 3 + y ** 3 - 2 * z ** 3 == 0:
            total += float(W([np.array([x, y, z]) / 3.0]))
    assert total > 0
    assert count_direct(F, W) == pytest.approx(total, rel=1e-13)


def test_direct_empty_support():
    F, W = count_instance(1.0)
    assert count_direct(F, W) == 0.0


def test_direct_cost_bound(instance):
    F, W = instance
    with pytest.raises(CostBoundExceeded):
        count_direct(F, W, max_points=10)


def test_decomposition_converges(reports, direct):
    gaps = [r.relative_error for r in reports]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[0] <= 0.05


def test_ledger_recombines(reports):
    for r in reports:
        assert abs(r.recombine() - r.decomposed) <= 1e-10 * abs(r.decomposed)
        assert [e.norm for e in r.ledger] == list(range(1, len(r.ledger) + 1))
        assert r.enum_radius == pytest.approx(P6 * (1 / np.sqrt(3) + 0.25))
    d = json.loads(reports[0].to_json())
    assert d["relative_error"] == pytest.approx(reports[0].relative_error)


def test_doubling_Q(instance, direct, reports):
    F, W = instance
    r = count_decomposed(F, W, Q=2 * P6 ** 1.5, tol=1e-3, direct=direct)
    assert abs(r.decomposed - reports[1].decomposed) <= 0.01 * direct


def test_decomposition_scope(Qi):
    F = CubicForm.parse(Qi, "x3+y3-2z3")
    W = CountingWeight.default(F, 3.0, xi=np.ones(3) / np.sqrt(3))
    with pytest.raises(NotImplementedError):
        count_decomposed(F, W)


def test_I_b_zero_frequency(instance, Q):
    # the b = (1) term carries the singular integral: I(0) = P^n J(0) up to the h error
    F, W = instance
    J = singular_integral(F, W, nodes=128)
    r = I_b(F, W, Q.ideal(1), [0, 0, 0], P6 ** 1.5, nodes=60)
    assert r.value.real == pytest.approx(P6 ** 3 * J, rel=0.03)


def test_singular_series_basics(Q, instance):
    F, _ = instance
    norms, terms, partial = singular_series(F, 30)
    assert norms[0] == 1 and terms[0] == 1.0
    assert all(p > 0 for p in partial)
    assert partial[-1] == pytest.approx(2.94222545062215, rel=1e-9)
    deltas = series_deltas(norms, terms, 30)
    assert np.cumsum(deltas)[-1] == pytest.approx(partial[-1])


def test_main_term_shapes(instance):
    F, W = instance
    norms, terms, partial = singular_series(F, 30)
    J = singular_integral(F, W)
    mt = main_term(F, P6, partial[-1], J)
    assert mt > 0
    assert mt == pytest.approx(partial[-1] * J)
    assert m_zero_term(F, W, 30) == pytest.approx(P6 ** 3 * J * partial[-1])


def test_zero_count_box(Q):
    G = {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): -1}
    count = sum(x * x + y * y == z * z for x, y, z in product(range(-10, 11), repeat=3))
    assert zero_count_box(Q, G, 3, 10) == count
    counts = [zero_count_box(Q, G, 3, 10, c=Q.ideal(c), a=[[1], [0], [1]]) for c in (1, 2, 4)]
    assert counts[0] > counts[1] > counts[2]
    # x, y odd forces x^2 + y^2 = 2 mod 4, which is never a square
    assert zero_count_box(Q, G, 3, 10, c=Q.ideal(4), a=[[1], [1], [0]]) == 0
    with pytest.raises(CostBoundExceeded):
        zero_count_box(Q, G, 3, 1000)
