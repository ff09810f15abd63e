from fractions import Fraction
from math import pi

import numpy as np
import pytest

from nfdelta.checks import count_instance
from nfdelta.oscillatory import (CountingWeight, I_b, QuadratureError, find_xi, height, height_integral, p_rho,
                                 p_rho_on_grid, plateau, scaling_slope, singular_integral, smooth_step)


@pytest.fixture(scope="module")
def instance():
    return count_instance(6.0)


def test_cutoffs():
    assert smooth_step(-1.0) == 0 and smooth_step(2.0) == 1
    assert smooth_step(0.5) == pytest.approx(0.5)
    assert plateau(0.3) == 1.0 and plateau(1.2) == 0.0


def test_height_examples(Q, Qi):
    assert height(Qi, np.array([0.5 + 0.5j])) == 1.0
    assert height(Qi, np.array([3.0 + 0j])) == pytest.approx(9.0)
    assert height(Qi, Qi(3)) == pytest.approx(9.0)
    assert height(Q, np.array([-4.0])) == 4.0


def test_height_integral_uniform(fields):
    limits = {"Q": 4.0, "Qi": 2 * pi, "Qsqrt2": 16.0}
    for name, lim in limits.items():
        K = fields[name]
        a, b = height_integral(K, -2, 10), height_integral(K, -2, 100)
        assert a < b < lim
    assert height_integral(fields["Q"], -2, 10) == pytest.approx(3.8)
    assert height_integral(fields["Q"], -2, 100) == pytest.approx(3.98)


def test_weight_checks_xi(Q):
    F, W = count_instance(6.0)
    assert W.radius == pytest.approx(1 / np.sqrt(3) + 0.25)
    with pytest.raises(ValueError):
        CountingWeight(F, [np.array([1.0, 0.0, 0.0])])
    xi = find_xi(F)
    assert abs(F.eval_place(xi, 0)) < 1e-10


def test_p_rho_real_at_zero(Q):
    p = p_rho(Q, 0.5, [0.0])
    assert abs(p.imag) < 1e-8
    assert p.real == pytest.approx(-7.148050751196273, rel=1e-6)
    grid = p_rho_on_grid(Q, 0.5, np.array([0.0, 3.3]), 2.0)
    assert grid[0] == pytest.approx(p, rel=1e-4)
    assert grid[1] == pytest.approx(p_rho(Q, 0.5, [3.3]), abs=1e-5)


def test_p_rho_bad_input(Q):
    with pytest.raises(ValueError):
        p_rho(Q, 1.5, [0.0])
    with pytest.raises(QuadratureError):
        p_rho(Q, 0.5, [1e6])


def test_p_rho_log_bound(fields):
    # |p_rho(0)| <= C max(1, |log rho|)^{r1 + r2 - 1} with the constants recorded per field
    C = {"Q": 7.2, "Qi": 38.0, "Qsqrt2": 33.5}
    for name, c in C.items():
        K = fields[name]
        for rho in (0.25, 0.5, 1.0):
            p0 = abs(p_rho(K, rho, [0.0] * K.n_places))
            assert p0 <= c * max(1.0, abs(np.log(rho))) ** (K.r1 + K.r2 - 1)


def test_I_b_conjugate_symmetry(instance, Q):
    F, W = instance
    m = [Fraction(1, 2), Fraction(-1, 4), 1]
    a = I_b(F, W, Q.ideal(2), m, 6.0 ** 1.5)
    b = I_b(F, W, Q.ideal(2), [-x for x in m], 6.0 ** 1.5)
    assert abs(a.value - np.conj(b.value)) < 1e-8


def test_I_b_budget(instance, Q):
    F, W = instance
    with pytest.raises(QuadratureError):
        I_b(F, W, Q.ideal(1), [20, 20, 20], 6.0 ** 1.5)


def test_singular_integral(instance):
    F, W = instance
    J = singular_integral(F, W)
    assert J == pytest.approx(0.0531033, rel=2e-5)
    assert singular_integral(F, W, v=100.0) == 0.0


def test_singular_integral_refinement(instance):
    F, W = instance
    vals = [singular_integral(F, W, nodes=n) for n in (32, 64, 128, 256)]
    steps = np.abs(np.diff(vals))
    assert steps[0] > steps[1] > steps[2]
    assert steps[2] < 1e-6 * vals[-1]


def test_scaling_slope():
    Ps = np.array([10.0, 20.0, 40.0])
    assert scaling_slope(np.log(Ps) ** -4, Ps) == pytest.approx(-4.0)


@pytest.mark.xfail(strict=True, reason="in the tested range the ratio first drops below 1e-3 near height 160/rho")
def test_p_rho_decay_from_10_over_rho():
    from nfdelta.checks import check_pdecay
    res = check_pdecay(factors=(10.0,), start=10.0)
    assert res.passed, res.summary


def test_p_rho_decay_by_160_over_rho():
    from nfdelta.checks import check_pdecay
    res = check_pdecay(factors=(40.0, 160.0), start=160.0)
    assert res.passed, res.summary
    for K in ("Q", "Q(i)", "Q(sqrt(2))"):
        r = [row["ratio"] for row in res.rows if row["field"] == K and row["height"] != 1.0]
        # height 40/rho then 160/rho for each rho: the ratio falls along the ladder
        assert all(a > b for a, b in zip(r[::2], r[1::2]))
