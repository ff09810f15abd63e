from math import pi, sqrt

import numpy as np
import pytest
from scipy import integrate

from nfdelta import ZERO, IdealError, enumerate_ideals
from nfdelta.delta import (DegenerateWindow, DeltaEvaluator, H_profile, RadialBump, averaged_I, c_Q, canonical_w,
                           delta_K, element_poisson_check, field_invariants, h, indicator, k20_closed_form,
                           lemma41_limit, poisson_ideal_check, poisson_kernel, w_over_t_integral)


def _raw(t):
    return np.exp(-1.0 / (1.0 - (4 * t - 3) ** 2))


C_ORACLE = 1.0 / integrate.quad(_raw, 0.5, 1.0, epsabs=1e-14, epsrel=1e-13)[0]


def test_bump_values():
    assert canonical_w(0.4) == 0.0
    assert canonical_w(1.0) == 0.0
    assert canonical_w(0.75) == pytest.approx(C_ORACLE * np.exp(-1), rel=1e-12)
    total = integrate.quad(canonical_w, 0.0, 2.0, points=[0.5, 0.75, 1.0], epsabs=1e-14)[0]
    assert abs(total - 1.0) < 1e-10
    wt = integrate.quad(lambda t: canonical_w(t) / t, 0.5, 1.0, epsabs=1e-14)[0]
    assert w_over_t_integral() == pytest.approx(wt, rel=1e-10)


def test_field_invariants(Q, Qi, Q5):
    fi = field_invariants(Qi)
    assert fi.Delta == pytest.approx(pi / 4)
    assert fi.Upsilon == pytest.approx(-0.25)
    assert field_invariants(Q).Delta == pytest.approx(1.0)
    assert field_invariants(Q5).Delta == pytest.approx(pi / sqrt(5))


def test_invariant_relation(fields):
    for K in fields.values():
        fi = field_invariants(K)
        assert fi.Delta > 0
        assert fi.Upsilon == pytest.approx(-fi.Delta * sqrt(fi.D) / (2 ** K.r1 * (2 * pi) ** K.r2))


def test_cQ_rational_oracle(Q):
    s = sum(canonical_w(m / 10) for m in range(5, 11)) / 10
    assert c_Q(Q, 10) == pytest.approx(1.0 / s, rel=1e-13)
    assert c_Q(Q, 10) == pytest.approx(0.9866924475777751, rel=1e-12)


def test_cQ_gaussian_decreasing(Qi):
    errs = [abs(c_Q(Qi, Q) - 1) for Q in (4, 8, 16)]
    assert errs[0] > errs[1] > errs[2]


def test_cQ_errors(Q, Qi):
    with pytest.raises(IdealError):
        c_Q(Q, 10 ** 7)
    with pytest.raises(ValueError):
        c_Q(Q, 0.5)
    with pytest.raises(DegenerateWindow):
        c_Q(Qi, 2)


def test_h_examples(fields):
    Q = fields["Q"]
    assert h(Q, 1.2, 0.3) == 0.0
    assert h(Q, 0.8, 0.1) == pytest.approx(canonical_w(0.8) / 0.8, rel=1e-13)
    for K in fields.values():
        for x in (0.8, 0.3, 0.05):
            vals = h(K, x, np.linspace(-x / 2, x / 2, 9))
            assert np.ptp(vals) == 0.0


def test_h_rejects_nonpositive_x(Q):
    with pytest.raises(ValueError):
        h(Q, 0.0, 1.0)


def test_H_profile(Q):
    assert H_profile(Q, 0.75) == pytest.approx(w_over_t_integral() - canonical_w(0.75), rel=1e-13)
    # no norm lies in (0.45, 0.9), so the second sum is empty
    assert H_profile(Q, 0.45) == pytest.approx(w_over_t_integral())


def test_h_against_H_profile(Q):
    gaps = []
    for x in (0.2, 0.05, 0.01):
        ys = np.array([0.5, 1.3, 3.0]) * x * 5
        gaps.append(np.max(np.abs(h(Q, x, ys) - H_profile(Q, ys / x) / x)))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3


def test_delta_examples(Q, Qi):
    assert abs(delta_K(Qi, ZERO, 3) - 1) < 1e-8
    assert abs(delta_K(Qi, Qi.ideal(Qi([2, 1])), 3)) < 1e-8
    ev = DeltaEvaluator(Q, 3)
    for m in range(0, 30):
        a = ZERO if m == 0 else Q.ideal(m)
        val = ev(a)
        assert abs(val - indicator(a)) < 1e-8
        assert abs(val.imag) < 1e-8


def test_delta_direct_matches_mobius(Q5):
    ev = DeltaEvaluator(Q5, 3)
    for a in enumerate_ideals(Q5, 12):
        assert abs(ev(a) - ev(a, method="mobius")) < 1e-10


def test_averaged_I_rational_quadrature(Q):
    f = RadialBump(1.0)
    x = 0.4
    val, err = averaged_I(Q, f, x)
    pts = sorted({x * m / 2 for m in range(1, 6)} | {x * m for m in range(1, 3)})
    g = lambda y: float(f(np.array([y]))) * h(Q, x, y)
    oracle = 2 * integrate.quad(g, 0, 1, points=pts, limit=400, epsabs=1e-12)[0]
    assert abs(val - oracle) < 1e-6
    assert err < 1e-4


def test_lemma41_limit(Q, Qi):
    assert lemma41_limit(Q) == 1.0
    assert lemma41_limit(Qi) == pytest.approx(1.0)


def test_averaged_I_bad_x(Q):
    with pytest.raises(ValueError):
        averaged_I(Q, RadialBump(), 1.5)


def test_poisson_rational(Q):
    lhs, main, rel = poisson_ideal_check(Q, R=0.01)
    assert main == pytest.approx(100.0, rel=1e-10)
    assert lhs == pytest.approx(sum(canonical_w(0.01 * m) for m in range(50, 101)), rel=1e-13)
    assert rel < 1e-5


def test_poisson_gaussian(Qi):
    _, _, rel = poisson_ideal_check(Qi, R=0.01)
    assert rel <= 0.05


def test_kernels():
    assert poisson_kernel(1, 0, 0.0) == pytest.approx(2 / sqrt(pi))
    assert poisson_kernel(0, 1, 0.0) == pytest.approx(1.0)
    t = np.array([0.3, 1.0, 2.5])
    assert np.allclose(poisson_kernel(2, 0, t), k20_closed_form(t), rtol=1e-6, atol=1e-8)
    with pytest.raises(ValueError):
        poisson_kernel(1, 1, 0.5)


def test_element_poisson_gaussian(Qi):
    lhs, rhs, rel = element_poisson_check(Qi, lambda t: canonical_w(np.asarray(t) / 40.0), 40.0)
    assert rel <= 0.05
