import json
from fractions import Fraction

import numpy as np
import pytest

from nfdelta import (FieldError, field_from_config, field_from_name, field_from_quadratic, unit_reduce, vnorm,
                     vtrace)


def test_gaussian_field_data(Qi):
    assert (Qi.degree, Qi.r1, Qi.r2, abs(Qi.disc)) == (2, 0, 1, 4)
    assert Qi.class_number == 1
    assert Qi.roots_of_unity == 4


def test_sqrt_minus5_class_group(Q5):
    assert abs(Q5.disc) == 20
    assert Q5.class_number == 2
    reps = Q5.class_reps
    assert reps[0] == Q5.unit_ideal
    assert reps[1] == Q5.ideal(2, Q5([1, 1]))


def test_sqrt2_unit(Q2):
    assert (Q2.r1, Q2.r2) == (2, 0)
    (eps,) = Q2.fundamental_units
    assert eps.coords == (1, 1)
    assert eps.norm() == -1


def test_embed_examples(Qi, Q2):
    a = Qi([3, 4])
    assert np.allclose(a.embed(), [3 + 4j])
    assert a.norm() == 25 and a.trace() == 6
    assert vnorm(Qi, a.embed()) == pytest.approx(25)
    assert vtrace(Qi, a.embed()) == pytest.approx(6)
    one = Q2.one
    assert np.allclose(one.embed(), [1, 1])
    assert one.trace() == 2
    u = Q2([1, 1])
    assert np.allclose(u.embed(), [1 + np.sqrt(2), 1 - np.sqrt(2)])
    assert vnorm(Q2, u.embed()) == pytest.approx(-1)


def test_unit_reduce_rank_zero(Qi):
    v = np.array([0.3 + 7j])
    u, w = unit_reduce(Qi, v)
    assert u == Qi.one
    assert np.allclose(w, v)


def test_unit_reduce_power_of_unit(Q2):
    eps = Q2([1, 1])
    u, w = unit_reduce(Q2, (eps ** 5).embed())
    assert abs(u.norm()) == 1
    assert np.allclose(np.abs(w), 1.0)
    assert np.allclose(w, u.embed() * (eps ** 5).embed())


def test_unit_reduce_balanced_is_fixed(Q2):
    u, w = unit_reduce(Q2, np.array([2.0, 2.0]))
    assert abs(u.coords[0]) == 1 and u.coords[1] == 0


def test_unit_reduce_zero_norm(Q2):
    with pytest.raises(FieldError):
        unit_reduce(Q2, np.array([0.0, 1.0]))


def test_bad_quadratic():
    with pytest.raises(FieldError):
        field_from_quadratic(12)
    with pytest.raises(FieldError):
        field_from_quadratic(1)
    with pytest.raises(FieldError):
        field_from_quadratic(-51)


def test_names():
    assert field_from_name("Q(i)").disc == -4
    assert field_from_name("Qsqrt-5").disc == -20
    with pytest.raises(FieldError):
        field_from_name("Q(zeta7)")


def test_config_roundtrip(tmp_path):
    cfg = {"name": "Q(sqrt(-2))", "min_poly": [1, 0, 2], "disc": -8, "class_number": 1,
           "class_reps": [[[1, 0]]], "fundamental_units": [], "roots_of_unity": 2, "regulator": 1.0}
    path = tmp_path / "f.json"
    path.write_text(json.dumps(cfg))
    K = field_from_config(str(path))
    assert K.disc == -8 and K.r2 == 1 and K.class_number == 1
    with pytest.raises(FieldError):
        field_from_config(dict(cfg, disc=-7))
    with pytest.raises(FieldError):
        field_from_config(str(tmp_path / "missing.json"))


def test_inverse_and_fractions(Q5):
    a = Q5([1, 1])
    b = a.inverse()
    assert a * b == Q5.one
    assert (a / 2).coords == (Fraction(1, 2), Fraction(1, 2))
