import numpy as np
import pytest

from nfdelta.forms import CubicForm, random_cubic_form


def test_parse_and_evaluate(Q, Qi):
    F = CubicForm.parse(Q, "x3+y3-2z3")
    assert F.n == 3 and F.is_diagonal and F.is_nonsingular_diagonal()
    assert F([1, 1, 1]) == Q(0)
    assert F([2, 0, 1]) == Q(6)
    G = CubicForm.parse(Qi, "(1+i)*x^3 + 2*x*y*z + z^3")
    assert not G.is_diagonal
    assert G([1, 1, 1]) == Qi([4, 1])


def test_rejects_bad_input(Q):
    with pytest.raises(ValueError):
        CubicForm(Q, 2, {(2, 0): 1})
    with pytest.raises(ValueError):
        CubicForm.parse(Q, "7")


def test_gradient_exact(Q):
    F = CubicForm.parse(Q, "x3+2y3+3z3+xyz")
    g = F.gradient([1, 2, 3])
    assert [x.coords[0] for x in g] == [3 + 6, 24 + 3, 81 + 2]


def test_coordinates_agree_with_exact(Q2):
    rng = np.random.default_rng(3)
    F = random_cubic_form(Q2, 3, rng)
    X = rng.integers(-4, 5, size=(5, 3, 2))
    vals = F.eval_coords(X)
    for x, v in zip(X, vals):
        assert tuple(v) == F([Q2(list(c)) for c in x]).coords


def test_place_evaluation(Q2):
    F = CubicForm.parse(Q2, "x3+w*y3-z3")
    x = [Q2([1, 1]), Q2([0, 1]), Q2(2)]
    exact = F(x).embed()
    emb = np.array([[c.embed()[l] for c in x] for l in range(2)])
    for l in range(2):
        assert F.eval_place(emb[l], l) == pytest.approx(exact[l].real)
