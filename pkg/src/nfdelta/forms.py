"""Cubic forms with coefficients in the ring of integers."""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product

import numpy as np
import sympy

from .nf import FieldElement, NumberField


def mul_table_array(K: NumberField) -> np.ndarray:
    """T[i, j, k] = k-th coordinate of omega_i * omega_j (integers)."""
    T = K.mult_table
    return np.array([[[int(c) for c in T[i][j]] for j in range(K.degree)] for i in range(K.degree)],
                    dtype=np.int64)


def mul_coords(T: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Product of integer coordinate arrays (..., d) under the table T."""
    return np.einsum("...i,...j,ijk->...k", x, y, T)


class CubicForm:
    """F(x_1..x_n) = sum over monomials of c_e x^e with c_e in o."""

    def __init__(self, K: NumberField, n: int, terms: dict, names=None):
        self.K = K
        self.n = int(n)
        self.terms = {}
        for e, c in terms.items():
            e = tuple(int(k) for k in e)
            if len(e) != self.n or sum(e) != 3:
                raise ValueError(f"monomial {e} is not cubic in {self.n} variables")
            c = c if isinstance(c, FieldElement) else K(c)
            if not c.is_integral():
                raise ValueError("coefficients must be integral")
            if c:
                self.terms[e] = c
        self.names = list(names) if names else [f"x{i + 1}" for i in range(self.n)]

    # construction ------------------------------------------------------------
    @classmethod
    def diagonal(cls, K: NumberField, coeffs):
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 3
            terms[tuple(e)] = c
        return cls(K, n, terms)

    @classmethod
    def parse(cls, K: NumberField, text: str):
        """Parse forms such as 'x3+y3-2z3', 'x^3+y^3+z^3' or '2*x*y*z + (1+i)*z^3'."""
        src = text.replace(" ", "")
        gen = K.gen_name
        letters = sorted({ch for ch in re.findall(r"[a-zA-Z]", src)} - {gen})
        if not letters:
            raise ValueError(f"no variables in form '{text}'")
        # x3 -> x**3, 2z3 -> 2*z**3
        s = re.sub(r"([a-zA-Z])(\d+)", r"\1**\2", src)
        s = re.sub(r"(\d|\))([a-zA-Z(])", r"\1*\2", s)
        s = re.sub(r"([a-zA-Z])(?=[a-zA-Z(])", r"\1*", s)
        s = s.replace("^", "**")
        syms = {ch: sympy.Symbol(ch) for ch in letters}
        g = sympy.Symbol(gen)
        syms[gen] = g
        expr = sympy.expand(sympy.sympify(s, locals=syms))
        vars_ = [syms[ch] for ch in letters]
        poly = sympy.Poly(expr, *vars_)
        terms = {}
        for mon, coeff in poly.terms():
            terms[tuple(mon)] = K.parse_element(str(coeff))
        return cls(K, len(letters), terms, names=letters)

    # structure ------------------------------------------------------------------
    @property
    def is_diagonal(self) -> bool:
        return all(sorted(e)[-1] == 3 for e in self.terms)

    def diagonal_coeffs(self):
        if not self.is_diagonal:
            raise ValueError("form is not diagonal")
        out = [self.K.zero] * self.n
        for e, c in self.terms.items():
            out[e.index(3)] = c
        return out

    def is_nonsingular_diagonal(self) -> bool:
        return self.is_diagonal and all(bool(c) for c in self.diagonal_coeffs())

    def __repr__(self):
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mon = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(self.names, e) if k)
            parts.append(f"({c!r})*{mon}")
        return " + ".join(parts)

    # exact evaluation ----------------------------------------------------------
    def __call__(self, xs) -> FieldElement:
        xs = [x if isinstance(x, FieldElement) else self.K(x) for x in xs]
        total = self.K.zero
        for e, c in self.terms.items():
            t = c
            for x, k in zip(xs, e):
                for _ in range(k):
                    t = t * x
            total = total + t
        return total

    def gradient(self, xs):
        xs = [x if isinstance(x, FieldElement) else self.K(x) for x in xs]
        out = [self.K.zero] * self.n
        for e, c in self.terms.items():
            for i in range(self.n):
                if e[i] == 0:
                    continue
                t = c * e[i]
                for j, (x, k) in enumerate(zip(xs, e)):
                    kk = k - 1 if j == i else k
                    for _ in range(kk):
                        t = t * x
                out[i] = out[i] + t
        return out

    # coordinate evaluation --------------------------------------------------
    def gradient_terms(self):
        """Partial derivatives as lists of monomial dicts (one per variable)."""
        out = []
        for i in range(self.n):
            d = {}
            for e, c in self.terms.items():
                if e[i]:
                    e2 = list(e)
                    e2[i] -= 1
                    d[tuple(e2)] = d.get(tuple(e2), self.K.zero) + c * e[i]
            out.append(d)
        return out

    def eval_coords(self, X: np.ndarray, modulus=None) -> np.ndarray:
        """F at integer coordinate arrays X of shape (..., n, d); optional reduction mod an ideal."""
        return eval_terms_coords(self.K, self.terms, X, modulus)

    # real / complex avatars ------------------------------------------------------
    def place_coeffs(self, l: int) -> dict:
        return {e: complex(c.embed()[l]) for e, c in self.terms.items()}

    def eval_place(self, x, l: int):
        """F^{(l)}(x) for arrays x of shape (..., n) at place l."""
        x = np.asarray(x)
        out = 0
        real = l < self.K.r1
        for e, c in self.place_coeffs(l).items():
            t = c.real if real else c
            for i, k in enumerate(e):
                if k:
                    t = t * x[..., i] ** k
            out = out + t
        return out

    def grad_place(self, x, l: int):
        x = np.asarray(x)
        real = l < self.K.r1
        out = [0] * self.n
        for e, c in self.place_coeffs(l).items():
            c = c.real if real else c
            for i in range(self.n):
                if e[i] == 0:
                    continue
                t = c * e[i]
                for j, k in enumerate(e):
                    kk = k - 1 if j == i else k
                    if kk:
                        t = t * x[..., j] ** kk
                out[i] = out[i] + t
        return np.stack([np.broadcast_to(np.asarray(g), x.shape[:-1]) for g in out], axis=-1)

    def rational_coeffs(self):
        """Integer coefficient dict for forms over Q."""
        if self.K.degree != 1:
            raise ValueError("form is not over Q")
        return {e: int(c.coords[0]) for e, c in self.terms.items()}


def eval_terms_coords(K: NumberField, terms: dict, X, modulus=None) -> np.ndarray:
    """Evaluate sum c_e x^e on coordinate arrays X (..., n, d), reducing mod an ideal if given."""
    T = mul_table_array(K)
    X = np.asarray(X, dtype=np.int64)
    red = modulus.reduce if modulus is not None else (lambda A: A)
    shape = X[..., 0, :].shape
    n = X.shape[-2]
    top = max((max(e) for e in terms), default=0)
    one = np.broadcast_to(np.array([int(c) for c in K.one.coords], dtype=np.int64), shape)
    powers = []
    for i in range(n):
        xi = red(X[..., i, :])
        pw = [one, xi]
        for _ in range(2, top + 1):
            pw.append(red(mul_coords(T, pw[-1], xi)))
        powers.append(pw)
    out = np.zeros(shape, dtype=np.int64)
    for e, c in terms.items():
        t = np.broadcast_to(np.array([int(x) for x in c.coords], dtype=np.int64), shape)
        for i, k in enumerate(e):
            if k:
                t = red(mul_coords(T, t, powers[i][k]))
        out = out + t
    return red(out)


def all_monomials(n: int):
    return [e for e in product(range(4), repeat=n) if sum(e) == 3]


def random_cubic_form(K: NumberField, n: int, rng, height: int = 3) -> CubicForm:
    terms = {}
    for e in all_monomials(n):
        terms[e] = K([int(rng.integers(-height, height + 1)) for _ in range(K.degree)])
    return CubicForm(K, n, terms)


def as_fraction_vector(v):
    return [Fraction(x) for x in v]
