"""Additive characters modulo an ideal.

A character mod b is x -> e(Tr(a*gamma*x)) where gamma has denominator
ideal exactly b*d.  Traces are evaluated exactly as rationals with a common
denominator, reduced mod 1, and only then exponentiated.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property

import numpy as np

from . import lattice as lt
from .ideals import (
    Ideal,
    IdealError,
    alg1_principalize,
    alg1_uniformizer,
    denominator_ideal,
    divisors,
    is_zero,
    mobius,
    prime_factors,
    small_elements,
)
from .nf import FieldElement, NumberField

TWO_PI = 2.0 * np.pi


class PhaseTable:
    """Exact linear functional x -> Tr(c*x) mod 1 on integer coordinate vectors.

    Stored as an integer vector num and denominator L with Tr(c*x) = num.x / L.
    """

    def __init__(self, K: NumberField, c: FieldElement):
        t = K.trace_functional(c)
        L = lt.common_denominator([t])
        self.L = int(L)
        self.num = np.array([int(x * L) % self.L for x in t], dtype=np.int64)

    def residue(self, X) -> np.ndarray:
        """Integer numerators (num.x mod L) for coordinate arrays (..., d)."""
        X = np.asarray(X, dtype=np.int64)
        return np.mod(X @ self.num, self.L)

    def __call__(self, X) -> np.ndarray:
        return np.exp(1j * TWO_PI * self.residue(X) / self.L)


def exact_phase(x: FieldElement) -> Fraction:
    """Tr(x) mod 1 as a Fraction in [0, 1)."""
    t = x.trace()
    return t - (t.numerator // t.denominator)


def e_frac(q: Fraction) -> complex:
    """exp(2 pi i q) from an exact rational reduced mod 1."""
    r = q - (q.numerator // q.denominator)
    return complex(np.exp(1j * TWO_PI * float(r)))


class AdditiveCharacter:
    """x -> e(Tr(twist * gamma * x)) modulo b.

    gamma = nu/alpha with (alpha) = b d p1 and nu a uniformizer at p1 coprime
    to b d, so that the denominator ideal of gamma is b d.
    """

    def __init__(self, b: Ideal, gamma: FieldElement, alpha=None, nu=None, p1=None, twist=None):
        self.b = b
        self.K = b.K
        self.gamma = gamma
        self.alpha = alpha
        self.nu = nu
        self.p1 = p1
        self.twist = twist if twist is not None else self.K.one

    def with_twist(self, a) -> "AdditiveCharacter":
        a = a if isinstance(a, FieldElement) else FieldElement(self.K, list(a))
        return AdditiveCharacter(self.b, self.gamma, self.alpha, self.nu, self.p1, a)

    @cached_property
    def table(self) -> PhaseTable:
        return PhaseTable(self.K, self.twist * self.gamma)

    def __call__(self, x) -> complex:
        if isinstance(x, FieldElement):
            return e_frac(exact_phase(self.twist * self.gamma * x))
        return complex(self.table(np.asarray(x))[()])

    def values(self, X) -> np.ndarray:
        return self.table(X)

    @cached_property
    def certificate(self) -> Ideal:
        return denominator_ideal(self.gamma)

    def is_primitive(self) -> bool:
        """Not trivial on any b1 with b1 | b, b1 != b; checked on lattice bases."""
        for b1 in divisors(self.b):
            if b1 == self.b:
                continue
            vals = self.values(np.array(b1.hnf, dtype=np.int64))
            if np.allclose(vals, 1.0):
                return False
        return True

    def __repr__(self):
        return f"AdditiveCharacter(b={self.b!r}, gamma={self.gamma!r}, twist={self.twist!r})"


def build_primitive_char(b: Ideal, avoid: Ideal | None = None) -> AdditiveCharacter:
    """Primitive character mod b built from gamma = nu/alpha."""
    K = b.K
    if b.den != 1:
        raise IdealError("modulus must be integral")
    c = b * K.different
    av = b if avoid is None else b * avoid
    alpha, p1 = alg1_principalize(c, avoid=av)
    nu = alg1_uniformizer(p1.ideal, c * p1.ideal)
    gamma = nu / alpha
    if denominator_ideal(gamma) != c:
        raise IdealError("denominator ideal of gamma differs from b*d")
    return AdditiveCharacter(b, gamma, alpha, nu, p1)


def char_orthogonality_sum(b: Ideal, alpha: FieldElement, sigma: AdditiveCharacter | None = None) -> complex:
    """sum over beta mod b of sigma(beta*alpha): all characters mod b evaluated at alpha."""
    sigma = sigma or build_primitive_char(b)
    tab = PhaseTable(b.K, sigma.gamma * alpha)
    return complex(np.sum(tab(b.residues)))


def admissible_elements(a: Ideal, b: Ideal, count: int = 2):
    """Elements alpha of a with ord_P(alpha) = ord_P(a) for all P | a b d."""
    K = a.K
    c = a * b * K.different
    tests = [a * P.ideal for P in prime_factors(c)]
    out = []
    bound = None
    for _ in range(30):
        cands = small_elements(a, bound)
        out = [FieldElement(K, co) for _, co in cands if not any(J.contains(co) for J in tests)]
        if len(out) >= count:
            return out[:count]
        bound = (cands[-1][0] if cands else 1.0) * 4.0
    if not out:
        raise IdealError("no admissible element found")
    return out


def extend_to_ideal(sigma: AdditiveCharacter, a, alpha: FieldElement | None = None):
    """sigma(a) := sigma(alpha) for an admissible alpha; returns (value, alpha)."""
    if is_zero(a):
        return 1.0 + 0j, sigma.K.zero
    if alpha is None:
        alpha = alg1_uniformizer(a, a * sigma.b * sigma.K.different)
    return sigma(alpha), alpha


def primitive_char_sum_direct(b: Ideal, a, sigma: AdditiveCharacter | None = None,
                              alpha: FieldElement | None = None) -> complex:
    """sum over a in (o/b)^* of e(Tr(a*gamma*alpha))."""
    if b == b.K.unit_ideal:
        return 1.0 + 0j
    U = b.unit_residues
    if is_zero(a):
        return complex(len(U))
    sigma = sigma or build_primitive_char(b)
    if alpha is None:
        alpha = alg1_uniformizer(a, a * b * b.K.different)
    tab = PhaseTable(b.K, sigma.gamma * alpha)
    return complex(np.sum(tab(U)))


def primitive_char_sum_mobius(b: Ideal, a) -> int:
    """sum over c | b of mu(b/c) N(c) [c | a]."""
    total = 0
    for c in divisors(b):
        if is_zero(a) or c.divides(a):
            total += mobius(b / c) * int(c.norm)
    return total


def primitive_char_sum(b: Ideal, a, sigma=None) -> complex:
    """Primitive sum, computed directly and checked against the Moebius formula."""
    direct = primitive_char_sum_direct(b, a, sigma)
    mob = primitive_char_sum_mobius(b, a)
    if abs(direct - mob) > 1e-6 * max(1.0, float(b.norm)):
        raise ArithmeticError(f"primitive sum mismatch: {direct} vs {mob}")
    return direct


def all_characters_distinct(sigma: AdditiveCharacter) -> bool:
    """x -> sigma(beta x), beta mod b, gives N(b) distinct characters."""
    b = sigma.b
    R = b.residues
    tabs = set()
    for beta in R:
        t = PhaseTable(b.K, sigma.gamma * FieldElement(b.K, beta.tolist()))
        tabs.add(tuple(Fraction(int(r), t.L) for r in t.residue(R)))
    return len(tabs) == len(R)

