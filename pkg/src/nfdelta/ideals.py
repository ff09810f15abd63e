"""Ideals of the ring of integers as full-rank lattices in canonical (HNF) form.

An ideal is stored as an upper triangular integer matrix H together with a
positive denominator, the lattice being spanned by the rows of H / den in
coordinates over the integral basis.  Equal ideals give identical (H, den).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, log, pi, factorial

import numpy as np
import sympy

from . import lattice as lt
from .nf import ClassData, FieldElement, FieldError, NumberField, fundamental_unit_quadratic

FACTOR_BOUND = 10 ** 9
ENUM_BOUND = 10 ** 6


class IdealError(ValueError):
    pass


class ZeroIdeal:
    """The zero ideal; only used as an argument of the delta symbol."""

    norm = 0

    def __repr__(self):
        return "(0)"

    def __eq__(self, other):
        return isinstance(other, ZeroIdeal)

    def __hash__(self):
        return 0


ZERO = ZeroIdeal()


def is_zero(a) -> bool:
    return isinstance(a, ZeroIdeal)


def _int_mul(K: NumberField, x, y):
    """Product of two integer coordinate vectors."""
    T = K.mult_table
    d = K.degree
    out = [0] * d
    for i in range(d):
        xi = x[i]
        if xi:
            for j in range(d):
                c = xi * y[j]
                if c:
                    Tij = T[i][j]
                    for k in range(d):
                        out[k] += c * Tij[k]
    return out


class Ideal:
    __slots__ = ("K", "hnf", "den", "__dict__")

    def __init__(self, K: NumberField, hnf, den: int = 1):
        self.K = K
        self.hnf = tuple(tuple(int(x) for x in r) for r in hnf)
        self.den = int(den)

    # construction ------------------------------------------------------------
    @classmethod
    def from_rows(cls, K: NumberField, rows) -> "Ideal":
        h, den = lt.rational_hnf(rows, K.degree)
        return cls(K, h, den)

    @classmethod
    def from_generators(cls, K: NumberField, gens) -> "Ideal":
        rows = []
        for g in gens:
            if not isinstance(g, FieldElement):
                g = K(g)
            if g:
                rows.extend(g.mult_matrix())
        if not rows:
            raise IdealError("the zero ideal has no lattice form")
        return cls.from_rows(K, rows)

    @classmethod
    def principal(cls, K: NumberField, g) -> "Ideal":
        return cls.from_generators(K, [g])

    # basic data ----------------------------------------------------------------
    @cached_property
    def norm(self) -> Fraction:
        det = 1
        for i, r in enumerate(self.hnf):
            det *= r[i]
        return Fraction(det, self.den ** self.K.degree)

    @property
    def is_integral(self) -> bool:
        return self.den == 1

    @property
    def key(self):
        return (self.hnf, self.den)

    def rows(self):
        """Rational basis rows."""
        return [[Fraction(x, self.den) for x in r] for r in self.hnf]

    def basis_elements(self):
        return [FieldElement(self.K, r) for r in self.rows()]

    def __eq__(self, other):
        return isinstance(other, Ideal) and other.K is self.K and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return (self.norm, self.key) < (other.norm, other.key)

    def _check(self, other):
        if not isinstance(other, Ideal):
            raise IdealError("expected an ideal")
        if other.K is not self.K:
            raise IdealError("ideals of different fields")

    # arithmetic ----------------------------------------------------------------
    def __mul__(self, other) -> "Ideal":
        if isinstance(other, FieldElement):
            other = Ideal.principal(self.K, other)
        self._check(other)
        rows = [_int_mul(self.K, a, b) for a in self.hnf for b in other.hnf]
        h = lt.hnf(rows, self.K.degree)
        den = self.den * other.den
        g = den
        for r in h:
            for x in r:
                g = gcd(g, x)
        return Ideal(self.K, [[x // g for x in r] for r in h], den // g)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Ideal":
        if k < 0:
            return self.inverse() ** (-k)
        out = self.K.unit_ideal
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __add__(self, other) -> "Ideal":
        """Sum of ideals (the gcd)."""
        self._check(other)
        return Ideal.from_rows(self.K, self.rows() + other.rows())

    def gcd(self, other) -> "Ideal":
        return self + other

    def intersection(self, other) -> "Ideal":
        self._check(other)
        da = lt.dual_basis(self.rows())
        db = lt.dual_basis(other.rows())
        h, den = lt.rational_hnf(da + db, self.K.degree)
        s = [[Fraction(x, den) for x in r] for r in h]
        return Ideal.from_rows(self.K, lt.dual_basis(s))

    lcm = intersection

    def inverse(self) -> "Ideal":
        cols = []
        for g in self.basis_elements():
            cols.extend(lt.transpose(g.mult_matrix()))
        h, den = lt.rational_hnf(cols, self.K.degree)
        L = [[Fraction(x, den) for x in r] for r in h]
        return Ideal.from_rows(self.K, lt.dual_basis(L))

    def __truediv__(self, other) -> "Ideal":
        if isinstance(other, FieldElement):
            other = Ideal.principal(self.K, other)
        return self * other.inverse()

    def contains(self, x) -> bool:
        if isinstance(x, Ideal):
            return all(self.contains(r) for r in x.rows())
        coords = x.coords if isinstance(x, FieldElement) else x
        y = [Fraction(c) * self.den for c in coords]
        return lt.solve_upper(self.hnf, y) is not None

    __contains__ = contains

    def divides(self, other) -> bool:
        """self | other, i.e. other is contained in self."""
        if is_zero(other):
            return True
        if isinstance(other, FieldElement):
            return self.contains(other)
        return self.contains(other)

    def is_coprime(self, other) -> bool:
        return (self + other) == self.K.unit_ideal

    # residues ----------------------------------------------------------------------
    def _need_integral(self):
        if self.den != 1:
            raise IdealError("residues need an integral ideal")

    @cached_property
    def residues(self) -> np.ndarray:
        """Box representatives of o / self: array of shape (N, d), lexicographic."""
        self._need_integral()
        diag = [self.hnf[i][i] for i in range(self.K.degree)]
        grids = np.indices(diag).reshape(len(diag), -1).T
        return np.ascontiguousarray(grids, dtype=np.int64)

    def reduce(self, X) -> np.ndarray:
        """Reduce integer coordinate vectors (..., d) into the residue box."""
        self._need_integral()
        X = np.array(X, dtype=np.int64, copy=True)
        for i, r in enumerate(self.hnf):
            q = np.floor_divide(X[..., i], r[i])
            X -= q[..., None] * np.asarray(r, dtype=np.int64)
        return X

    def contains_array(self, X) -> np.ndarray:
        R = self.reduce(X)
        return ~np.any(R, axis=-1)

    @cached_property
    def unit_residues(self) -> np.ndarray:
        """Representatives of (o/self)^*."""
        R = self.residues
        keep = np.ones(len(R), dtype=bool)
        for P, _ in factor_ideal(self):
            keep &= ~P.ideal.contains_array(R)
        return R[keep]

    @cached_property
    def phi(self) -> int:
        n = int(self.norm)
        for P, e in factor_ideal(self):
            n = n // P.norm * (P.norm - 1)
        return n

    @cached_property
    def min_integer(self) -> int:
        """Smallest positive rational integer in an integral ideal."""
        self._need_integral()
        N = int(self.norm)
        one = self.K.one
        for k in sorted(sympy.divisors(N)):
            if self.contains(one * k):
                return k
        return N

    def __repr__(self):
        if self.den != 1:
            return f"({self.numerator_repr()})/{self.den}"
        return self.numerator_repr()

    def numerator_repr(self):
        J = Ideal(self.K, self.hnf, 1)
        m = J.min_integer
        one = self.K.one
        if J == Ideal.principal(self.K, one * m):
            return f"({m})"
        for _, c in small_elements(J, limit=64):
            g = FieldElement(self.K, c)
            if Ideal.from_generators(self.K, [one * m, g]) == J:
                if abs(g.norm()) == J.norm:
                    return f"({g!r})"
                return f"({m}, {g!r})"
        return f"<{[list(r) for r in self.hnf]}>"


# ---------------------------------------------------------------------------
# short elements, principality

def _t2(K, coords) -> float:
    v = K.embed(coords)
    return float(np.sum(K.place_weights * np.abs(v) ** 2))


def small_elements(I: Ideal, bound: float | None = None, limit: int | None = None):
    """Nonzero elements of I with T2 <= bound, in canonical order.

    The order is (T2, then coordinates in decreasing lexicographic order), so
    that e.g. 2 precedes -2 and 1+w precedes -1-w.
    """
    K = I.K
    rows = I.rows()
    gram = K.t2_gram(rows)
    if bound is None:
        bound = max(K.degree * float(I.norm) ** (2.0 / K.degree), 1.0) * 4.0
    while True:
        vecs = lt.short_vectors(gram, bound)
        if limit is None or len(vecs) >= limit or bound > 1e12:
            break
        bound *= 2.0
    out = []
    for val, c in vecs:
        coords = tuple(sum(Fraction(ci) * r[k] for ci, r in zip(c, rows)) for k in range(K.degree))
        out.append((round(val, 9), coords))
    out.sort(key=lambda t: (t[0], tuple(-x for x in t[1])))
    return out


def principal_generator(I: Ideal):
    """A generator of I if principal, else None."""
    K = I.K
    if K.class_data is not None and K.class_number == 1:
        pass
    scale = I.den
    J = I * K(scale) if scale != 1 else I
    N = J.norm
    c = K.unit_reduction_constant
    bound = K.degree * c * c * float(N) ** (2.0 / K.degree) * (1 + 1e-9) + 1e-9
    for _, coords in small_elements(J, bound):
        g = FieldElement(K, coords)
        if abs(g.norm()) == N:
            return g / scale if scale != 1 else g
    return None


def is_principal(I: Ideal) -> bool:
    return principal_generator(I) is not None


# ---------------------------------------------------------------------------
# primes

@dataclass(frozen=True, eq=False)
class PrimeIdeal:
    p: int
    ideal: Ideal
    f: int
    e: int
    gen: FieldElement = field(repr=False)
    index: int = 0

    @property
    def norm(self) -> int:
        return self.p ** self.f

    @property
    def unramified(self) -> bool:
        return self.e == 1

    def __eq__(self, other):
        return isinstance(other, PrimeIdeal) and self.ideal == other.ideal

    def __hash__(self):
        return hash(self.ideal)

    def __lt__(self, other):
        return (self.norm, self.p, self.index) < (other.norm, other.p, other.index)

    def __repr__(self):
        return f"P{self.ideal!r}"


def kronecker(D: int, p: int) -> int:
    if D % p == 0:
        return 0
    if p == 2:
        return 1 if D % 8 in (1, 7) else -1
    return 1 if pow(D % p, (p - 1) // 2, p) == 1 else -1


def primes_above(K: NumberField, p: int):
    """Prime ideals above p via Dedekind-Kummer, ordered by (f, root/coefficients)."""
    cache = K._ideal_cache.setdefault("primes", {})
    if p in cache:
        return cache[p]
    if K.index % p == 0:
        raise IdealError(f"p={p} divides the index [o:Z[theta]]; Kummer splitting not available")
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(K.min_poly), x, modulus=p)
    _, facs = poly.factor_list()
    items = []
    for g, e in facs:
        coeffs = [int(c) % p for c in reversed(g.all_coeffs())]  # ascending, monic
        deg = len(coeffs) - 1
        key = (deg, tuple((-c) % p for c in coeffs[:-1]))
        items.append((key, coeffs, int(e)))
    items.sort()
    out = []
    for k, (_, coeffs, e) in enumerate(items):
        g = K.from_power(coeffs)
        I = Ideal.from_generators(K, [K(p), g])
        f = len(coeffs) - 1
        out.append(PrimeIdeal(p, I, f, e, g, k))
    cache[p] = out
    return out


def splitting_type(K: NumberField, p: int):
    """List of (f, e) for the primes above p."""
    if K.degree == 1:
        return [(1, 1)]
    if K.degree == 2 and K.index == 1:
        k = kronecker(K.disc, p)
        return [(1, 2)] if k == 0 else ([(1, 1), (1, 1)] if k == 1 else [(2, 1)])
    return [(P.f, P.e) for P in primes_above(K, p)]


def primes_up_to(K: NumberField, X: int):
    """All prime ideals of norm <= X sorted by norm, then Kummer order."""
    out = []
    for p in sympy.primerange(2, X + 1):
        for P in primes_above(K, int(p)):
            if P.norm <= X:
                out.append(P)
    out.sort()
    return out


def factor_ideal(a: Ideal, bound: int = FACTOR_BOUND):
    """[(P, e), ...] with a = prod P^e, sorted by P."""
    if not isinstance(a, Ideal) or a.den != 1:
        raise IdealError("factor_ideal needs a nonzero integral ideal")
    cache = a.K._ideal_cache.setdefault("factor", {})
    if a.key in cache:
        return cache[a.key]
    N = int(a.norm)
    if N > bound:
        raise IdealError(f"norm {N} exceeds factoring bound {bound}")
    out = []
    rest = a
    for p in sorted(sympy.factorint(N)):
        for P in primes_above(a.K, int(p)):
            e = 0
            while P.ideal.divides(rest):
                rest = rest * _prime_inverse(P)
                e += 1
            if e:
                out.append((P, e))
    if rest != a.K.unit_ideal:
        raise IdealError("factorization did not terminate at the unit ideal")
    out.sort(key=lambda t: t[0])
    cache[a.key] = out
    return out


def _prime_inverse(P: PrimeIdeal) -> Ideal:
    cache = P.ideal.K._ideal_cache.setdefault("pinv", {})
    if P.ideal.key not in cache:
        cache[P.ideal.key] = P.ideal.inverse()
    return cache[P.ideal.key]


def prime_factors(a: Ideal):
    return [P for P, _ in factor_ideal(a)]


def valuation(P: PrimeIdeal, x) -> int:
    """ord_P of an element or integral ideal."""
    if isinstance(x, FieldElement):
        if not x:
            raise IdealError("valuation of zero")
        x = Ideal.principal(P.ideal.K, x)
    if x.den != 1:
        num = x * P.ideal.K(x.den)
        return valuation(P, num) - valuation(P, Ideal.principal(P.ideal.K, P.ideal.K(x.den)))
    e = 0
    inv = _prime_inverse(P)
    while P.ideal.divides(x):
        x = x * inv
        e += 1
    return e


def product_of(K, factors) -> Ideal:
    out = K.unit_ideal
    for P, e in factors:
        out = out * P.ideal ** e
    return out


def squarefree_squarefull_split(b: Ideal):
    """b = b1 * b2 with b1 squarefree, b2 squarefull, coprime."""
    fac = factor_ideal(b)
    b1 = product_of(b.K, [(P, e) for P, e in fac if e == 1])
    b2 = product_of(b.K, [(P, e) for P, e in fac if e >= 2])
    return b1, b2


def mobius(a: Ideal) -> int:
    fac = factor_ideal(a)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def divisors(a: Ideal):
    """All integral divisors of a, sorted."""
    fac = factor_ideal(a)
    out = [a.K.unit_ideal]
    for P, e in fac:
        new = []
        for c in out:
            q = c
            for _ in range(e + 1):
                new.append(q)
                q = q * P.ideal
        out = new
    return sorted(out)


# ---------------------------------------------------------------------------
# different, dual, denominator ideal

def different(K: NumberField) -> Ideal:
    """(f'(theta)) for a power integral basis, else the inverse of the trace dual of o."""
    if K.index == 1 and all(K.basis[i][j] == (i == j) for i in range(K.degree) for j in range(K.degree)):
        f = K.min_poly
        d = K.degree
        deriv = [(d - k) * f[k] for k in range(d)]  # descending coefficients of f'
        g = K.from_power(list(reversed(deriv)))
        return Ideal.principal(K, g)
    return trace_dual(K.unit_ideal).inverse()


def trace_dual(a: Ideal) -> Ideal:
    """{x : Tr(x g) in Z for all g in a}, computed from the trace form."""
    K = a.K
    vecs = [K.trace_functional(g) for g in a.basis_elements()]
    # x . vec in Z for each vec
    h, den = lt.rational_hnf(vecs, K.degree)
    L = [[Fraction(x, den) for x in r] for r in h]
    return Ideal.from_rows(K, lt.dual_basis(L))


def dual_ideal(a: Ideal) -> Ideal:
    """a^ = a^{-1} d^{-1}."""
    return (a * a.K.different).inverse()


def different_and_dual(a: Ideal):
    return a.K.different, dual_ideal(a)


def in_dual(a: Ideal, x: FieldElement) -> bool:
    """Trace test: Tr(x g) in Z for all lattice generators g of a."""
    return all((x * g).trace().denominator == 1 for g in a.basis_elements())


def denominator_ideal(gamma: FieldElement) -> Ideal:
    """{alpha in o : alpha*gamma in o}."""
    K = gamma.K
    if not gamma or gamma.is_integral():
        return K.unit_ideal
    return K.unit_ideal.intersection(Ideal.principal(K, gamma.inverse()))


# ---------------------------------------------------------------------------
# the two constructive statements

def alg1_uniformizer(b: Ideal, c: Ideal, avoid_primes=()) -> FieldElement:
    """alpha in b with ord_P(alpha) = ord_P(b) for every prime P | c (and P in avoid_primes)."""
    K = b.K
    primes = set(prime_factors(c)) | set(avoid_primes)
    if b == K.unit_ideal and not primes:
        return K.one
    tests = [(b * P.ideal) for P in sorted(primes)]
    bound = None
    for _ in range(40):
        cands = small_elements(b, bound)
        for _, coords in cands:
            if not any(J.contains(coords) for J in tests):
                return FieldElement(K, coords)
        bound = (cands[-1][0] if cands else 1.0) * 4.0
    raise IdealError("uniformizer search failed")


def alg1_principalize(b: Ideal, avoid: Ideal | None = None, max_norm: int = 10 ** 5):
    """(alpha, P) with P unramified, coprime to b and avoid, N(P) minimal, (alpha) = bP."""
    K = b.K
    avoid = avoid or K.unit_ideal
    bad = set(prime_factors(b)) | set(prime_factors(avoid))
    X = 32
    seen = set()
    while X <= max_norm:
        for P in primes_up_to(K, X):
            if P in seen:
                continue
            seen.add(P)
            if not P.unramified or P in bad:
                continue
            g = principal_generator(b * P.ideal)
            if g is not None:
                return g, P
        X *= 4
    raise IdealError("no suitable prime below the search bound")


# ---------------------------------------------------------------------------
# enumeration and counting

def _local_counts(ftypes, kmax):
    """Coefficients of prod_i 1/(1 - t^{f_i}) up to t^kmax."""
    c = [1] + [0] * kmax
    for f, _ in ftypes:
        for k in range(f, kmax + 1):
            c[k] += c[k - f]
    return c


def ideal_counts(K: NumberField, X: int, bound: int = ENUM_BOUND) -> np.ndarray:
    """a[m] = number of integral ideals of norm m, for 0 <= m <= X (a[0] = 0)."""
    X = int(X)
    if X > bound:
        raise IdealError(f"ideal counts requested up to {X}, bound is {bound}")
    cache = K._ideal_cache.get("counts")
    if cache is not None and len(cache) > X:
        return cache[: X + 1]
    Xc = max(X, 1024)
    a = np.zeros(Xc + 1, dtype=np.int64)
    a[1] = 1
    spf = np.zeros(Xc + 1, dtype=np.int64)
    for p in sympy.primerange(2, Xc + 1):
        p = int(p)
        s = spf[p::p]
        s[s == 0] = p
    # multiplicative fill using smallest prime factor
    loc_cache = {}
    for m in range(2, Xc + 1):
        p = int(spf[m])
        r = m
        k = 0
        while r % p == 0:
            r //= p
            k += 1
        if p not in loc_cache:
            loc_cache[p] = _local_counts(splitting_type(K, p), int(log(Xc) / log(p)) + 2)
        a[m] = loc_cache[p][k] * a[r]
    K._ideal_cache["counts"] = a
    return a[: X + 1]


def enumerate_ideals(K: NumberField, X: int, bound: int = ENUM_BOUND):
    """All integral ideals of norm <= X, sorted by (norm, canonical form)."""
    X = int(X)
    if X > bound:
        raise IdealError(f"enumeration bound {bound} exceeded")
    cache = K._ideal_cache.setdefault("enum", {})
    best = max((k for k in cache if k >= X), default=None)
    if best is not None:
        return [I for I in cache[best] if I.norm <= X]
    primes = primes_up_to(K, X)
    out = []

    def rec(start, I, n):
        out.append(I)
        for j in range(start, len(primes)):
            P = primes[j]
            if n * P.norm > X:
                break
            J = I
            m = n
            while m * P.norm <= X:
                J = J * P.ideal
                m *= P.norm
                rec(j + 1, J, m)

    rec(0, K.unit_ideal, 1)
    out.sort()
    cache[X] = out
    return out


# ---------------------------------------------------------------------------
# class data for quadratic fields

def _roots_of_unity_count(K: NumberField) -> int:
    if K.r1 > 0:
        return 2
    vecs = small_elements(K.unit_ideal, K.degree + 0.5)
    return sum(1 for t2, c in vecs if abs(FieldElement(K, c).norm()) == 1 and abs(t2 - K.degree) < 1e-6)


def compute_class_data(K: NumberField) -> ClassData:
    """Class group representatives and units for Q and quadratic fields.

    Every class contains an integral ideal of norm at most the Minkowski
    bound; those ideals are grouped by principality of a * b^{-1}.
    """
    if K.degree == 1:
        return ClassData(1, (((1,),),), (), 2, 1.0)
    if K.degree != 2:
        raise FieldError("class data for degree >= 3 must be supplied by config")
    w = _roots_of_unity_count(K)
    if K.r1 == 2:
        eps = fundamental_unit_quadratic(K)
        units = (eps.coords,)
        reg = abs(log(abs(eps.embed()[0].real)))
    else:
        units = ()
        reg = 1.0
    # provisional data so that principality search can use the unit constant
    K._class_data = ClassData(0, (), units, w, reg)
    d = K.degree
    mink = (4 / pi) ** K.r2 * factorial(d) / d ** d * K.disc_abs ** 0.5
    cands = enumerate_ideals(K, max(1, int(mink)))
    reps = []
    for I in cands:
        found = False
        for J in reps:
            test = I * (J.inverse() * K(int(J.norm)))
            if is_principal(test):
                found = True
                break
        if not found:
            reps.append(I)
    K._ideal_cache.pop("enum", None)
    rep_gens = tuple(tuple(tuple(r) for r in I.rows()) for I in reps)
    return ClassData(len(reps), rep_gens, units, w, reg)
