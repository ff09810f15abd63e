"""Number fields of small degree: exact element arithmetic and embeddings into V.

A field is described by a monic integer polynomial f with root theta and an
integral basis omega_1..omega_d written in the power basis of theta.  Elements
are stored as rational coordinate vectors over the integral basis, so an
element is integral exactly when its coordinates are integers.

V = R^{r1} x C^{r2}.  Real places come first (roots in decreasing order), then
one root of positive imaginary part per complex pair.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import isqrt, log

import mpmath
import numpy as np

from . import lattice as lt


class FieldError(ValueError):
    pass


def _poly_mulmod(a, b, f):
    """Multiply ascending coefficient lists a, b modulo monic f (descending list)."""
    d = len(f) - 1
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    # f_asc: theta^d = -sum_{k<d} f_asc[k] theta^k
    f_asc = list(reversed(f))
    for k in range(len(out) - 1, d - 1, -1):
        c = out[k]
        if c:
            out[k] = Fraction(0)
            for j in range(d):
                out[k - d + j] -= c * f_asc[j]
    out = out[:d] + [Fraction(0)] * max(0, d - len(out))
    return out


def squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


class FieldElement:
    """An element of K as a tuple of rational coordinates over the integral basis."""

    __slots__ = ("K", "coords")

    def __init__(self, K: "NumberField", coords):
        self.K = K
        self.coords = tuple(Fraction(c) for c in coords)
        if len(self.coords) != K.degree:
            raise FieldError("coordinate vector has wrong length")

    # arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.K is not self.K:
                raise FieldError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.K.element_from_rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.K, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.K, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.K, lt.vecmat(other.coords, self.mult_matrix()))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if not any(self.coords):
            raise ZeroDivisionError("inverse of zero")
        one = self.K.one.coords
        # solve y @ M = 1
        m_inv = lt.inv_frac(self.mult_matrix())
        return FieldElement(self.K, lt.vecmat(one, m_inv))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.K.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.coords == other.coords

    def __hash__(self):
        return hash((id(self.K), self.coords))

    def __bool__(self):
        return any(self.coords)

    # invariants -------------------------------------------------------
    def mult_matrix(self):
        """Rows: coordinates of self*omega_j."""
        T = self.K.mult_table
        d = self.K.degree
        return [[sum(self.coords[i] * T[i][j][k] for i in range(d)) for k in range(d)]
                for j in range(d)]

    def norm(self) -> Fraction:
        return lt.det_frac(self.mult_matrix())

    def trace(self) -> Fraction:
        m = self.mult_matrix()
        return sum(m[i][i] for i in range(self.K.degree))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def int_coords(self):
        if not self.is_integral():
            raise FieldError("element is not integral")
        return tuple(int(c) for c in self.coords)

    def embed(self, dps: int | None = None) -> np.ndarray:
        return self.K.embed(self.coords, dps=dps)

    def conjugate(self) -> "FieldElement":
        return self.K.conjugate(self)

    def __repr__(self):
        return self.K.format_element(self.coords)


@dataclass(frozen=True)
class ClassData:
    class_number: int
    class_reps: tuple  # tuples of generator coordinate lists
    fundamental_units: tuple  # coordinate tuples
    roots_of_unity: int
    regulator: float


class NumberField:
    """K = Q(theta) with a fixed integral basis.

    min_poly is a monic integer coefficient list, highest degree first.
    basis[i] lists the ascending power-basis coefficients of omega_i.
    Class and unit data are either supplied or computed on demand
    (quadratic fields only).
    """

    def __init__(self, min_poly, basis=None, name: str | None = None,
                 class_data: ClassData | None = None, disc: int | None = None,
                 gen_name: str = "w"):
        f = [int(c) for c in min_poly]
        if f[0] != 1:
            raise FieldError("minimal polynomial must be monic")
        self.min_poly = tuple(f)
        self.degree = d = len(f) - 1
        if basis is None:
            basis = [[int(i == j) for j in range(d)] for i in range(d)]
        self.basis = tuple(tuple(Fraction(c) for c in row) for row in basis)
        if len(self.basis) != d or any(len(r) != d for r in self.basis):
            raise FieldError("basis must be d vectors of length d")
        self.name = name or f"Q[x]/({f})"
        self.gen_name = gen_name
        self._class_data = class_data
        self._power_to_basis = lt.inv_frac(self.basis)
        self.index = 1 / abs(lt.det_frac(self.basis))
        if Fraction(self.index).denominator != 1:
            raise FieldError("basis does not contain Z[theta]")
        self.index = int(self.index)
        self.mult_table = self._build_mult_table()
        self.trace_matrix = [[self._trace_basis_product(i, j) for j in range(d)] for i in range(d)]
        D = lt.det_frac(self.trace_matrix)
        if D.denominator != 1:
            raise FieldError("basis is not integral")
        self.disc = int(D)
        if disc is not None and abs(int(disc)) != abs(self.disc):
            raise FieldError(f"supplied discriminant {disc} disagrees with basis ({self.disc})")
        self.disc_abs = abs(self.disc)
        self._roots = self._compute_roots(None)
        self.r1 = sum(1 for r in self._roots if r.imag == 0.0)
        self.r2 = (d - self.r1) // 2
        self._emb = self._embedding_matrix(self._roots)
        self._mp_cache = {}
        self._ideal_cache = {}

    # construction helpers ----------------------------------------------
    def _basis_product_power(self, i, j):
        return _poly_mulmod(list(self.basis[i]), list(self.basis[j]), self.min_poly)

    def _build_mult_table(self):
        d = self.degree
        T = [[None] * d for _ in range(d)]
        for i in range(d):
            for j in range(d):
                c = lt.vecmat(self._basis_product_power(i, j), self._power_to_basis)
                if any(x.denominator != 1 for x in c):
                    raise FieldError("basis is not closed under multiplication")
                T[i][j] = [int(x) for x in c]
        return T

    def _trace_basis_product(self, i, j):
        d = self.degree
        return sum(self.mult_table[i][j][k] * self._trace_omega(k) for k in range(d))

    def _trace_omega(self, k):
        # trace of omega_k = sum of power-basis traces
        return sum(c * self._power_trace(e) for e, c in enumerate(self.basis[k]))

    def _power_trace(self, e):
        # Newton's identities for power sums of roots of f
        if not hasattr(self, "_psums"):
            d = self.degree
            a = [Fraction(c) for c in self.min_poly]  # a[0]=1
            p = [Fraction(d)]
            for k in range(1, 2 * d + 1):
                s = Fraction(0)
                for i in range(1, min(k, d) + 1):
                    if i < k:
                        s -= a[i] * p[k - i]
                    else:
                        s -= k * a[i]
                p.append(s)
            self._psums = p
        return self._psums[e]

    def _compute_roots(self, dps):
        d = self.degree
        if d == 1:
            return [complex(-self.min_poly[1], 0.0)]
        prec = 30 if dps is None else dps
        with mpmath.workdps(prec):
            roots = [mpmath.mpc(r) for r in
                     mpmath.polyroots(self.min_poly, maxsteps=400, extraprec=2 * prec)]
            tol = mpmath.mpf(10) ** (-(prec // 2))
            real = [mpmath.re(r) for r in roots if abs(mpmath.im(r)) < tol]
            cplx = [r for r in roots if mpmath.im(r) >= tol]
            real.sort(key=lambda t: -t)
            cplx.sort(key=lambda t: (mpmath.re(t), mpmath.im(t)))
        if dps is None:
            return [complex(float(r), 0.0) for r in real] + [complex(c) for c in cplx]
        return [mpmath.mpc(r) for r in real] + cplx

    def _embedding_matrix(self, roots):
        d = self.degree
        return np.array([[sum(float(self.basis[i][e]) * r ** e for e in range(d)) for r in roots]
                         for i in range(d)], dtype=complex)

    # basic elements ------------------------------------------------------
    def __call__(self, coords) -> FieldElement:
        if isinstance(coords, (int, Fraction)):
            return self.element_from_rational(coords)
        return FieldElement(self, coords)

    def element_from_rational(self, q) -> FieldElement:
        one = self.one.coords
        return FieldElement(self, [Fraction(q) * c for c in one])

    @cached_property
    def one(self) -> FieldElement:
        return FieldElement(self, lt.vecmat([1] + [0] * (self.degree - 1), self._power_to_basis))

    @cached_property
    def zero(self) -> FieldElement:
        return FieldElement(self, [0] * self.degree)

    @cached_property
    def theta(self) -> FieldElement:
        if self.degree == 1:
            return self.element_from_rational(-self.min_poly[1])
        return self.from_power([0, 1] + [0] * (self.degree - 2))

    def from_power(self, coeffs) -> FieldElement:
        """Element sum c_k theta^k given ascending power-basis coefficients."""
        c = list(coeffs)[: self.degree] + [0] * max(0, self.degree - len(coeffs))
        if len(coeffs) > self.degree:
            c = _poly_mulmod([Fraction(x) for x in coeffs], [Fraction(1)], self.min_poly)
        return FieldElement(self, lt.vecmat(c, self._power_to_basis))

    def to_power(self, x: FieldElement):
        return lt.vecmat(x.coords, self.basis)

    @property
    def basis_elements(self):
        return [FieldElement(self, [int(i == j) for j in range(self.degree)]) for i in range(self.degree)]

    # embeddings -------------------------------------------------------------
    @property
    def n_places(self) -> int:
        return self.r1 + self.r2

    @property
    def place_weights(self) -> np.ndarray:
        """c_l = 1 for real places, 2 for complex places."""
        return np.array([1] * self.r1 + [2] * self.r2)

    def embed(self, coords, dps: int | None = None):
        """Image of an element (or array of coordinate vectors) in V."""
        if dps is None:
            x = np.asarray([float(c) for c in coords], dtype=float) if not isinstance(coords, np.ndarray) \
                else np.asarray(coords, dtype=float)
            v = x @ self._emb
            if self.r1:
                v = v.copy()
                v[..., : self.r1] = v[..., : self.r1].real
            return v
        roots = self._mp_roots(dps)
        with mpmath.workdps(dps):
            out = []
            for r in roots:
                s = mpmath.mpf(0)
                for i, c in enumerate(coords):
                    s += mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator * \
                        sum(mpmath.mpf(self.basis[i][e].numerator) / self.basis[i][e].denominator * r ** e
                            for e in range(self.degree))
                out.append(s)
            return out

    def _mp_roots(self, dps):
        if dps not in self._mp_cache:
            self._mp_cache[dps] = self._compute_roots(dps)
        return self._mp_cache[dps]

    @property
    def embedding_matrix(self) -> np.ndarray:
        """E[i, l] = rho_l(omega_i)."""
        return self._emb

    def real_embedding_matrix(self) -> np.ndarray:
        """Rows: omega_i as a real d-vector (real places, then Re/Im of complex places)."""
        E = self._emb
        cols = [E[:, l].real for l in range(self.r1)]
        for l in range(self.r1, self.r1 + self.r2):
            cols += [E[:, l].real, E[:, l].imag]
        return np.stack(cols, axis=1)

    def t2_gram(self, rows) -> np.ndarray:
        """Gram matrix of sum_l c_l |x^{(l)}|^2 on the lattice spanned by rows."""
        R = np.asarray([[float(c) for c in r] for r in rows]) @ self.real_embedding_matrix()
        w = np.array([1.0] * self.r1 + [2.0] * (2 * self.r2))
        return (R * w) @ R.T

    # exact helpers --------------------------------------------------------
    def conjugate(self, x: FieldElement) -> FieldElement:
        if self.degree != 2:
            raise FieldError("conjugation only implemented for quadratic fields")
        return FieldElement(self, [Fraction(x.trace()) * c for c in self.one.coords]) - x

    def trace_functional(self, x: FieldElement):
        """Vector t with Tr(x*y) = t . coords(y)."""
        d = self.degree
        return [sum(x.coords[k] * self.trace_matrix[k][i] for k in range(d)) for i in range(d)]

    def format_element(self, coords) -> str:
        d = self.degree
        p = lt.vecmat(coords, self.basis)
        if d == 1:
            return str(p[0])
        names = ["", self.gen_name] + [f"{self.gen_name}^{k}" for k in range(2, d)]
        terms = []
        for k, c in enumerate(p):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(names[k])
            elif c == -1:
                terms.append("-" + names[k])
            else:
                terms.append(f"{c}*{names[k]}")
        if not terms:
            return "0"
        s = "+".join(terms).replace("+-", "-")
        return s

    def parse_element(self, text: str) -> FieldElement:
        """Parse e.g. '1+w', '3-2*w', '(1+w)/2', 'i', '-5'.  The generator name is theta."""
        import sympy
        sym = sympy.Symbol(self.gen_name)
        alias = {self.gen_name: sym}
        if self.gen_name != "w":
            alias["w"] = sym
        expr = sympy.sympify(text.replace("^", "**"), locals=alias)
        poly = sympy.Poly(sympy.expand(expr), sym) if expr.free_symbols else None
        if poly is None:
            return self.element_from_rational(Fraction(str(sympy.Rational(expr))))
        asc = [Fraction(str(sympy.Rational(c))) for c in reversed(poly.all_coeffs())]
        return self.from_power(asc)

    # class and unit data ---------------------------------------------------
    @property
    def class_data(self) -> ClassData:
        if self._class_data is None:
            from .ideals import compute_class_data
            self._class_data = compute_class_data(self)
        return self._class_data

    @property
    def class_number(self) -> int:
        return self.class_data.class_number

    @property
    def roots_of_unity(self) -> int:
        return self.class_data.roots_of_unity

    @property
    def regulator(self) -> float:
        return self.class_data.regulator

    @cached_property
    def fundamental_units(self):
        return [FieldElement(self, c) for c in self.class_data.fundamental_units]

    @cached_property
    def class_reps(self):
        return [self.ideal(*[FieldElement(self, g) for g in gens]) for gens in self.class_data.class_reps]

    @property
    def unit_rank(self) -> int:
        return self.r1 + self.r2 - 1

    def ideal(self, *gens):
        from .ideals import Ideal
        gs = [g if isinstance(g, FieldElement) else self(g) for g in gens]
        return Ideal.from_generators(self, gs)

    @cached_property
    def unit_ideal(self):
        from .ideals import Ideal
        return Ideal.from_generators(self, [self.one])

    @cached_property
    def different(self):
        from .ideals import different
        return different(self)

    def ideal_counts(self, X: int) -> np.ndarray:
        from .ideals import ideal_counts
        return ideal_counts(self, X)

    def __repr__(self):
        return f"NumberField({self.name})"

    # unit reduction -----------------------------------------------------
    @cached_property
    def unit_log_matrix(self) -> np.ndarray:
        """Rows phi(eps_j) = (c_l log|eps_j^{(l)}|)."""
        if not self.fundamental_units:
            return np.zeros((0, self.n_places))
        c = self.place_weights
        return np.array([c * np.log(np.abs(u.embed())) for u in self.fundamental_units])

    @cached_property
    def unit_reduction_constant(self) -> float:
        """c with c^{-1}|Nm v|^{1/d} <= |v'^{(l)}| <= c|Nm v|^{1/d} after unit_reduce."""
        L = self.unit_log_matrix
        if L.shape[0] == 0:
            return 1.0
        return float(np.exp(0.5 * np.linalg.norm(L, axis=1).sum()))


def vnorm(K: NumberField, v) -> float:
    """Nm(v) = prod over real places times prod |v|^2 over complex places."""
    v = np.asarray(v)
    out = np.prod(v[..., : K.r1].real, axis=-1) if K.r1 else 1.0
    if K.r2:
        out = out * np.prod(np.abs(v[..., K.r1:]) ** 2, axis=-1)
    return out


def vtrace(K: NumberField, v) -> float:
    v = np.asarray(v)
    return v[..., : K.r1].real.sum(axis=-1) + 2 * v[..., K.r1:].real.sum(axis=-1)


def vmax(v) -> float:
    """<v> = max_l |v^{(l)}|."""
    return np.max(np.abs(np.asarray(v)), axis=-1)


def vnorm2(K: NumberField, v) -> float:
    """||v||^2 = sum c_l |v^{(l)}|^2."""
    return np.sum(K.place_weights * np.abs(np.asarray(v)) ** 2, axis=-1)


def unit_reduce(K: NumberField, v):
    """Return (u, v') with u a unit and v' = embed(u) * v balanced.

    |Nm v'| = |Nm v| always; when a fundamental unit has norm -1 the sign of
    Nm may flip.
    """
    v = np.asarray(v, dtype=complex)
    nm = abs(vnorm(K, v))
    if nm == 0:
        raise FieldError("unit_reduce needs Nm(v) != 0")
    L = K.unit_log_matrix
    if L.shape[0] == 0:
        return K.one, v.copy()
    c = K.place_weights
    b = c * (np.log(np.abs(v)) - log(nm) / K.degree)
    # closest vector to -b in the unit lattice: rounding plus a local search
    k0 = np.rint(np.linalg.lstsq(L.T, -b, rcond=None)[0]).astype(int)
    best = None
    r = L.shape[0]
    for off in np.ndindex(*([3] * r)):
        k = k0 + np.array(off) - 1
        val = np.linalg.norm(b + k @ L)
        if best is None or val < best[0] - 1e-12:
            best = (val, k)
    k = best[1]
    u = K.one
    for eps, kj in zip(K.fundamental_units, k):
        u = u * eps ** int(kj)
    return u, u.embed() * v


# ---------------------------------------------------------------------------
# constructors

def rationals() -> NumberField:
    K = NumberField([1, 0], name="Q", gen_name="t",
                    class_data=ClassData(1, (([1],),), (), 2, 1.0))
    return K


def quadratic_disc(D: int) -> int:
    return D if D % 4 == 1 else 4 * D


def field_from_quadratic(D: int, class_data: ClassData | None = None,
                         table_bound: int = 50) -> NumberField:
    """K = Q(sqrt D) with integral basis {1, w}; w = (1+sqrt D)/2 if D = 1 mod 4 else sqrt D."""
    D = int(D)
    if D in (0, 1) or not squarefree(D):
        raise FieldError(f"D={D} must be a squarefree integer other than 0, 1")
    if D % 4 == 1:
        poly = [1, -1, (1 - D) // 4]
    else:
        poly = [1, 0, -D]
    gen = "i" if D == -1 else "w"
    name = "Q(i)" if D == -1 else f"Q(sqrt({D}))"
    if class_data is None and abs(D) > table_bound:
        raise FieldError(f"class data for D={D} not built in (|D| <= {table_bound}); supply a config")
    return NumberField(poly, name=name, class_data=class_data, gen_name=gen)


def fundamental_unit_quadratic(K: NumberField) -> FieldElement:
    """Fundamental unit > 1 (first real place) of a real quadratic field via continued fractions of w."""
    if K.degree != 2 or K.r1 != 2:
        raise FieldError("not a real quadratic field")
    f = K.min_poly  # x^2 + b x + c with root w
    b, c = f[1], f[2]
    # w = (-b + sqrt(b^2 - 4c)) / 2 ; continued fraction of (P + sqrt(N)) / Qd
    N = b * b - 4 * c
    P, Qd = -b, 2
    h_prev, h = 1, 0
    k_prev, k = 0, 1
    # track convergents p/q of w; test units p - q*w
    sqN = isqrt(N)
    for _ in range(10000):
        a = (P + sqN) // Qd
        h_prev, h = a * h_prev + h, h_prev
        k_prev, k = a * k_prev + k, k_prev
        p, q = h_prev, k_prev
        u = K([p, -q])
        nrm = u.norm()
        if abs(nrm) == 1:
            eps = u.inverse()
            for cand in (eps, -eps, u, -u):
                if cand.embed()[0].real > 1:
                    return cand
        P = a * Qd - P
        Qd = (N - P * P) // Qd
    raise FieldError("continued fraction did not find a unit")


def field_from_name(name: str) -> NumberField:
    """Parse 'Q', 'Qi', 'Q(i)', 'Q(sqrt(-5))', 'Qsqrt2', 'sqrt-5'."""
    s = name.strip().replace(" ", "").lower()
    if s in ("q", "qq", "rationals"):
        return rationals()
    if s in ("qi", "q(i)", "gaussian"):
        return field_from_quadratic(-1)
    m = re.fullmatch(r"q?\(?sqrt\(?(-?\d+)\)?\)?", s)
    if m:
        return field_from_quadratic(int(m.group(1)))
    raise FieldError(f"unknown field name {name!r}")


def field_from_config(path_or_dict) -> NumberField:
    """Field from a JSON config.

    Keys: min_poly (descending ints), basis (optional, ascending power
    coefficients per basis element, fractions as strings allowed), disc,
    class_number, class_reps (list of generator lists, each generator a
    coordinate list over the basis), fundamental_units (coordinate lists),
    roots_of_unity, regulator, name.
    """
    if isinstance(path_or_dict, dict):
        cfg = path_or_dict
    else:
        try:
            with open(path_or_dict) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise FieldError(f"cannot read field config: {exc}") from exc
    try:
        poly = cfg["min_poly"]
        basis = cfg.get("basis")
        if basis is not None:
            basis = [[Fraction(str(c)) for c in row] for row in basis]
        cd = None
        if "class_number" in cfg:
            cd = ClassData(int(cfg["class_number"]),
                           tuple(tuple(tuple(Fraction(str(c)) for c in g) for g in gens)
                                 for gens in cfg["class_reps"]),
                           tuple(tuple(Fraction(str(c)) for c in u) for u in cfg.get("fundamental_units", [])),
                           int(cfg["roots_of_unity"]), float(cfg["regulator"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FieldError(f"malformed field config: {exc}") from exc
    K = NumberField(poly, basis=basis, name=cfg.get("name"), class_data=cd, disc=cfg.get("disc"))
    if cd is None and K.degree > 2:
        raise FieldError("degree >= 3 fields need class data in the config")
    if cd is not None:
        for u in K.fundamental_units:
            if abs(u.norm()) != 1:
                raise FieldError("configured fundamental unit is not a unit")
        if len(K.fundamental_units) != K.unit_rank:
            raise FieldError("wrong number of fundamental units")
    return K


def load_field(name: str | None = None, config=None) -> NumberField:
    if config is not None:
        return field_from_config(config)
    return field_from_name(name or "Q")


@lru_cache(maxsize=1)
def _builtin_fields():
    return {"Q": rationals(), "Qi": field_from_quadratic(-1),
            "Qsqrt2": field_from_quadratic(2), "Qsqrt-5": field_from_quadratic(-5)}


def builtin_fields():
    """The four reference fields; the same instances on every call, so their caches are shared."""
    return dict(_builtin_fields())
