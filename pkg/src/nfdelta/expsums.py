"""Complete cubic exponential sums modulo ideals.

S_b(m)  = sum_{sigma primitive mod b} sum_{x mod b} sigma(F(x)) e(Tr(m.x)),  m in (b d)^{-1}
S~_b(v) = sum_{a in (o/b)^*} sum_{x mod b} e(Tr(gamma (a F(x) + v.x))),   v in o

Phases are computed as exact integer numerators over a common denominator
and exponentiated once.  Sums over x are grouped by the residue class of F(x)
so that the character loop only touches N(b) values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd

import numpy as np

from . import lattice as lt
from .characters import PhaseTable, build_primitive_char
from .forms import CubicForm, mul_coords, mul_table_array
from .ideals import Ideal, IdealError, PrimeIdeal, factor_ideal, in_dual
from .nf import FieldElement, NumberField

WORK_BOUND = 10 ** 8
MAX_VARS = 10
SCAN_BOUND = 121


class CostBoundExceeded(RuntimeError):
    pass


@dataclass
class ExpSumResult:
    modulus: Ideal
    argument: tuple
    value: complex
    method: str

    def __complex__(self):
        return complex(self.value)

    def __abs__(self):
        return abs(self.value)


def _check_cost(work: float, bound: float = WORK_BOUND):
    if work > bound:
        raise CostBoundExceeded(f"estimated work {work:.3g} exceeds bound {bound:.3g}")


def _as_elements(K: NumberField, vec):
    return [x if isinstance(x, FieldElement) else K(x) for x in vec]


def residue_index(b: Ideal, Y) -> np.ndarray:
    """Position of reduced coordinates Y (..., d) in b.residues."""
    R = b.reduce(Y)
    diag = [b.hnf[i][i] for i in range(b.K.degree)]
    return np.ravel_multi_index(tuple(np.moveaxis(R, -1, 0)), diag)


def _linear_phase(K: NumberField, b: Ideal, coeffs, scale: FieldElement | None = None):
    """Integer numerators of Tr(scale * c_i * x) on residues mod b, common denominator L."""
    tabs = [PhaseTable(K, c if scale is None else scale * c) for c in coeffs]
    L = int(np.lcm.reduce([t.L for t in tabs])) if tabs else 1
    R = b.residues
    cols = [t.residue(R) * (L // t.L) for t in tabs]
    return cols, int(L)


def _grouped_weights(F: CubicForm, b: Ideal, lin_cols, L: int) -> np.ndarray:
    """W[y] = sum over x with F(x) = y mod b of e(sum_i lin_i(x_i)/L)."""
    n = F.n
    N = len(b.residues)
    _check_cost(float(N) ** n)
    ring = ResidueRing(b)
    idx = np.indices((N,) * n, dtype=np.int32).reshape(n, -1).T
    y = _poly_table(ring, F.terms, idx)
    ph = np.zeros(len(idx), dtype=np.int64)
    for i in range(n):
        ph += lin_cols[i][idx[:, i]]
    z = np.exp(2j * np.pi * (ph % L) / L)
    return np.bincount(y, weights=z.real, minlength=N) + 1j * np.bincount(y, weights=z.imag, minlength=N)


def bilinear_matrix(K: NumberField, gamma: FieldElement):
    """Integer M and L with Tr(gamma*a*y) = a^T M y / L for coordinate vectors a, y."""
    rows = [K.trace_functional(gamma * w) for w in K.basis_elements]
    L = int(lt.common_denominator(rows))
    M = np.array([[int(x * L) % L for x in r] for r in rows], dtype=np.int64)
    return M, L


def _unit_phase_matrix(K: NumberField, b: Ideal, gamma: FieldElement) -> np.ndarray:
    """E[a, y] = e(Tr(gamma a y)) for a in (o/b)^*, y in o/b."""
    M, L = bilinear_matrix(K, gamma)
    U = b.unit_residues
    R = b.residues
    num = np.mod((U @ M) % L @ R.T, L)
    return np.exp(2j * np.pi * num / L)


def _trivial_bound(b: Ideal, n: int) -> float:
    return float(b.phi) * float(b.norm) ** n


def _assert_trivial(val: complex, b: Ideal, n: int):
    tb = _trivial_bound(b, n)
    if abs(val) > tb * (1 + 1e-9) + 1e-9:
        raise ArithmeticError(f"|S| = {abs(val)} exceeds trivial bound {tb}")


# ---------------------------------------------------------------------------
# S_b(m)
# ---------------------------------------------------------------------------

def S_b(F: CubicForm, b: Ideal, m, sigma=None) -> ExpSumResult:
    """S_b(m) by enumerating primitive characters and residues."""
    K = F.K
    m = _as_elements(K, m)
    if len(m) != F.n:
        raise ValueError("argument length differs from the number of variables")
    if b == K.unit_ideal:
        return ExpSumResult(b, tuple(m), 1.0 + 0j, "direct")
    for mi in m:
        if not in_dual(b, mi):
            raise ValueError(f"{mi!r} is not in the dual of {b!r}")
    N = int(b.norm)
    _check_cost(float(N) ** (F.n + 1))
    sigma = sigma or build_primitive_char(b)
    cols, L = _linear_phase(K, b, m)
    W = _grouped_weights(F, b, cols, L)
    R = b.residues
    total = 0j
    for a in b.unit_residues:
        # the character y -> e(Tr(a gamma y)), built from the exact product
        chi = PhaseTable(K, FieldElement(K, a.tolist()) * sigma.gamma)
        total += np.dot(chi(R), W)
    _assert_trivial(total, b, F.n)
    return ExpSumResult(b, tuple(m), complex(total), "direct")


# ---------------------------------------------------------------------------
# S~_b(v)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=512)
def default_gamma(b: Ideal) -> FieldElement:
    return build_primitive_char(b).gamma


def S_tilde(F: CubicForm, b: Ideal, v, gamma: FieldElement | None = None,
            method: str = "auto") -> ExpSumResult:
    """S~_b(v); diagonal forms use a product over variables."""
    K = F.K
    v = _as_elements(K, v)
    if len(v) != F.n:
        raise ValueError("argument length differs from the number of variables")
    if F.n > MAX_VARS:
        raise CostBoundExceeded(f"n = {F.n} exceeds {MAX_VARS}")
    if not all(x.is_integral() for x in v):
        raise ValueError("v must be integral")
    if b == K.unit_ideal:
        return ExpSumResult(b, tuple(v), 1.0 + 0j, "direct")
    gamma = gamma if gamma is not None else default_gamma(b)
    N = int(b.norm)
    U = b.unit_residues
    if method == "auto":
        method = "diagonal" if F.is_diagonal else "direct"
    cols, L = _linear_phase(K, b, v, scale=gamma)
    if method == "diagonal":
        _check_cost(float(len(U)) * N * F.n)
        E = _unit_phase_matrix(K, b, gamma)
        R = b.residues
        T = mul_table_array(K)
        cube = b.reduce(mul_coords(T, b.reduce(mul_coords(T, R, R)), R))
        acc = np.ones(len(U), dtype=complex)
        for i, c in enumerate(F.diagonal_coeffs()):
            cc = np.array([int(x) for x in c.coords], dtype=np.int64)
            y = residue_index(b, mul_coords(T, np.broadcast_to(cc, cube.shape), cube))
            z = np.exp(2j * np.pi * cols[i] / L)
            Wi = np.bincount(y, weights=z.real, minlength=N) + 1j * np.bincount(y, weights=z.imag, minlength=N)
            acc *= E @ Wi
        total = complex(acc.sum())
    elif method == "direct":
        _check_cost(float(N) ** F.n + float(len(U)) * N)
        W = _grouped_weights(F, b, cols, L)
        total = complex((_unit_phase_matrix(K, b, gamma) @ W).sum())
    elif method == "multiplicative":
        total = 1.0 + 0j
        for P, e in factor_ideal(b):
            total *= S_tilde(F, P.ideal ** e, v).value
    else:
        raise ValueError(f"unknown method {method}")
    _assert_trivial(total, b, F.n)
    return ExpSumResult(b, tuple(v), total, method)


def relation_check(F: CubicForm, b: Ideal, m):
    """(S_b(m), S~_b(alpha m), |diff|) with alpha from the character construction."""
    K = F.K
    sigma = build_primitive_char(b)
    lhs = S_b(F, b, m, sigma=sigma).value
    v = [sigma.alpha * x for x in _as_elements(K, m)]
    rhs = S_tilde(F, b, v, gamma=sigma.gamma).value
    return lhs, rhs, abs(lhs - rhs)


def gamma_independence(F: CubicForm, b: Ideal, v):
    """S~_b(v) for two different gamma; returns (first, second, |diff|)."""
    s1 = build_primitive_char(b)
    s2 = build_primitive_char(b, avoid=s1.p1.ideal)
    a = S_tilde(F, b, v, gamma=s1.gamma).value
    c = S_tilde(F, b, v, gamma=s2.gamma).value
    return a, c, abs(a - c)


def multiplicativity_check(F: CubicForm, b1: Ideal, b2: Ideal, v):
    """(S~_{b1 b2}(v), S~_{b1}(v) S~_{b2}(v), |diff|) for coprime b1, b2."""
    if not b1.is_coprime(b2):
        raise IdealError("moduli are not coprime")
    lhs = S_tilde(F, b1 * b2, v).value
    rhs = S_tilde(F, b1, v).value * S_tilde(F, b2, v).value
    return lhs, rhs, abs(lhs - rhs)


def ram_identity_check(F: CubicForm, b: Ideal, m):
    """S_b(m) against N(d)^{-n} sum_a sum_{x mod b d} e(Tr(a gamma F(x) + m.x)).

    Returns (lhs, rhs, |diff|).
    """
    K = F.K
    m = _as_elements(K, m)
    sigma = build_primitive_char(b)
    lhs = S_b(F, b, m, sigma=sigma).value
    c = b * K.different
    Nd = int(K.different.norm)
    cols, L = _linear_phase(K, c, m)
    W = _grouped_weights(F, c, cols, L)
    M, L2 = bilinear_matrix(K, sigma.gamma)
    num = np.mod((b.unit_residues @ M) % L2 @ c.residues.T, L2)
    rhs = complex((np.exp(2j * np.pi * num / L2) @ W).sum()) / Nd ** F.n
    return lhs, rhs, abs(lhs - rhs)


# ---------------------------------------------------------------------------
# residue fields and singularity scans
# ---------------------------------------------------------------------------

class ResidueRing:
    """o / b with elements indexed by position in b.residues; add and mul by table lookup."""

    TABLE_BOUND = 4096

    def __init__(self, b: PrimeIdeal | Ideal):
        self.ideal = b.ideal if isinstance(b, PrimeIdeal) else b
        self.K = self.ideal.K
        self.R = self.ideal.residues
        self.q = len(self.R)
        if self.q > self.TABLE_BOUND:
            raise CostBoundExceeded(f"residue ring of size {self.q} is too large for tables")
        T = mul_table_array(self.K)
        A = self.R[:, None, :] + self.R[None, :, :]
        B = mul_coords(T, self.R[:, None, :], self.R[None, :, :])
        self.add = residue_index(self.ideal, A).astype(np.int32)
        self.mul = residue_index(self.ideal, B).astype(np.int32)
        self.zero = int(residue_index(self.ideal, np.zeros(self.K.degree, dtype=np.int64)))
        self.one = int(residue_index(self.ideal, np.array([int(c) for c in self.K.one.coords])))

    def index(self, x: FieldElement) -> int:
        return int(residue_index(self.ideal, np.array([int(c) for c in x.coords], dtype=np.int64)))

    def neg(self, i):
        return np.argmax(self.add[i] == self.zero) if np.ndim(i) == 0 else \
            np.argmax(self.add[np.asarray(i)] == self.zero, axis=-1)

    def projective_points(self, k: int) -> np.ndarray:
        """Normalised points of P^k over o/p as index arrays (M, k+1)."""
        out = []
        for lead in range(k + 1):
            tail = k - lead
            grid = np.indices((self.q,) * tail).reshape(tail, -1).T if tail else np.zeros((1, 0), dtype=np.int64)
            pts = np.full((len(grid), k + 1), self.zero, dtype=np.int64)
            pts[:, lead] = self.one
            pts[:, lead + 1:] = grid
            out.append(pts)
        return np.concatenate(out)


def _poly_table(rf: ResidueRing, terms: dict, X: np.ndarray) -> np.ndarray:
    """Evaluate sum c_e x^e in o/b for index arrays X (M, n)."""
    out = np.full(len(X), rf.zero, dtype=np.int32)
    for e, c in terms.items():
        t = np.full(len(X), rf.index(c), dtype=np.int32)
        for i, k in enumerate(e):
            for _ in range(k):
                t = rf.mul[t, X[:, i]]
        out = rf.add[out, t]
    return out


def is_nonsingular_mod(F: CubicForm, P, bound: int = SCAN_BOUND) -> bool:
    """True iff F has no nonzero singular point over o/p (exhaustive scan)."""
    rf = ResidueRing(P)
    if F.is_diagonal:
        return all(rf.index(c) != rf.zero for c in F.diagonal_coeffs()) and rf.index(F.K.one * 3) != rf.zero
    if rf.q > bound:
        raise CostBoundExceeded(f"N(p) = {rf.q} exceeds scan bound {bound}")
    _check_cost(float(rf.q) ** (F.n - 1) * F.n)
    X = rf.projective_points(F.n - 1)
    sing = _poly_table(rf, F.terms, X) == rf.zero
    for g in F.gradient_terms():
        sing &= _poly_table(rf, g, X) == rf.zero
    return not bool(sing.any())


def _restriction_map(rf: ResidueRing, vi, X):
    """x = (v_n x'_1, ..., v_n x'_{n-1}, -sum v_i x'_i) on index arrays, pivot last."""
    n1 = X.shape[1]
    cols = [rf.mul[vi[-1], X[:, j]] for j in range(n1)]
    s = np.full(len(X), rf.zero, dtype=np.int64)
    for j in range(n1):
        s = rf.add[s, rf.mul[vi[j], X[:, j]]]
    cols.append(rf.neg(s))
    return np.stack(cols, axis=1)


def dual_nonvanishing_mod_p(F: CubicForm, v, P, bound: int = SCAN_BOUND) -> bool:
    """True iff F restricted to v.x = 0 is nonsingular over o/p (projective scan)."""
    K = F.K
    v = _as_elements(K, v)
    rf = ResidueRing(P)
    if rf.q > bound:
        raise CostBoundExceeded(f"N(p) = {rf.q} exceeds scan bound {bound}")
    vi = [rf.index(x) for x in v]
    nz = [i for i, x in enumerate(vi) if x != rf.zero]
    if not nz:
        raise ValueError("v vanishes modulo p")
    piv = nz[-1]
    perm = [i for i in range(F.n) if i != piv] + [piv]
    vp = [vi[i] for i in perm]
    Fp = permute_form(F, perm)
    X1 = rf.projective_points(F.n - 2)
    X = _restriction_map(rf, vp, X1)
    grads = [_poly_table(rf, g, X) for g in Fp.gradient_terms()]
    sing = _poly_table(rf, Fp.terms, X) == rf.zero
    # partials of F_v: v_n d_j F - v_j d_n F
    for j in range(F.n - 1):
        a = rf.mul[vp[-1], grads[j]]
        b = rf.mul[vp[j], grads[-1]]
        sing &= rf.add[a, rf.neg(b)] == rf.zero
    return not bool(sing.any())


def permute_form(F: CubicForm, perm) -> CubicForm:
    """Form G with G(y) = F(x) where x[perm[k]] = y[k]."""
    terms = {}
    for e, c in F.terms.items():
        terms[tuple(e[perm[k]] for k in range(F.n))] = c
    return CubicForm(F.K, F.n, terms)


def binary_cubic_disc(a, b, c, d):
    return b * b * c * c - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d + 18 * a * b * c * d


def restricted_binary_cubic(F: CubicForm, v):
    """Coefficients (a, b, c, d) of F_v(s, t) = F(v3 s, v3 t, -v1 s - v2 t) for n = 3, exact."""
    if F.n != 3:
        raise ValueError("binary restriction needs n = 3")
    K = F.K
    v = _as_elements(K, v)
    nz = [i for i in range(3) if v[i]]
    if not nz:
        raise ValueError("v = 0")
    piv = nz[-1]
    perm = [i for i in range(3) if i != piv] + [piv]
    G = permute_form(F, perm)
    w = [v[i] for i in perm]

    def fv(s, t):
        return G([w[2] * s, w[2] * t, -(w[0] * s + w[1] * t)])

    a, d = fv(1, 0), fv(0, 1)
    p, q = fv(1, 1), fv(1, -1)
    half = K(Fraction(1, 2))
    b = (p - q) * half - d
    c = (p + q) * half - a
    return a, b, c, d


def dual_form_vanishes(F: CubicForm, v) -> bool:
    """G(v) = 0 for n = 3, tested as vanishing of the restricted binary cubic discriminant."""
    return not binary_cubic_disc(*restricted_binary_cubic(F, v))


# ---------------------------------------------------------------------------
# Deligne normalisation and averaged bounds
# ---------------------------------------------------------------------------

@dataclass
class DeligneResult:
    prime: PrimeIdeal
    v: tuple
    value: complex
    ratio: float | None
    excluded: bool
    reason: str = ""


def deligne_check(F: CubicForm, P: PrimeIdeal, v) -> DeligneResult:
    K = F.K
    v = tuple(_as_elements(K, v))
    reason = ""
    if not P.unramified:
        reason = "ramified prime"
    elif P.p == 3:
        reason = "prime above 3"
    elif not is_nonsingular_mod(F, P):
        reason = "F singular mod p"
    elif all(P.ideal.contains(x) for x in v):
        reason = "v = 0 mod p"
    elif not dual_nonvanishing_mod_p(F, v, P):
        reason = "F_v singular mod p"
    if reason:
        return DeligneResult(P, v, 0j, None, True, reason)
    val = S_tilde(F, P.ideal, v).value
    return DeligneResult(P, v, val, abs(val) / P.norm ** ((F.n + 1) / 2), False)


def deligne_sample(F: CubicForm, P: PrimeIdeal, count: int = 25, seed: int = 0, max_draws: int = 10000):
    """First `count` admissible results among uniform draws of v mod p."""
    K = P.ideal.K
    R = P.ideal.residues
    rng = np.random.default_rng(seed)
    kept, flagged = [], []
    for _ in range(max_draws):
        if len(kept) == count:
            break
        idx = rng.integers(0, len(R), size=F.n)
        if not idx.any():
            continue
        r = deligne_check(F, P, [FieldElement(K, R[i].tolist()) for i in idx])
        (flagged if r.excluded else kept).append(r)
    return kept, flagged


def box_vectors(K: NumberField, n: int, B: int, lattice: Ideal | None = None):
    """v in o^n (or lattice^n) whose coordinates all lie in [-B, B]."""
    rng = range(-B, B + 1)
    coords = [np.array(c, dtype=np.int64) for c in product(rng, repeat=K.degree)]
    if lattice is not None:
        coords = [c for c in coords if lattice.contains(c.tolist())]
    for combo in product(coords, repeat=n):
        yield [FieldElement(K, c.tolist()) for c in combo]


@dataclass
class BoundRow:
    norm: int
    box: int
    count: int
    lhs: float
    rhs: float
    ratio: float
    variant: str


def averaged_bound_tables(F: CubicForm, B: int, moduli, variant: str = "all",
                          max_points: int = 10 ** 4):
    """Sum of |S~_b(v)| over a box against the averaged bounds.

    variant 'all' compares with N^{n/2+1}(Nm(B)^n + N^{n/3});
    variant 'dual-zero' keeps only v with G(v) = 0 and compares with
    N^{n+1/2} + Nm(B)^{n-3/2} N^{n/2+4/3}.
    """
    K, n = F.K, F.n
    npts = (2 * B + 1) ** (K.degree * n)
    if npts > max_points:
        raise CostBoundExceeded(f"box has {npts} points")
    NmB = float(B) ** K.degree
    rows = []
    for b in moduli:
        N = float(b.norm)
        gamma = default_gamma(b)
        lhs, cnt = 0.0, 0
        for v in box_vectors(K, n, B):
            if variant == "dual-zero":
                if not any(v) or not dual_form_vanishes(F, v):
                    continue
            lhs += abs(S_tilde(F, b, v, gamma=gamma).value)
            cnt += 1
        if variant == "dual-zero":
            rhs = N ** (n + 0.5) + NmB ** (n - 1.5) * N ** (n / 2 + 4 / 3)
        else:
            rhs = N ** (n / 2 + 1) * (NmB ** n + N ** (n / 3))
        rows.append(BoundRow(int(N), B, cnt, lhs, rhs, lhs / rhs, variant))
    return rows


@dataclass
class SquarefreeRecord:
    rows: list = field(default_factory=list)

    @property
    def C(self) -> float:
        return max((r[3] for r in self.rows), default=0.0)


def squarefree_bound(F: CubicForm, moduli, vs) -> SquarefreeRecord:
    """C = max (|S~_b(v)| / N(b)^{(n+1)/2})^{1/omega(b)} over admissible square-free b."""
    rec = SquarefreeRecord()
    for b in moduli:
        fac = factor_ideal(b)
        if any(e > 1 for _, e in fac) or not fac:
            continue
        for v in vs:
            if not all(deligne_check(F, P, v).excluded is False for P, _ in fac):
                continue
            val = abs(S_tilde(F, b, v).value)
            r = val / float(b.norm) ** ((F.n + 1) / 2)
            rec.rows.append((int(b.norm), tuple(v), r, r ** (1.0 / len(fac))))
    return rec


def classical_sum_Q(coeffs: dict, q: int, m=None) -> complex:
    """Plain-integer S_q(m) over Q: sum_{a mod q}^* sum_x e_q(a F(x) + m.x), m in Z^n."""
    n = len(next(iter(coeffs)))
    m = m or [0] * n
    total = 0j
    for x in product(range(q), repeat=n):
        Fx = 0
        for e, c in coeffs.items():
            t = c
            for xi, k in zip(x, e):
                t *= xi ** k
            Fx += t
        lin = sum(mi * xi for mi, xi in zip(m, x))
        for a in range(1, q + 1):
            if gcd(a, q) == 1:
                total += np.exp(2j * np.pi * ((a * Fx + lin) % q) / q)
    return total
