"""Small exact linear algebra over Z and Q.

Everything here works on plain Python lists of ints or Fractions; the
dimensions involved are tiny (d <= 3 or so) so clarity wins over speed.
"""

from fractions import Fraction
from math import gcd, isqrt

import numpy as np


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def common_denominator(rows) -> int:
    den = 1
    for r in rows:
        for x in r:
            den = lcm(den, Fraction(x).denominator)
    return den


def hnf(rows, d: int):
    """Upper triangular row Hermite normal form of an integer matrix.

    Returns d rows (the matrix must have full column rank d). Pivots are
    positive and entries above each pivot are reduced into [0, pivot).
    """
    work = [list(map(int, r)) for r in rows if any(r)]
    out = []
    for j in range(d):
        while True:
            nz = [r for r in work if r[j] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[j]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[j] // piv[j]
                if q:
                    for k in range(j, d):
                        r[k] -= q * piv[k]
            work = [r for r in work if any(r)]
        piv = next((r for r in work if r[j] != 0), None)
        if piv is None:
            raise ValueError("matrix does not have full column rank")
        work.remove(piv)
        if piv[j] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        work = [r for r in work if any(r)]
    for j in range(d):
        pj = out[j][j]
        for i in range(j):
            q = out[i][j] // pj
            if q:
                out[i] = [a - q * b for a, b in zip(out[i], out[j])]
    return out


def det_frac(m):
    """Exact determinant by fraction Gaussian elimination."""
    a = [[Fraction(x) for x in r] for r in m]
    n = len(a)
    det = Fraction(1)
    for j in range(n):
        p = next((i for i in range(j, n) if a[i][j] != 0), None)
        if p is None:
            return Fraction(0)
        if p != j:
            a[j], a[p] = a[p], a[j]
            det = -det
        det *= a[j][j]
        for i in range(j + 1, n):
            f = a[i][j] / a[j][j]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[j])]
    return det


def inv_frac(m):
    """Exact inverse of a square rational matrix."""
    n = len(m)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == k)) for k in range(n)]
         for i, r in enumerate(m)]
    for j in range(n):
        p = next((i for i in range(j, n) if a[i][j] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        a[j], a[p] = a[p], a[j]
        piv = a[j][j]
        a[j] = [x / piv for x in a[j]]
        for i in range(n):
            if i != j and a[i][j] != 0:
                f = a[i][j]
                a[i] = [x - f * y for x, y in zip(a[i], a[j])]
    return [r[n:] for r in a]


def matmul_frac(a, b):
    return [[sum(Fraction(x) * y for x, y in zip(r, col)) for col in zip(*b)] for r in a]


def vecmat(v, m):
    """Row vector times matrix, exact."""
    return [sum(Fraction(x) * r[k] for x, r in zip(v, m)) for k in range(len(m[0]))]


def transpose(m):
    return [list(c) for c in zip(*m)]


def rational_hnf(rows, d: int):
    """Canonical (integer HNF, denominator) pair for a rational lattice."""
    den = common_denominator(rows)
    ints = [[int(Fraction(x) * den) for x in r] for r in rows]
    h = hnf(ints, d)
    g = den
    for r in h:
        for x in r:
            g = gcd(g, x)
    return [[x // g for x in r] for r in h], den // g


def dual_basis(basis):
    """Rows of (B^{-1})^T: the dual lattice under the standard pairing."""
    return transpose(inv_frac(basis))


def solve_upper(h, x):
    """Coefficients c with c @ h = x for upper triangular h, or None if not integral."""
    y = [Fraction(v) for v in x]
    d = len(h)
    c = []
    for j in range(d):
        q = y[j] / h[j][j]
        if q.denominator != 1:
            return None
        q = int(q)
        c.append(q)
        if q:
            for k in range(j, d):
                y[k] -= q * h[j][k]
    return c


def short_vectors(gram, bound: float):
    """All nonzero integer vectors x with x^T G x <= bound (Fincke-Pohst).

    Returns a list of (value, tuple). Only one of each +-x pair is NOT
    removed: both signs are returned so callers can apply their own order.
    """
    g = np.asarray(gram, dtype=float)
    n = g.shape[0]
    # q-form decomposition: Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
    q = g.copy()
    for i in range(n):
        for j in range(i + 1, n):
            q[j, i] = q[i, j]
            q[i, j] = q[i, j] / q[i, i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k, l] -= q[k, i] * q[i, l]
    out = []
    x = [0] * n
    eps = 1e-9 * max(1.0, bound)

    def rec(i, remaining):
        c = sum(q[i, j] * x[j] for j in range(i + 1, n))
        r = np.sqrt(max(remaining, 0.0) / q[i, i])
        lo = int(np.ceil(-r - c - 1e-9))
        hi = int(np.floor(r - c + 1e-9))
        for xi in range(lo, hi + 1):
            x[i] = xi
            t = q[i, i] * (xi + c) ** 2
            if t > remaining + eps:
                continue
            if i == 0:
                if any(x):
                    out.append(tuple(x))
            else:
                rec(i - 1, remaining - t)
        x[i] = 0

    rec(n - 1, bound)
    res = []
    for v in out:
        a = np.asarray(v, dtype=float)
        res.append((float(a @ g @ a), v))
    return res


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n
