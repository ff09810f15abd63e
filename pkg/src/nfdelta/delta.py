"""The smooth delta symbol over K and its window function h(x, y).

All sums over ideals are reduced to sums over norms m with the ideal counts
a_m, so h is an exact finite sum: only m in [1/(2x), 1/x] and in
[|y|/x, 2|y|/x] contribute.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import floor, pi, sqrt

import mpmath
import numpy as np
from scipy import integrate, special

from .characters import build_primitive_char, primitive_char_sum_direct, primitive_char_sum_mobius
from .ideals import ENUM_BOUND, IdealError, enumerate_ideals, ideal_counts, is_zero
from .nf import NumberField

# ---------------------------------------------------------------------------
# the bump w


def _raw_bump(t):
    t = np.asarray(t, dtype=float)
    s = 4.0 * t - 3.0
    out = np.zeros_like(t)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


@lru_cache(maxsize=None)
def _bump_constants():
    with mpmath.workdps(30):
        g = lambda t: mpmath.exp(-1 / (1 - (4 * t - 3) ** 2))
        z = mpmath.quad(g, [0.5, 0.75, 1.0])
        zt = mpmath.quad(lambda t: g(t) / t, [0.5, 0.75, 1.0])
        return float(1 / z), float(zt / z)


def canonical_w(t):
    """C exp(-1/(1-(4t-3)^2)) on (1/2, 1), zero elsewhere, with integral 1."""
    C, _ = _bump_constants()
    out = C * _raw_bump(t)
    return out if np.ndim(out) else float(out)


def w_over_t_integral() -> float:
    """int_0^inf w(t)/t dt."""
    return _bump_constants()[1]


@lru_cache(maxsize=None)
def _bump_derivatives(nmax: int):
    import sympy

    t = sympy.Symbol("t")
    C = _bump_constants()[0]
    expr = C * sympy.exp(-1 / (1 - (4 * t - 3) ** 2))
    out = []
    for k in range(nmax + 1):
        out.append(sympy.lambdify(t, expr, "numpy"))
        expr = sympy.diff(expr, t)
    return out


def w_derivative(t, k: int):
    """k-th derivative of the canonical bump."""
    t = np.asarray(t, dtype=float)
    fn = _bump_derivatives(k)[k]
    out = np.zeros_like(t)
    inside = (t > 0.5) & (t < 1.0)
    with np.errstate(all="ignore"):
        vals = fn(t[inside])
    out[inside] = np.nan_to_num(vals)
    return out


def sobolev_ladder(nmax: int = 8, grid: int = 20001):
    """lambda^N = max_{k <= N} sup |w^(k)| for N = 0..nmax."""
    t = np.linspace(0.5, 1.0, grid)[1:-1]
    sups = [float(np.max(np.abs(w_derivative(t, k)))) for k in range(nmax + 1)]
    return list(np.maximum.accumulate(sups))


# ---------------------------------------------------------------------------
# field invariants


@dataclass(frozen=True)
class FieldInvariants:
    Delta: float
    Upsilon: float
    D: int


def field_invariants(K: NumberField) -> FieldInvariants:
    """Residue Delta_K of zeta_K at 1 and the renormalised value Upsilon_K at 0."""
    h = K.class_number
    R = K.regulator
    w = K.roots_of_unity
    D = K.disc_abs
    Delta = h * 2 ** K.r1 * (2 * pi) ** K.r2 * R / (w * sqrt(D))
    Upsilon = -Delta * sqrt(D) / (2 ** K.r1 * (2 * pi) ** K.r2)
    return FieldInvariants(Delta, Upsilon, D)


class DegenerateWindow(ValueError):
    """No ideal norm falls inside the open support window, so c_Q^-1 = 0."""


# ---------------------------------------------------------------------------
# windowed sums over norms


def _counts(K: NumberField, M: float, bound: int = ENUM_BOUND) -> np.ndarray:
    M = int(floor(M)) + 1
    if M > bound:
        raise IdealError(f"ideal counts needed up to {M}, bound is {bound}")
    return ideal_counts(K, max(M, 1), bound)


def _window_sum(K, u, kind: str, bound: int = ENUM_BOUND) -> np.ndarray:
    """Vectorised finite sums over m with a_m / m weights.

    kind 'low':  S(u) = sum_m a_m/m w(m/u),   m in (u/2, u)
    kind 'high': S(u) = sum_m a_m/m w(u/m),   m in (u, 2u)
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.zeros_like(u)
    pos = u > 0
    if not np.any(pos):
        return out
    up = u[pos]
    if kind == "low":
        lo = np.floor(up / 2) + 1
        hi = np.ceil(up) - 1
    else:
        lo = np.floor(up) + 1
        hi = np.ceil(2 * up) - 1
    lo = lo.astype(np.int64)
    hi = hi.astype(np.int64)
    cnt = np.maximum(hi - lo + 1, 0)
    if cnt.sum() == 0:
        return out
    a = _counts(K, float(hi.max()), bound)
    total = int(cnt.sum())
    owner = np.repeat(np.arange(len(up)), cnt)
    start = np.repeat(np.cumsum(cnt) - cnt, cnt)
    m = np.repeat(lo, cnt) + (np.arange(total) - start)
    uu = up[owner]
    arg = m / uu if kind == "low" else uu / m
    terms = a[m] / m * canonical_w(arg)
    res = np.zeros(len(up))
    np.add.at(res, owner, terms)
    out[pos] = res
    return out


def h(K: NumberField, x, y, bound: int = ENUM_BOUND):
    """h(x, y) = Delta^-1 sum_z (x N z)^-1 {w(x N z) - w(|y|/(x N z))}."""
    x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any(x_arr <= 0):
        raise ValueError("h needs x > 0")
    Delta = field_invariants(K).Delta
    flat_x = x_arr.ravel()
    flat_y = np.abs(y_arr.ravel())
    s1 = _window_sum(K, 1.0 / flat_x, "low", bound)
    s2 = _window_sum(K, flat_y / flat_x, "high", bound)
    out = ((s1 - s2) / (Delta * flat_x)).reshape(x_arr.shape)
    return out if out.ndim else float(out)


def H_profile(K: NumberField, v, bound: int = ENUM_BOUND):
    """H(v) = int w/t - Delta^-1 sum_z N(z)^-1 w(v / N z)."""
    v_arr = np.asarray(v, dtype=float)
    if np.any(v_arr <= 0):
        raise ValueError("H needs v > 0")
    Delta = field_invariants(K).Delta
    out = w_over_t_integral() - _window_sum(K, v_arr.ravel(), "high", bound) / Delta
    out = out.reshape(v_arr.shape)
    return out if out.ndim else float(out)


def c_Q(K: NumberField, Q: float, bound: int = ENUM_BOUND) -> float:
    """c_Q with c_Q^-1 = Delta^-1 Q^-d sum_c w(Q^-d N c)."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    X = Q ** K.degree
    if X / 2 > bound:
        raise IdealError(f"c_Q needs ideals up to norm {X}, bound is {bound}")
    a = _counts(K, X, bound)
    m = np.arange(len(a))
    s = float(np.sum(a[1:] * canonical_w(m[1:] / X)))
    if s == 0.0:
        raise DegenerateWindow(f"no ideal norm of {K.name} lies in ({X / 2:g}, {X:g}); c_Q is undefined")
    Delta = field_invariants(K).Delta
    return 1.0 / (s / (Delta * X))


# ---------------------------------------------------------------------------
# the delta symbol


class DeltaEvaluator:
    """Evaluates delta_K(a) for one field and one Q, caching characters per modulus."""

    def __init__(self, K: NumberField, Q: float, bound: int = ENUM_BOUND):
        self.K = K
        self.Q = float(Q)
        self.bound = bound
        self.cQ = c_Q(K, Q, bound)
        self._chars = {}

    def _char(self, b):
        if b.key not in self._chars:
            self._chars[b.key] = build_primitive_char(b)
        return self._chars[b.key]

    def terms(self, a, method: str = "direct"):
        """[(b, primitive sum, h value)] over every modulus with h != 0."""
        K = self.K
        d = K.degree
        Qd = self.Q ** d
        y = 0.0 if is_zero(a) else float(a.norm) / Qd ** 2
        Bmax = Qd * max(1.0, 2.0 * y)
        out = []
        for b in enumerate_ideals(K, int(floor(Bmax + 1e-9)), self.bound):
            hv = h(K, float(b.norm) / Qd, y, self.bound)
            if hv == 0.0:
                continue
            if method == "direct":
                s = primitive_char_sum_direct(b, a, self._char(b))
            else:
                s = complex(primitive_char_sum_mobius(b, a))
            out.append((b, s, hv))
        return out

    def __call__(self, a, method: str = "direct") -> complex:
        d = self.K.degree
        total = 0j
        for _, s, hv in self.terms(a, method):
            total += s * hv
        return self.cQ * total / self.Q ** (2 * d)


def delta_K(K: NumberField, a, Q: float, bound: int = ENUM_BOUND, method: str = "direct") -> complex:
    """c_Q Q^{-2d} sum_b sum*_sigma sigma(a) h(N b / Q^d, N a / Q^{2d})."""
    return DeltaEvaluator(K, Q, bound)(a, method)


def indicator(a) -> float:
    return 1.0 if is_zero(a) else 0.0


# ---------------------------------------------------------------------------
# averaged integral of h against a weight on V


def _gl(n):
    return np.polynomial.legendre.leggauss(n)


def _panel_quad(fn, edges, n):
    """Gauss-Legendre with n nodes on each panel [edges[i], edges[i+1]]."""
    xg, wg = _gl(n)
    a = np.asarray(edges[:-1])
    b = np.asarray(edges[1:])
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    wts = (half[:, None] * wg[None, :]).ravel()
    return float(np.sum(wts * fn(pts)))


def norm_density(K: NumberField, f, y, n: int = 64) -> np.ndarray:
    """Density g of the push-forward of f(v) dv under Nm: int f(v) phi(Nm v) dv = int g phi."""
    y = np.asarray(y, dtype=float)
    if K.r1 == 1 and K.r2 == 0:
        return f(y[..., None])
    if K.r1 == 0 and K.r2 == 1:
        th = 2 * pi * np.arange(4 * n) / (4 * n)
        r = np.sqrt(np.maximum(y, 0.0))
        z = r[..., None] * np.exp(1j * th)
        vals = f(z[..., None])
        out = 0.5 * vals.mean(axis=-1) * 2 * pi
        return np.where(y >= 0, out, 0.0)
    if K.r1 == 2 and K.r2 == 0:
        A = getattr(f, "support", 1.0)
        out = np.zeros_like(y)
        xg, wg = _gl(n)
        for idx, yy in np.ndenumerate(y):
            if yy == 0:
                out[idx] = np.inf
                continue
            lo = np.log(abs(yy) / A)
            hi = np.log(A)
            if lo >= hi:
                continue
            npan = max(1, int(np.ceil((hi - lo) / 0.5)))
            e = np.linspace(lo, hi, npan + 1)
            s = (0.5 * (e[:-1] + e[1:])[:, None] + 0.5 * np.diff(e)[:, None] * xg).ravel()
            ws = (0.5 * np.diff(e)[:, None] * wg).ravel()
            t = np.exp(s)
            tot = 0.0
            for sg in (1.0, -1.0):
                v = np.stack([sg * t, yy / (sg * t)], axis=-1)
                tot += np.sum(ws * f(v))
            out[idx] = tot
        return out
    raise NotImplementedError("norm density only for d <= 2")


def _nm_range(K: NumberField, f) -> float:
    A = getattr(f, "support", 1.0)
    return A ** K.degree


def averaged_I(K: NumberField, f, x: float, n: int = 16, bound: int = ENUM_BOUND):
    """I(x) = int_V f(v) h(x, Nm v) dv; returns (value, error estimate).

    The integral is taken in the norm variable y against the push-forward
    density of f, on panels whose edges include every breakpoint x*m/2, x*m
    of the window sums.  The error estimate compares n and 2n nodes.
    """
    if not 0 < x <= 1:
        raise ValueError("averaged_I needs 0 < x <= 1")
    Y = _nm_range(K, f)
    signed = K.r1 > 0 and K.degree > 1 or K.degree == 1

    def integrand(y):
        return norm_density(K, f, y) * h(K, x, y, bound)

    mmax = int(np.ceil(2 * Y / x)) + 1
    brk = sorted({0.0, Y} | {x * m / 2 for m in range(1, mmax + 1) if x * m / 2 < Y}
                 | {x * m for m in range(1, mmax + 1) if x * m < Y})
    edges = np.array(brk)
    if K.r1 == 2:
        # log singularity of the density at y = 0: dyadic refinement
        first = edges[1]
        dy = first * 2.0 ** -np.arange(0, 60)[::-1]
        edges = np.concatenate([[0.0], dy, edges[2:]])

    def run(nn):
        tot = _panel_quad(integrand, edges, nn)
        if signed:
            tot += _panel_quad(lambda y: integrand(-y), edges, nn)
        return tot

    v1 = run(n)
    v2 = run(2 * n)
    return v2, abs(v2 - v1)


class RadialBump:
    """f(v) = prod_l b(|v_l| / A) with a smooth even bump b, b(0) = 1."""

    def __init__(self, support: float = 1.0):
        self.support = float(support)

    def _b(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        ins = r < 1.0
        out[ins] = np.exp(1.0 - 1.0 / (1.0 - r[ins] ** 2))
        return out

    def __call__(self, v):
        v = np.asarray(v)
        return np.prod(self._b(np.abs(v) / self.support), axis=-1)


def lemma41_limit(K: NumberField, f0: float = 1.0) -> float:
    return sqrt(K.disc_abs) / 2 ** K.r2 * f0


# ---------------------------------------------------------------------------
# Poisson summation checks


def poisson_ideal_check(K: NumberField, f=canonical_w, R: float = 0.01, support: float = 1.0,
                        bound: int = ENUM_BOUND):
    """(lhs, main, relative discrepancy) for sum_b f(R N b) vs (Delta/R) int f."""
    X = support / R
    if X > bound:
        raise IdealError(f"Poisson check needs norms up to {X}, bound is {bound}")
    a = _counts(K, X, bound)
    m = np.arange(1, len(a))
    lhs = float(np.sum(a[1:] * f(R * m)))
    integral, _ = integrate.quad(lambda t: float(f(t)), 0.0, support, limit=200, epsabs=1e-14, epsrel=1e-13)
    main = field_invariants(K).Delta / R * integral
    return lhs, main, abs(lhs - main) / abs(main)


def _k10(t):
    return 2.0 / sqrt(pi) * np.cos(2 * pi * np.asarray(t, dtype=float))


def _k01(t):
    return special.j0(4 * pi * np.sqrt(np.asarray(t, dtype=float)))


def k20_closed_form(t):
    """(4/pi)[K0(4 pi sqrt t) - (pi/2) Y0(4 pi sqrt t)]."""
    z = 4 * pi * np.sqrt(np.asarray(t, dtype=float))
    return 4.0 / pi * (special.k0(z) - 0.5 * pi * special.y0(z))


def _k20_numeric(t: float) -> float:
    """Mellin convolution int k10(u) k10(t/u) du/u by oscillatory quadrature.

    int_0^inf cos(a u) cos(b/u) du/u is split at u0 = sqrt(b/a); the tail uses
    a Fourier-weighted rule, the head is mapped by u -> b/(a u) onto the same form.
    """
    a = 2 * pi
    b = 2 * pi * t
    u0 = sqrt(b / a)

    def tail(p, q):
        # int_{u0}^inf cos(p u) cos(q/u) du/u
        g = lambda u: np.cos(q / u) / u
        val, _ = integrate.quad(g, u0, np.inf, weight="cos", wvar=p, limlst=200, limit=400)
        return val

    # head: substitute u = b/(a s): int_0^{u0} cos(a u) cos(b/u) du/u
    #     = int_{u0}^inf cos(b/s) cos(a s) ds/s, identical to the tail
    total = 2.0 * tail(a, b)
    return 4.0 / pi * total


def poisson_kernel(r1: int, r2: int, t):
    """k_{r1,r2}(t) for (1,0), (0,1) in closed form and (2,0) by numeric Mellin convolution."""
    if (r1, r2) == (1, 0):
        return _k10(t)
    if (r1, r2) == (0, 1):
        return _k01(t)
    if (r1, r2) == (2, 0):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.array([_k20_numeric(float(s)) for s in t_arr])
        return out if np.ndim(t) else float(out[0])
    raise ValueError(f"unsupported signature ({r1}, {r2})")


def f_tilde(f, y, r1: int, r2: int, support: float = 1.0, n: int = 400):
    """int_0^inf f(t) k_{r1,r2}(t y) dt for a weight supported in [0, support]."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    edges = np.linspace(0.0, support, 81)
    xg, wg = _gl(max(8, n // 80))
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    t = (mid[:, None] + half[:, None] * xg).ravel()
    wt = (half[:, None] * wg).ravel() * f(t)
    keep = wt != 0
    t, wt = t[keep], wt[keep]
    out = np.array([np.sum(wt * poisson_kernel(r1, r2, t * yy)) for yy in y])
    return out


def element_poisson_check(K: NumberField, f, support: float, dual_terms: int = 2000):
    """Element-level Poisson over o for an imaginary quadratic field with h_K = 1.

    lhs = sum over nonzero alpha in o/U of f(|N alpha|)
    rhs = (Delta/h) int f + 2^{r2} pi^{d/2}/sqrt(D) * sum over nonzero beta in d^{-1}/U of f~(|N beta|)
    Returns (lhs, rhs, relative discrepancy).
    """
    if not (K.degree == 2 and K.r2 == 1 and K.class_number == 1):
        raise ValueError("element-level check implemented for imaginary quadratic fields with h = 1")
    a = _counts(K, support)
    m = np.arange(1, len(a))
    lhs = float(np.sum(a[1:] * f(m.astype(float))))
    integral, _ = integrate.quad(lambda t: float(f(t)), 0.0, support, limit=200)
    Delta = field_invariants(K).Delta
    main = Delta / K.class_number * integral
    # d^{-1} = (delta)^{-1}: N beta = N(gamma)/N(d) with gamma in o
    Nd = float(K.different.norm)
    a2 = _counts(K, dual_terms)
    mm = np.arange(1, len(a2))
    keep = a2[1:] > 0
    yy = mm[keep] / Nd
    ft = f_tilde(f, yy, 0, 1, support)
    dual = float(np.sum(a2[1:][keep] * ft))
    coef = 2 ** K.r2 * pi ** (K.degree / 2) / sqrt(K.disc_abs)
    rhs = main + coef * dual
    return lhs, rhs, abs(lhs - rhs) / abs(rhs)
