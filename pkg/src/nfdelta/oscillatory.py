"""Oscillatory integrals: the counting weight W, I_b(m), p_rho, the fibre integral and heights."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import log, pi

import numpy as np
from scipy import integrate

from .delta import ENUM_BOUND, h
from .forms import CubicForm
from .nf import FieldElement, NumberField

TWO_PI = 2.0 * np.pi


class QuadratureError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# smooth cut-offs


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def plateau(r):
    """1 on [0, 1/2], 0 on [1, inf), smooth in between."""
    return smooth_step(2.0 - 2.0 * np.abs(np.asarray(r, dtype=float)))


def _gl(n):
    return np.polynomial.legendre.leggauss(int(n))


def gl_nodes(a: float, b: float, n: int, panels: int = 1):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _gl(n)
    e = np.linspace(a, b, panels + 1)
    mid = 0.5 * (e[:-1] + e[1:])
    half = 0.5 * np.diff(e)
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


# ---------------------------------------------------------------------------
# places


def place_exponents(K: NumberField):
    return [1] * K.r1 + [2] * K.r2


def embed_vector(K: NumberField, vec):
    """FieldElements -> array (n_places, n), complex for complex places."""
    rows = [np.asarray(x.embed(), dtype=complex) if isinstance(x, FieldElement) else
            np.asarray(K(x).embed(), dtype=complex) for x in vec]
    return np.array(rows).T


def norm_of_places(K: NumberField, vals):
    """Nm over places: prod real v_l * prod |complex v_l|^2; vals indexed by place first."""
    out = 1.0
    for l, e in enumerate(place_exponents(K)):
        v = vals[l]
        out = out * (np.real(v) if e == 1 else np.abs(v) ** 2)
    return out


def trace_pairing(K: NumberField, m_emb, x_emb):
    """Tr(m.x) for embedded vectors: real places m x, complex places 2 Re(m x)."""
    out = 0.0
    for l, e in enumerate(place_exponents(K)):
        s = np.sum(m_emb[l] * x_emb[l], axis=-1)
        out = out + (np.real(s) if e == 1 else 2.0 * np.real(s))
    return out


# ---------------------------------------------------------------------------
# height


def height(K: NumberField, v) -> float:
    """H(v) = prod over places with |v_l| > 1 of |v_l|^{e_l}; empty product 1."""
    vals = np.asarray(v.embed() if isinstance(v, FieldElement) else v, dtype=complex)
    out = 1.0
    for l, e in enumerate(place_exponents(K)):
        a = abs(vals[l])
        if a > 1:
            out *= a ** e
    return out


def height_integral(K: NumberField, alpha: float, A: float) -> float:
    """int over {H(v) <= A} of H(v)^alpha dv on V.

    In s_l = log max(1, |v_l|^{e_l}) each place contributes an atom of mass
    2 (real) or pi (complex) at s = 0 and density 2 e^s or pi e^s for s > 0.
    """
    L = log(A)
    places = place_exponents(K)
    atom = [2.0 if e == 1 else pi for e in places]
    dens = [(lambda s, c=c: c * np.exp(s)) for c in atom]

    def rec(k: int, budget: float) -> float:
        if k == len(places):
            return 1.0
        total = atom[k] * rec(k + 1, budget)
        if budget > 0:
            f = lambda s: dens[k](s) * np.exp(alpha * s) * rec(k + 1, budget - s)
            total += integrate.quad(f, 0.0, budget, limit=200)[0]
        return total

    return rec(0, L)


# ---------------------------------------------------------------------------
# the counting weight


def find_xi(F: CubicForm, place: int = 0, grid: int = 2, margin: float = 0.1):
    """Zero of F at a place with |d_1 F| large, from a coarse integer grid of (x_2..x_n)."""
    K = F.K
    real = place < K.r1
    best, best_m = None, -1.0
    for u in product(range(-grid, grid + 1), repeat=F.n - 1):
        if not any(u):
            continue
        # F(s, u) as a cubic polynomial in s, from four evaluations
        nodes = (0, 1, -1, 2)
        vals = [complex(F.eval_place(np.array([s, *u], dtype=complex), place)) for s in nodes]
        V = np.array([[s ** k for k in range(4)] for s in nodes], dtype=complex)
        coef = np.linalg.solve(V, np.array(vals))
        roots = np.roots(coef[::-1]) if abs(coef[3]) > 1e-12 else []
        for r in roots:
            if real and abs(r.imag) > 1e-9:
                continue
            x = np.array([r.real if real else r, *u], dtype=complex if not real else float)
            x = x / np.linalg.norm(x)
            g = abs(F.grad_place(x, place)[0])
            if g > best_m:
                best, best_m = x, g
    if best is None or best_m < margin:
        raise ValueError("no zero with a usable gradient margin found")
    return best


@dataclass
class CountingWeight:
    """W(x) = w0(x) omega(x): plateau bumps of radius delta0 around xi times exp(-(log P)^4 |x - xi|^2)."""

    F: CubicForm
    xi: list
    delta0: float = 0.25
    P: float = 10.0
    margin: float = 0.1
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        K = self.F.K
        self.xi = [np.asarray(x, dtype=float if l < K.r1 else complex) for l, x in enumerate(self.xi)]
        if len(self.xi) != K.n_places:
            raise ValueError("xi needs one vector per place")
        for l, x in enumerate(self.xi):
            res = abs(self.F.eval_place(x, l))
            if res > 1e-10:
                raise ValueError(f"F(xi) = {res:g} at place {l}")
            g = abs(self.F.grad_place(x, l)[0])
            if g < self.margin:
                raise ValueError(f"gradient margin {g:g} below {self.margin} at place {l}")
            self.info[f"grad1_place{l}"] = float(g)
        self.lam = log(self.P) ** 4

    @classmethod
    def default(cls, F: CubicForm, P: float, delta0: float = 0.25, xi=None):
        K = F.K
        if xi is None:
            xi = [find_xi(F, l) for l in range(K.n_places)]
        elif np.ndim(xi) == 1:
            xi = [np.asarray(xi) for _ in range(K.n_places)]
        return cls(F, list(xi), delta0, P)

    @property
    def radius(self) -> float:
        """Sup-norm radius containing supp W."""
        return max(float(np.max(np.abs(x))) for x in self.xi) + self.delta0

    def coord_factor(self, l: int, i: int, x):
        d = np.asarray(x) - self.xi[l][i]
        a = np.abs(d)
        return plateau(a / self.delta0) * np.exp(-self.lam * a ** 2)

    def place_factor(self, l: int, x):
        """W at place l for x of shape (..., n)."""
        out = 1.0
        for i in range(self.F.n):
            out = out * self.coord_factor(l, i, x[..., i])
        return out

    def __call__(self, xs):
        """xs: list over places of arrays (..., n)."""
        out = 1.0
        for l, x in enumerate(xs):
            out = out * self.place_factor(l, np.asarray(x))
        return out


# ---------------------------------------------------------------------------
# p_rho


def p_rho(K: NumberField, rho: float, v, support: float = 2.0, nodes: int = 48,
          bound: int = ENUM_BOUND, budget: float = 4e6) -> complex:
    """int_V w2(x) h(rho, Nm x) e(-Tr(v x)) dx with w2 = prod_l plateau(|x_l| / support).

    Panels follow the breakpoints of h and are split so that none is longer
    than one wavelength of the phase.
    """
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if not 0 < rho <= 1:
        raise ValueError("rho must lie in (0, 1]")
    if K.degree == 1:
        brk = _split(_h_breaks(rho, support), 1.0 / max(abs(v[0].real), 1e-300))
        _check_nodes(len(brk) * nodes, budget)
        pts, wts = _panels(brk, nodes)
        pts = np.concatenate([-pts[::-1], pts])
        wts = np.concatenate([wts[::-1], wts])
        g = plateau(pts / support) * h(K, rho, pts, bound)
        return complex(np.sum(wts * g * np.exp(-1j * TWO_PI * v[0].real * pts)))
    if K.r2 == 1 and K.r1 == 0:
        # radial: Tr(v x) = 2 Re(v x) integrates over the angle to J0(4 pi |v| r)
        from scipy.special import j0

        brk = np.sqrt(_h_breaks(rho, support ** 2))
        brk = _split(brk, 1.0 / max(2.0 * abs(v[0]), 1e-300))
        _check_nodes(len(brk) * nodes, budget)
        r, wr = _panels(brk, nodes)
        g = plateau(r / support) * h(K, rho, r * r, bound)
        return complex(np.sum(wr * TWO_PI * r * g * j0(4 * pi * abs(v[0]) * r)))
    if K.r1 == 2:
        brk = np.linspace(-support, support, 2 * int(np.ceil(support / min(rho, 0.25))) + 1)
        vmax = max(abs(v[0].real), abs(v[1].real))
        brk = _split(brk, 2.0 / max(vmax, 1e-300))
        _check_nodes((len(brk) * nodes // 2) ** 2, budget)
        x1, w1 = _panels(brk, nodes // 2)
        X1, X2 = np.meshgrid(x1, x1, indexing="ij")
        W = np.outer(w1, w1)
        g = plateau(X1 / support) * plateau(X2 / support) * h(K, rho, X1 * X2, bound)
        ph = np.exp(-1j * TWO_PI * (v[0].real * X1 + v[1].real * X2))
        return complex(np.sum(W * g * ph))
    raise NotImplementedError("p_rho for degree <= 2")


def _check_nodes(count: float, budget: float):
    if count > budget:
        raise QuadratureError(f"p_rho needs {count:.3g} nodes, budget is {budget:.3g}")


def _split(edges, width: float):
    """Subdivide panels so that none is longer than width."""
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        k = max(1, int(np.ceil((b - a) / width)))
        out.extend(a + (b - a) * np.arange(1, k + 1) / k)
    return np.array(out)


def _h_breaks(rho: float, Y: float):
    """Panel edges for y -> h(rho, y) on [0, Y]: every rho m / 2 and rho m."""
    mmax = int(np.ceil(2 * Y / rho)) + 1
    e = {0.0, Y} | {rho * m / 2 for m in range(1, mmax + 1)} | {rho * m for m in range(1, mmax + 1)}
    return np.array(sorted(x for x in e if 0 <= x <= Y))


def _panels(edges, n):
    x, w = _gl(n)
    a, b = edges[:-1], edges[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def p_rho_on_grid(K: NumberField, rho: float, t, support: float, hy: float | None = None,
                  bound: int = ENUM_BOUND) -> np.ndarray:
    """p_rho(t) for K = Q on many t at once (trapezoid in y; the integrand is smooth and compactly supported)."""
    if K.degree != 1:
        raise NotImplementedError("grid evaluation is for K = Q")
    hy = hy or min(rho, 1.0) / 160.0
    ny = int(np.ceil(support / hy))
    y = np.linspace(-support, support, 2 * ny + 1)
    step = y[1] - y[0]
    g = plateau(y / support) * h(K, rho, y, bound)
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape, dtype=complex)
    flat = t.ravel()
    for s in range(0, len(flat), 256):
        tt = flat[s:s + 256]
        out.ravel()[s:s + 256] = step * (np.exp(-1j * TWO_PI * np.outer(tt, y)) @ g)
    return out


# ---------------------------------------------------------------------------
# I_b(m)


@dataclass
class IntegralResult:
    value: complex
    error: float
    nodes: int


def _support_box(W: CountingWeight):
    """Per real coordinate of V^n: (centre, half-width)."""
    K = W.F.K
    boxes = []
    for l in range(K.n_places):
        for i in range(W.F.n):
            c = W.xi[l][i]
            if l < K.r1:
                boxes.append((float(c), W.delta0))
            else:
                boxes.append((float(np.real(c)), W.delta0))
                boxes.append((float(np.imag(c)), W.delta0))
    return boxes


def _assemble(W: CountingWeight, Z):
    """Real coordinate array (..., D) -> list of per-place arrays (..., n)."""
    K = W.F.K
    n = W.F.n
    xs, k = [], 0
    for l in range(K.n_places):
        if l < K.r1:
            xs.append(Z[..., k:k + n])
            k += n
        else:
            re = Z[..., k:k + 2 * n:2]
            im = Z[..., k + 1:k + 2 * n:2]
            xs.append(re + 1j * im)
            k += 2 * n
    return xs


def I_b(F: CubicForm, W: CountingWeight, b, m, Q: float, nodes: int | None = None,
        tol: float = 1e-6, budget: int = 4 * 10 ** 6, bound: int = ENUM_BOUND) -> IntegralResult:
    """P^{dn} int W(x) h(rho, kappa Nm F(x)) e(-P Tr(m.x)) dx with rho = N(b)/Q^d, kappa = P^{3d}/Q^{2d}."""
    K = F.K
    d, n = K.degree, F.n
    if (d == 1 and n > 4) or (d == 2 and n > 3) or d > 2:
        raise QuadratureError("dimension above the quadrature cap")
    Nb = float(b.norm) if hasattr(b, "norm") else float(b)
    rho = Nb / Q ** d
    kappa = W.P ** (3 * d) / Q ** (2 * d)
    m_emb = embed_vector(K, m) if m is not None else np.zeros((K.n_places, n))
    boxes = _support_box(W)
    D = len(boxes)
    freq = max(1.0, W.P * float(np.max(np.abs(m_emb))) * 2)
    if nodes is None:
        nodes = int(np.clip(16 + 8 * 2 * W.delta0 * freq, 16, 400))

    def run(q):
        if q ** D > budget:
            raise QuadratureError(f"{q}^{D} nodes exceed the budget {budget}")
        axes = [gl_nodes(c - r, c + r, q) for c, r in boxes]
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        Z = np.stack(grids, axis=-1)
        wt = 1.0
        for k, (_, w) in enumerate(axes):
            sh = [1] * D
            sh[k] = len(w)
            wt = wt * w.reshape(sh)
        xs = _assemble(W, Z)
        Fv = [F.eval_place(x, l) for l, x in enumerate(xs)]
        y = kappa * norm_of_places(K, Fv)
        val = W(xs) * h(K, rho, y, bound) * np.exp(-1j * TWO_PI * W.P * trace_pairing(K, m_emb, xs))
        return complex(np.sum(wt * val)) * W.P ** (d * n)

    v1 = run(nodes)
    q2 = int(np.ceil(nodes * 1.5))
    if q2 ** D <= budget:
        v2 = run(q2)
        err = abs(v2 - v1)
        return IntegralResult(v2, err, q2 ** D)
    return IntegralResult(v1, float("nan"), nodes ** D)


# ---------------------------------------------------------------------------
# the singular integral


def _newton_first(F: CubicForm, l: int, u, v, x0, iters: int = 60):
    """Solve F^{(l)}(x1, u) = v for x1, vectorised over u."""
    x1 = np.full(u.shape[:-1], x0, dtype=complex if l >= F.K.r1 else float)
    for _ in range(iters):
        X = np.concatenate([x1[..., None], u], axis=-1)
        f = F.eval_place(X, l) - v
        g = F.grad_place(X, l)[..., 0]
        step = f / np.where(np.abs(g) > 1e-300, g, 1e-300)
        x1 = x1 - step
        if np.max(np.abs(step)) < 1e-14:
            break
    X = np.concatenate([x1[..., None], u], axis=-1)
    ok = np.abs(F.eval_place(X, l) - v) < 1e-9
    return x1, ok


def singular_integral_place(F: CubicForm, W: CountingWeight, l: int, v: complex = 0.0,
                            nodes: int = 64) -> float:
    """Fibre integral at one place: int W(f(v, u), u) |d_v f|^{e_l} du over the chart x1 = f(v, u)."""
    K = F.K
    n = F.n
    real = l < K.r1
    xi = W.xi[l]
    axes = []
    for i in range(1, n):
        if real:
            axes.append(gl_nodes(xi[i] - W.delta0, xi[i] + W.delta0, nodes))
        else:
            axes.append(gl_nodes(xi[i].real - W.delta0, xi[i].real + W.delta0, nodes))
            axes.append(gl_nodes(xi[i].imag - W.delta0, xi[i].imag + W.delta0, nodes))
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    wt = 1.0
    for k, (_, w) in enumerate(axes):
        sh = [1] * len(axes)
        sh[k] = len(w)
        wt = wt * w.reshape(sh)
    if real:
        u = np.stack(grids, axis=-1)
    else:
        u = np.stack([grids[2 * k] + 1j * grids[2 * k + 1] for k in range(n - 1)], axis=-1)
    x1, ok = _newton_first(F, l, u, v if not real else float(np.real(v)), xi[0])
    X = np.concatenate([x1[..., None], u], axis=-1)
    g = F.grad_place(X, l)[..., 0]
    jac = 1.0 / np.abs(g) if real else 1.0 / np.abs(g) ** 2
    val = np.where(ok, W.place_factor(l, X) * jac, 0.0)
    return float(np.sum(wt * val))


def singular_integral(F: CubicForm, W: CountingWeight, v=None, nodes: int = 64) -> float:
    """J(v) = prod over places of the fibre integrals."""
    K = F.K
    if v is None:
        vals = [0.0] * K.n_places
    elif isinstance(v, FieldElement):
        vals = list(v.embed())
    else:
        vals = list(np.atleast_1d(v))
    out = 1.0
    for l in range(K.n_places):
        out *= singular_integral_place(F, W, l, vals[l], nodes)
    return out


def scaling_slope(values, Ps) -> float:
    """Least-squares slope of log J against log log P."""
    x = np.log(np.log(np.asarray(Ps, dtype=float)))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
