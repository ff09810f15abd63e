"""Counting zeros of cubic forms: direct enumeration against the delta-method decomposition."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from itertools import product
from math import gcd

import numpy as np
from scipy import signal

from .delta import ENUM_BOUND, c_Q, field_invariants, h
from .expsums import CostBoundExceeded, S_tilde
from .forms import CubicForm, eval_terms_coords
from .ideals import enumerate_ideals, factor_ideal
from .nf import NumberField
from .oscillatory import CountingWeight, plateau, singular_integral

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# direct count


def _candidates(W: CountingWeight, i: int, P: float):
    """Elements x of o (coordinates) with W's i-th coordinate factor at x/P non-zero, and that factor."""
    K = W.F.K
    E = K.real_embedding_matrix()  # coords -> real coordinates of V
    centre, half = [], []
    for l in range(K.n_places):
        c = W.xi[l][i]
        if l < K.r1:
            centre.append(P * float(c))
            half.append(P * W.delta0)
        else:
            centre += [P * float(np.real(c)), P * float(np.imag(c))]
            half += [P * W.delta0, P * W.delta0]
    Einv = np.linalg.inv(E)
    centre, half = np.array(centre), np.array(half)
    mid = centre @ Einv
    rad = np.abs(Einv).T @ half
    ranges = [range(int(np.floor(m - r)) - 1, int(np.ceil(m + r)) + 2) for m, r in zip(mid, rad)]
    pts = np.array(list(product(*ranges)), dtype=np.int64)
    emb = pts @ E / P
    wt = np.ones(len(pts))
    k = 0
    for l in range(K.n_places):
        if l < K.r1:
            z = emb[:, k]
            k += 1
        else:
            z = emb[:, k] + 1j * emb[:, k + 1]
            k += 2
        wt = wt * W.coord_factor(l, i, z)
    keep = wt > 0
    return pts[keep], wt[keep]


def count_direct(F: CubicForm, W: CountingWeight, P: float | None = None, max_points: float = 1e9) -> float:
    """sum over x in o^n with F(x) = 0 of W(x / P)."""
    P = W.P if P is None else P
    cands = [_candidates(W, i, P) for i in range(F.n)]
    vol = float(np.prod([len(c[0]) for c in cands]))
    if vol > max_points:
        raise CostBoundExceeded(f"{vol:.3g} lattice points exceed {max_points:.3g}")
    if vol == 0:
        return 0.0
    total = 0.0
    # iterate over the first variable, vectorise the rest
    rest = [c[0] for c in cands[1:]]
    rest_w = [c[1] for c in cands[1:]]
    idx = np.indices([len(r) for r in rest]).reshape(len(rest), -1).T
    Xr = np.stack([rest[j][idx[:, j]] for j in range(len(rest))], axis=1)
    Wr = np.prod([rest_w[j][idx[:, j]] for j in range(len(rest))], axis=0)
    for x0, w0 in zip(*cands[0]):
        X = np.concatenate([np.broadcast_to(x0, (len(Xr), 1, len(x0))), Xr], axis=1)
        zero = ~np.any(F.eval_coords(X), axis=-1)
        total += w0 * float(np.sum(Wr[zero]))
    return total


# ---------------------------------------------------------------------------
# decomposition


@dataclass
class LedgerEntry:
    norm: int
    m_count: int
    contribution: float
    cut: int
    history: list = field(default_factory=list)


@dataclass
class CountReport:
    field: str
    form: str
    P: float
    Q: float
    direct: float | None
    decomposed: float
    prefactor: float
    c_Q: float
    ledger: list
    tol: float
    enum_radius: float
    singular_series: list = field(default_factory=list)
    main_term: float | None = None
    info: dict = field(default_factory=dict)

    @property
    def relative_error(self) -> float | None:
        if self.direct in (None, 0):
            return None
        return abs(self.direct - self.decomposed) / abs(self.direct)

    def recombine(self) -> float:
        return self.prefactor * sum(e.contribution for e in self.ledger)

    def to_json(self) -> str:
        d = asdict(self)
        d["relative_error"] = self.relative_error
        return json.dumps(d, indent=2, default=float)


def _gauss_table(f: int, b: int) -> np.ndarray:
    """G[a, c] = sum_{r mod b} e((a f r^3 + c r)/b), rows a in (Z/b)^*."""
    units = [a for a in range(1, b + 1) if gcd(a, b) == 1] if b > 1 else [0]
    r = np.arange(b)
    A = np.exp(1j * TWO_PI * np.mod(np.outer(units, f * r ** 3), b) / b)
    B = np.exp(1j * TWO_PI * np.mod(np.outer(r, r), b) / b)
    return A @ B


class _Pushforward:
    """mu_{i,a}(y) = W_i(x) Theta_{i,a}(x) / |dy/dx| on a uniform y-grid, y = kappa f_i x^3."""

    def __init__(self, W: CountingWeight, i: int, f: int, kappa: float, hy: float):
        xi = float(W.xi[0][i])
        lo, hi = xi - W.delta0, xi + W.delta0
        if lo * hi <= 0:
            raise ValueError("the support of W meets x_i = 0; the cube map is not a chart")
        ya, yb = sorted((kappa * f * lo ** 3, kappa * f * hi ** 3))
        self.k0 = int(np.floor(ya / hy))
        k1 = int(np.ceil(yb / hy))
        self.y = np.arange(self.k0, k1 + 1) * hy
        self.x = np.cbrt(self.y / (kappa * f))
        jac = np.abs(3.0 * kappa * f * self.x ** 2)
        self.base = W.coord_factor(0, i, self.x) / jac
        self.f = f


def count_decomposed(F: CubicForm, W: CountingWeight, P: float | None = None, Q: float | None = None,
                     tol: float = 1e-3, C0: int = 4, Cmax: int = 4096, hy_scale: float = 400.0,
                     bound: int = ENUM_BOUND, direct: float | None = None) -> CountReport:
    """c_Q Q^-2 sum_b sum_m b^-n S_b(m) I_b(m) for a diagonal form over Q.

    The m-sum runs over the box |c_i| <= C, m = c / b, with C doubled until
    the last shell changes the running total by at most tol.  For each b the
    sum over m is assembled as

        P^n sum_a int w2 h(rho, y) (mu_1 * ... * mu_n)(y) dy,

    where mu_i is the push-forward of W_i(x) Theta_{i,a}(x) dx under
    y = kappa f_i x^3 and Theta_{i,a}(x) = sum_c G_i(a, c) e(-P c x / b).
    This is the Parseval form of the t-integral against p_rho.
    """
    K = F.K
    if K.degree != 1 or not F.is_nonsingular_diagonal():
        raise NotImplementedError("the decomposition is implemented for non-singular diagonal forms over Q")
    P = W.P if P is None else P
    Q = P ** 1.5 if Q is None else Q
    n = F.n
    f = [int(c.coords[0]) for c in F.diagonal_coeffs()]
    kappa = P ** 3 / Q ** 2
    # range of kappa F on supp W
    lo = hi = 0.0
    for i, fi in enumerate(f):
        ends = [kappa * fi * (float(W.xi[0][i]) + s * W.delta0) ** 3 for s in (-1, 1)]
        lo += min(ends)
        hi += max(ends)
    Y = max(abs(lo), abs(hi))
    Y2 = 2.2 * Y
    bmax = int(np.floor(Q * max(1.0, 2.0 * Y)))
    cq = c_Q(K, Q, bound)
    prefactor = cq / Q ** 2
    ledger = []
    running = 0.0
    for b in range(1, bmax + 1):
        rho = b / Q
        hy = min(rho, 1.0) / hy_scale
        pushes = [_Pushforward(W, i, fi, kappa, hy) for i, fi in enumerate(f)]
        tabs = [_gauss_table(fi, b) for fi in f]
        C = C0
        hist = []
        prev = None
        while True:
            hy_need = 1.0 / (8.0 * (P * C / b) / min(abs(3 * kappa * fi * (abs(float(W.xi[0][i])) - W.delta0) ** 2)
                                                     for i, fi in enumerate(f)))
            if hy_need < hy:
                hy = hy_need
                pushes = [_Pushforward(W, i, fi, kappa, hy) for i, fi in enumerate(f)]
            val = _b_term(pushes, tabs, b, C, P, rho, Y2, hy, K, bound) / b ** n
            hist.append((C, val))
            if prev is not None and abs(val - prev) <= tol * max(abs(running + val), 1e-300):
                break
            if C >= Cmax:
                break
            prev = val
            C *= 2
        running += val
        ledger.append(LedgerEntry(b, (2 * C + 1) ** n, val, C, hist))
    total = prefactor * sum(e.contribution for e in ledger)
    return CountReport(K.name, repr(F), P, Q, direct, total, prefactor, cq, ledger, tol, W.radius * P,
                       info={"xi": [x.tolist() for x in W.xi], "delta0": W.delta0, "bmax": bmax, "Y": Y})


def _b_term(pushes, tabs, b, C, P, rho, Y2, hy, K, bound) -> float:
    """P^n sum_a int w2 h (mu_{1,a} * ... * mu_{n,a}) for one modulus and cut C."""
    c = np.arange(-C, C + 1)
    conv = None
    k0 = 0
    for push, G in zip(pushes, tabs):
        Gc = G[:, np.mod(c, b)]
        # Theta_{i,a}(x) on the grid, then mu = base * Theta
        E = np.exp(-1j * TWO_PI * P * np.outer(c, push.x) / b)
        mu = (Gc @ E) * push.base[None, :] * hy
        if conv is None:
            conv = mu
        else:
            conv = signal.fftconvolve(conv, mu, axes=1)
        k0 += push.k0
    y = (k0 + np.arange(conv.shape[1])) * hy
    g = plateau(y / Y2) * h(K, rho, y, bound)
    return float(np.real(np.sum(conv.sum(axis=0) * g))) * P ** len(pushes)


# ---------------------------------------------------------------------------
# singular series and main term


def singular_series(F: CubicForm, X: int, bound: int = ENUM_BOUND):
    """Partial sums of sum_{N b <= X} N(b)^-n S_b(0), increasing norm; returns (norms, terms, partials)."""
    K = F.K
    cache = {}

    def local(P, e):
        key = (P, e)
        if key not in cache:
            cache[key] = S_tilde(F, P.ideal ** e, [0] * F.n).value
        return cache[key]

    norms, terms = [], []
    for b in enumerate_ideals(K, X, bound):
        val = 1.0 + 0j
        for P, e in factor_ideal(b):
            val *= local(P, e)
        Nb = int(b.norm)
        norms.append(Nb)
        terms.append(float(np.real(val)) / Nb ** F.n)
    partial = np.cumsum(terms)
    return norms, terms, partial.tolist()


def series_deltas(norms, terms, X: int):
    """delta(x) = S(x) - S(x - 1) for integer cut-offs x = 1..X."""
    out = np.zeros(X + 1)
    for Nb, t in zip(norms, terms):
        if Nb <= X:
            out[Nb] += t
    return out


def main_term(F: CubicForm, P: float, S_hat: float, J0: float) -> float:
    """2^{r2 (n-1)} D_K^{-(n-1)/2} S J(0) P^{(n-3) d}."""
    K = F.K
    n = F.n
    D = field_invariants(K).D
    return 2.0 ** (K.r2 * (n - 1)) / D ** ((n - 1) / 2) * S_hat * J0 * P ** ((n - 3) * K.degree)


def m_zero_term(F: CubicForm, W: CountingWeight, X: int) -> float:
    """(sqrt(D)/2^{r2}) P^{dn} J(0) sum_{N b <= X} N(b)^-n S_b(0): the m = 0 shape of the decomposition."""
    K = F.K
    D = field_invariants(K).D
    _, terms, _ = singular_series(F, X)
    return np.sqrt(D) / 2 ** K.r2 * W.P ** (K.degree * F.n) * singular_integral(F, W) * sum(terms)


# ---------------------------------------------------------------------------
# zero counting in boxes


def zero_count_box(K: NumberField, terms: dict, n: int, B: int, c=None, a=None, max_points: float = 1e7) -> int:
    """#{x in o^n : coordinates in [-B, B], G(x) = 0, x = a mod c}."""
    d = K.degree
    vol = float(2 * B + 1) ** (d * n)
    if vol > max_points:
        raise CostBoundExceeded(f"box of {vol:.3g} points")
    rng = np.arange(-B, B + 1)
    grid = np.stack(np.meshgrid(*([rng] * (d * n)), indexing="ij"), axis=-1).reshape(-1, n, d)
    keep = np.ones(len(grid), dtype=bool)
    if c is not None:
        a = a if a is not None else [[0] * d] * n
        A = np.array([[int(t) for t in (x.coords if hasattr(x, "coords") else x)] for x in a], dtype=np.int64)
        keep &= np.all(c.contains_array(grid - A[None, :, :]), axis=-1)
    grid = grid[keep]
    if len(grid) == 0:
        return 0
    vals = eval_terms_coords(K, {e: (v if hasattr(v, "coords") else K(v)) for e, v in terms.items()}, grid)
    return int(np.sum(~np.any(vals, axis=-1)))
