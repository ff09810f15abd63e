"""Reproducible numerical checks of the library, one function per property.

Every check returns a CheckResult: a pass flag, a one-line summary, a list of
flat rows (one per evaluated cell or assertion, each with a 'pass' column) and
a details dict.  The acceptance tests and the CLI suites both call these
functions, so the two always report the same numbers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import log, sqrt

import numpy as np

from .characters import build_primitive_char
from .counting import count_decomposed, count_direct, series_deltas, singular_series
from .delta import (DegenerateWindow, DeltaEvaluator, RadialBump, averaged_I, c_Q, canonical_w, h,
                    indicator, poisson_ideal_check, sobolev_ladder)
from .expsums import (bilinear_matrix, deligne_sample, multiplicativity_check, ram_identity_check,
                      relation_check)
from .forms import CubicForm
from .ideals import (ZERO, alg1_uniformizer, divisors, dual_ideal, enumerate_ideals, is_zero, mobius,
                     primes_above, primes_up_to, small_elements)
from .nf import FieldElement, NumberField, builtin_fields
from .oscillatory import CountingWeight, height, p_rho, scaling_slope, singular_integral

FIELDS = ("Q", "Qi", "Qsqrt2", "Qsqrt-5")


@dataclass
class CheckResult:
    name: str
    passed: bool
    summary: str
    rows: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.summary} ({self.seconds:.1f}s)"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _field(K) -> NumberField:
    return K if isinstance(K, NumberField) else builtin_fields()[K]


def _fields(names):
    return [_field(k) for k in names]


def _ideal_label(a) -> str:
    return "(0)" if is_zero(a) else a.numerator_repr()


# ---------------------------------------------------------------------------
# delta symbol


@_timed
def check_delta_identity(fields=FIELDS, Qs=(2, 3, 4), max_norm: int = 50, tol: float = 1e-8):
    """delta_K(a) against [a = 0] on every (field, Q, a) cell.

    A Q whose support window for c_Q holds no ideal norm gives 'degenerate'
    rows, which count as failures.
    """
    rows = []
    degenerate = []
    for K in _fields(fields):
        ideals = [ZERO] + enumerate_ideals(K, max_norm)
        for Q in Qs:
            try:
                ev = DeltaEvaluator(K, Q)
            except DegenerateWindow:
                degenerate.append((K.name, Q))
                rows.extend({"field": K.name, "norm": 0 if is_zero(a) else int(a.norm), "ideal": _ideal_label(a),
                             "Q": Q, "value": "", "error": "", "status": "degenerate", "pass": False}
                            for a in ideals)
                continue
            for a in ideals:
                val = ev(a)
                err = abs(val - indicator(a))
                rows.append({"field": K.name, "norm": 0 if is_zero(a) else int(a.norm), "ideal": _ideal_label(a),
                             "Q": Q, "value": val.real, "error": err, "status": "ok", "pass": err <= tol})
    ok = [r for r in rows if r["status"] == "ok"]
    worst = max((r["error"] for r in ok), default=0.0)
    summ = f"{len(ok)} cells, max error {worst:.2e}"
    if degenerate:
        summ += f", degenerate (field, Q): {degenerate}"
    return CheckResult("delta-identity", all(r["pass"] for r in rows), summ, rows,
                       {"max_error": worst, "degenerate": degenerate, "tol": tol})


@_timed
def check_cQ(field_name="Qi", Qs=(4, 8, 16), final_tol: float = 0.02):
    """|c_Q - 1| decreasing along Qs and small at the last Q."""
    K = _field(field_name)
    rows = []
    for Q in Qs:
        c = c_Q(K, Q)
        rows.append({"field": K.name, "Q": Q, "c_Q": c, "error": abs(c - 1.0), "pass": True})
    errs = [r["error"] for r in rows]
    for k in range(1, len(rows)):
        rows[k]["pass"] = errs[k] <= errs[k - 1]
    if rows:
        rows[-1]["pass"] = rows[-1]["pass"] and errs[-1] <= final_tol
    return CheckResult("cQ-limit", all(r["pass"] for r in rows), "|c_Q - 1| = " + ", ".join(f"{e:.4g}" for e in errs),
                       rows, {"errors": errs})


# ---------------------------------------------------------------------------
# characters


def _alpha_set(K, max_norm: int):
    """Nonzero integers with |Nm| <= max_norm and T2 <= d max_norm^{2/d}, as coordinate rows."""
    d = K.degree
    els = small_elements(K.unit_ideal, bound=d * max_norm ** (2.0 / d) + 1e-9)
    out = [[int(c) for c in co] for _, co in els if abs(FieldElement(K, co).norm()) <= max_norm]
    return np.array(out, dtype=np.int64).reshape(-1, d)


@_timed
def check_char_orthogonality(fields=FIELDS, max_modulus: int = 64, max_norm: int = 100, tol: float = 1e-8):
    """Sum of all characters mod b at alpha against N(b)[b | alpha]; primitive sums on two paths.

    Phases are exact integer numerators over a common denominator, so every
    angle is evaluated from an exact fraction.
    """
    rows = []
    for K in _fields(fields):
        A = _alpha_set(K, max_norm)
        avoid = primes_up_to(K, max_modulus)
        targets = enumerate_ideals(K, max_norm)
        # one generator per target ideal, admissible for every modulus below
        G = np.array([[int(c) for c in alg1_uniformizer(a, a * K.different, avoid).coords] for a in targets],
                     dtype=np.int64)
        for b in enumerate_ideals(K, max_modulus):
            N = int(b.norm)
            sigma = build_primitive_char(b)
            M, L = bilinear_matrix(K, sigma.gamma)
            num = np.mod(np.mod(b.residues @ M, L) @ A.T, L)
            S = np.exp(2j * np.pi * num / L).sum(axis=0)
            orth = float(np.max(np.abs(S - N * b.contains_array(A)))) / N
            prim = 0.0
            if N > 1:
                num = np.mod(np.mod(b.unit_residues @ M, L) @ G.T, L)
                direct = np.exp(2j * np.pi * num / L).sum(axis=0)
                mob = np.zeros(len(targets))
                for c in divisors(b):
                    mob += mobius(b / c) * int(c.norm) * np.array([c.divides(a) for a in targets])
                prim = float(np.max(np.abs(direct - mob)))
            rows.append({"field": K.name, "norm": N, "modulus": _ideal_label(b), "gamma": repr(sigma.gamma),
                         "alphas": len(A), "ideals": len(targets), "orth_error": orth, "primitive_diff": prim,
                         "pass": orth <= tol and prim <= tol})
    wo = max((r["orth_error"] for r in rows), default=0.0)
    wp = max((r["primitive_diff"] for r in rows), default=0.0)
    pairs = sum(r["alphas"] for r in rows)
    return CheckResult("char-orthogonality", all(r["pass"] for r in rows),
                       f"{pairs} (b, alpha) pairs, max |sum - N[b|a]|/N = {wo:.2e}, primitive dual-path max diff {wp:.2e}",
                       rows, {"orth": wo, "primitive": wp})


# ---------------------------------------------------------------------------
# exponential sums

IDENTITY_FORM = "x3+2y3+3z3+xyz"


def _rel(lhs, rhs) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)


def _rand_int(K, rng, B=3):
    return K([int(c) for c in rng.integers(-B, B + 1, size=K.degree)])


def _rand_dual(b, rng, B=3):
    out = b.K.zero
    for e in dual_ideal(b).basis_elements():
        out = out + int(rng.integers(-B, B + 1)) * e
    return out


def expsum_cases(K, n: int = 3, seed: int = 0, pairs: int = 20, relations: int = 20, rams: int = 10,
                 pair_norm: int = 60, rel_norm: int = 30, ram_norm: int = 80):
    """Seeded cases: coprime pairs with v, (b, m) for the relation, (b, m) for the identity mod b d."""
    rng = np.random.default_rng(seed)
    small = [b for b in enumerate_ideals(K, pair_norm // 2) if b.norm > 1]
    cand = [(b1, b2) for i, b1 in enumerate(small) for b2 in small[i + 1:]
            if b1.norm * b2.norm <= pair_norm and b1.is_coprime(b2)]
    pick = sorted(rng.choice(len(cand), size=min(pairs, len(cand)), replace=False))
    pair_cases = [(cand[k][0], cand[k][1], [_rand_int(K, rng) for _ in range(n)]) for k in pick]
    mods = [b for b in enumerate_ideals(K, rel_norm) if b.norm > 1]
    rel_cases = []
    for _ in range(relations):
        b = mods[int(rng.integers(len(mods)))]
        rel_cases.append((b, [_rand_dual(b, rng) for _ in range(n)]))
    Nd = int(K.different.norm)
    rmods = [b for b in enumerate_ideals(K, max(ram_norm // Nd, 2)) if b.norm > 1]
    ram_cases = []
    for _ in range(rams):
        b = rmods[int(rng.integers(len(rmods)))]
        ram_cases.append((b, [_rand_dual(b, rng) for _ in range(n)]))
    return pair_cases, rel_cases, ram_cases


def _vec_label(v) -> str:
    return "(" + ", ".join(repr(x) for x in v) + ")"


@_timed
def check_expsum_identities(fields=FIELDS, form: str = IDENTITY_FORM, tol: float = 1e-6, seed: int = 0):
    """Multiplicativity, S_b(m) = S~_b(alpha m) and the identity over residues mod b d."""
    rows = []

    def add(K, kind, label, arg, lhs, rhs):
        r = _rel(lhs, rhs)
        rows.append({"field": K.name, "identity": kind, "modulus": label, "argument": arg,
                     "lhs_abs": abs(lhs), "rhs_abs": abs(rhs), "relative": r, "pass": r <= tol})

    for K in _fields(fields):
        F = CubicForm.parse(K, form)
        pairs, rels, rams = expsum_cases(K, F.n, seed)
        for b1, b2, v in pairs:
            lhs, rhs, _ = multiplicativity_check(F, b1, b2, v)
            add(K, "multiplicativity", f"{_ideal_label(b1)} x {_ideal_label(b2)}", _vec_label(v), lhs, rhs)
        for b, m in rels:
            lhs, rhs, _ = relation_check(F, b, m)
            add(K, "relation", _ideal_label(b), _vec_label(m), lhs, rhs)
        for b, m in rams:
            lhs, rhs, _ = ram_identity_check(F, b, m)
            add(K, "different", _ideal_label(b), _vec_label(m), lhs, rhs)
    parts = []
    for kind in ("multiplicativity", "relation", "different"):
        sel = [r["relative"] for r in rows if r["identity"] == kind]
        parts.append(f"{kind} {len(sel)} cases max rel {max(sel, default=0.0):.1e}")
    return CheckResult("expsum-identities", all(r["pass"] for r in rows), ", ".join(parts), rows, {"tol": tol})


@_timed
def check_deligne(form: str = "x3+y3+z3", primes=(7, 13, 19, 31), count: int = 25, seed: int = 0,
                  ceiling: float = 10.0, spread: float = 0.2, field_name="Q"):
    """max |S~_p(v)| / p^{(n+1)/2} over sampled admissible v, per prime.

    Stable means some centre c has every maximum inside [(1 - spread)c, (1 + spread)c],
    which holds exactly when max/min <= (1 + spread)/(1 - spread).
    """
    K = _field(field_name)
    F = CubicForm.parse(K, form)
    rows, maxima = [], []
    for p in primes:
        kept, flagged = deligne_sample(F, primes_above(K, p)[0], count, seed)
        for r in kept:
            rows.append({"p": p, "v": _vec_label(r.v), "status": "kept", "abs_S": abs(r.value),
                         "ratio": r.ratio, "pass": r.ratio <= ceiling})
        for r in flagged:
            rows.append({"p": p, "v": _vec_label(r.v), "status": r.reason, "abs_S": "", "ratio": "", "pass": True})
        maxima.append(max(r.ratio for r in kept))
    lo, hi = min(maxima), max(maxima)
    stable = hi / lo <= (1 + spread) / (1 - spread)
    rows.append({"p": "all", "v": "", "status": "max/min", "abs_S": "", "ratio": hi / lo, "pass": stable})
    return CheckResult("deligne", all(r["pass"] for r in rows),
                       "maxima " + ", ".join(f"p={p}: {m:.3f}" for p, m in zip(primes, maxima))
                       + f", max/min {hi / lo:.3f}", rows, {"maxima": dict(zip(primes, maxima))})


# ---------------------------------------------------------------------------
# analytic properties of h, the averaged integral and Poisson summation


@_timed
def check_averaged_I(fields=("Q", "Qi"), xs=(0.1, 0.4), tol: float = 0.1, support: float = 1.0):
    """|I(x) 2^{r2} / sqrt(D) - 1| at the first x is <= tol and smaller than at the others."""
    rows = []
    for K in _fields(fields):
        f = RadialBump(support)
        scale = 2 ** K.r2 / sqrt(K.disc_abs)
        errs = []
        for x in xs:
            val, qerr = averaged_I(K, f, x)
            errs.append(abs(val * scale - 1.0))
            rows.append({"field": K.name, "x": x, "I": val, "quad_error": qerr, "error": errs[-1],
                         "assertion": "", "pass": True})
        if errs:
            rows[-len(xs)]["assertion"] = f"error <= {tol} and smallest"
            rows[-len(xs)]["pass"] = errs[0] <= tol and all(errs[0] < e for e in errs[1:])
    summ = ", ".join(f"{r['field']} x={r['x']}: {r['error']:.3g}" for r in rows)
    return CheckResult("averaged-I", all(r["pass"] for r in rows), summ, rows)


@_timed
def check_poisson(field_name="Qi", Rs=(0.01, 0.005, 0.0025), tol: float = 0.03, at: float = 0.005):
    """Relative discrepancy of sum_b w(R N b) against (Delta/R) int w; it must shrink as R halves."""
    K = _field(field_name)
    rows = []
    for R in Rs:
        lhs, main, rel = poisson_ideal_check(K, canonical_w, R)
        rows.append({"field": K.name, "R": R, "lhs": lhs, "main": main, "relative": rel, "pass": True})
    for k in range(1, len(rows)):
        rows[k]["pass"] = rows[k]["relative"] < rows[k - 1]["relative"]
    for r in rows:
        if r["R"] == at:
            r["pass"] = r["pass"] and r["relative"] <= tol
    return CheckResult("poisson", all(r["pass"] for r in rows),
                       ", ".join(f"R={r['R']:g}: {r['relative']:.3g}" for r in rows), rows)


def _fd(K, X, Y, i, j, rel=1e-4):
    """Central finite difference of d_x^i d_y^j h at (X, Y)."""
    ex = rel * X
    ey = rel * np.maximum(np.abs(Y), X)

    def D(fn, i, j):
        if i:
            return (D(lambda x, y: fn(x + ex, y), i - 1, j) - D(lambda x, y: fn(x - ex, y), i - 1, j)) / (2 * ex)
        if j:
            return (D(lambda x, y: fn(x, y + ey), i, j - 1) - D(lambda x, y: fn(x, y - ey), i, j - 1)) / (2 * ey)
        return fn(X, Y)

    return D(lambda x, y: h(K, x, y), i, j)


H_CELLS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


def h_cell_ratios(K, N: int = 3, nx: int = 12, ny: int = 12):
    """max over a log grid of |d_x^i d_y^j h| x^{i+j+1} / (x^N [j = 0] + min(1, (x/|y|)^N))."""
    xs = np.logspace(-1.5, 0.3, nx)
    ys = np.concatenate([-np.logspace(-2, 1.5, ny), np.logspace(-2, 1.5, ny)])
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    out = {}
    for i, j in H_CELLS:
        lhs = np.abs(_fd(K, X, Y, i, j)) * X ** (i + j + 1)
        rhs = np.minimum(1.0, (X / np.abs(Y)) ** N) + (X ** N if j == 0 else 0.0)
        out[(i, j)] = float(np.max(lhs / rhs))
    return out


@_timed
def check_h_analytics(fields=FIELDS, N: int = 3):
    """Vanishing region, the uniform bound on x|h| and the derivative cells.

    Ceilings: 2 sup w for x|h| (each window sum is at most about sup w), and
    lambda^{i+j+N} = max_{k <= i+j+N} sup |w^(k)| for cell (i, j).
    """
    lam = sobolev_ladder(2 + N)
    C = 2.0 * lam[0]
    rows = []
    for K in _fields(fields):
        xv = np.repeat(np.linspace(1.0, 5.0, 10), 10)
        yv = np.tile(np.linspace(-0.5, 0.5, 10), 10) * xv
        van = float(np.max(np.abs(h(K, xv, yv))))
        rows.append({"field": K.name, "test": "vanishing", "value": van, "ceiling": 0.0, "pass": van == 0.0})
        xs = np.logspace(-2, 0.6, 32)
        ys = np.concatenate([-np.logspace(-3, 2, 16), np.logspace(-3, 2, 16)])
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        xh = float(np.max(X * np.abs(h(K, X, Y))))
        rows.append({"field": K.name, "test": "x|h|", "value": xh, "ceiling": C, "pass": xh <= C})
        for (i, j), r in h_cell_ratios(K, N).items():
            cap = lam[i + j + N]
            rows.append({"field": K.name, "test": f"cell({i},{j})", "value": r, "ceiling": cap, "pass": r <= cap})
    summ = []
    for test in ["vanishing", "x|h|"] + [f"cell({i},{j})" for i, j in H_CELLS]:
        sel = [r for r in rows if r["test"] == test]
        summ.append(f"{test} {max(r['value'] for r in sel):.3g}/{sel[0]['ceiling']:.3g}")
    return CheckResult("h-analytics", all(r["pass"] for r in rows), ", ".join(summ), rows, {"C": C, "N": N})


@_timed
def check_pdecay(fields=("Q", "Qi", "Qsqrt2"), rhos=(0.25, 0.5, 1.0), factors=(10.0, 40.0, 160.0),
                 threshold: float = 1e-3, start: float = 10.0):
    """|p_rho(v)| / |p_rho(0)| at heights factor / rho, and |p_rho(0)| / max(1, |log rho|)^{r1+r2-1}.

    Rows with factor >= start must be below threshold.  v is placed on the
    diagonal of the places so that its height equals the requested value.
    """
    rows = []
    Cs = {}
    for K in _fields(fields):
        e = K.r1 + K.r2 - 1
        for rho in rhos:
            p0 = abs(p_rho(K, rho, [0.0] * K.n_places))
            norm0 = p0 / max(1.0, abs(log(rho))) ** e
            Cs[K.name] = max(Cs.get(K.name, 0.0), norm0)
            rows.append({"field": K.name, "rho": rho, "height": 1.0, "abs_p": p0, "ratio": 1.0,
                         "normalized": norm0, "pass": True})
            for f in factors:
                comp = (f / rho) ** (1.0 / K.degree)
                v = [comp] * K.n_places if K.r2 == 0 else [comp]
                p = abs(p_rho(K, rho, v))
                ratio = p / p0
                rows.append({"field": K.name, "rho": rho, "height": height(K, v), "abs_p": p, "ratio": ratio,
                             "normalized": "", "pass": ratio <= threshold if f >= start else True})
    bad = [r for r in rows if not r["pass"]]
    summ = (f"C = {', '.join(f'{k}: {c:.3g}' for k, c in Cs.items())}; "
            f"{len(bad)} rows above {threshold:g} at height >= {start:g}/rho")
    return CheckResult("pdecay", not bad, summ, rows, {"C": Cs})


# ---------------------------------------------------------------------------
# counting, singular series and singular integral

COUNT_FORM = "x3+y3-2z3"


def count_instance(P: float = 6.0, form: str = COUNT_FORM, field_name="Q", delta0: float = 0.25, xi=None):
    """F and its counting weight; xi defaults to (1, 1, 1)/sqrt(3) for the standard form."""
    K = _field(field_name)
    F = CubicForm.parse(K, form)
    if xi is None and form == COUNT_FORM and K.degree == 1:
        xi = np.ones(3) / np.sqrt(3.0)
    return F, CountingWeight.default(F, P, delta0=delta0, xi=xi)


@_timed
def check_count(P: float = 6.0, tol: float = 1e-2, tol_factor: float = 10.0, max_gap: float = 0.05,
                form: str = COUNT_FORM, Q: float | None = None, max_points: float = 1e9):
    """Direct count against the decomposition at tol and at tol / tol_factor."""
    F, W = count_instance(P, form)
    direct = count_direct(F, W, max_points=max_points)
    rows, reports = [], []
    for t in (tol, tol / tol_factor):
        rep = count_decomposed(F, W, Q=Q, tol=t, direct=direct)
        reports.append(rep)
        rows.append({"P": P, "Q": rep.Q, "tol": t, "direct": direct, "decomposed": rep.decomposed,
                     "relative": rep.relative_error, "pass": rep.relative_error <= max_gap})
    rows[1]["pass"] = rows[1]["pass"] and rows[1]["relative"] < rows[0]["relative"]
    return CheckResult("count-compare", all(r["pass"] for r in rows),
                       f"direct {direct:.8f}, decomposed {rows[0]['decomposed']:.8f} (gap {rows[0]['relative']:.2e})"
                       f" -> {rows[1]['decomposed']:.8f} (gap {rows[1]['relative']:.2e}) at tol/{tol_factor:g}",
                       rows, {"reports": [r.to_json() for r in reports]})


@_timed
def check_singular_series(n: int = 10, X: int = 30, start: int = 8, final_tol: float = 1e-3, form=None):
    """Partial sums of the singular series; delta(x) is the increment at cut-off x.

    The deltas from `start` onward must be non-increasing in absolute value,
    the last one at most final_tol, and the partial sum positive.
    """
    K = _field("Q")
    F = CubicForm.parse(K, form) if form else CubicForm.diagonal(K, [1] * n)
    norms, terms, _ = singular_series(F, X)
    deltas = series_deltas(norms, terms, X)
    partial = np.cumsum(deltas)
    rows = []
    for x in range(1, X + 1):
        ok = True
        if x > start:
            ok = abs(deltas[x]) <= abs(deltas[x - 1])
        rows.append({"X": x, "delta": deltas[x], "partial": partial[x], "pass": bool(ok)})
    rows[-1]["pass"] = rows[-1]["pass"] and abs(deltas[X]) <= final_tol and partial[X] > 0
    ups = [r["X"] for r in rows if not r["pass"]]
    return CheckResult("singular-series", all(r["pass"] for r in rows),
                       f"S({X}) = {partial[X]:.6f}, final delta {deltas[X]:.2e}, positive {bool(np.all(partial[1:] > 0))}"
                       + (f", |delta| increases at X = {ups}" if ups else ""),
                       rows, {"partial": float(partial[X]), "final_delta": float(deltas[X]),
                              "min_partial": float(np.min(partial[1:]))})


@_timed
def check_J_scaling(Ps=(10, 20, 40), nodes: int = 128, tol: float = 0.25):
    """Slope of log J(0) against log log P, compared with -2d(n-1)."""
    rows = []
    Js = []
    for P in Ps:
        F, W = count_instance(P)
        Js.append(singular_integral(F, W, nodes=nodes))
        rows.append({"P": P, "J0": Js[-1], "J0_times_logP4": Js[-1] * log(P) ** 4, "pass": Js[-1] > 0})
    slope = scaling_slope(Js, Ps)
    target = -2.0 * F.K.degree * (F.n - 1)
    rows.append({"P": "slope", "J0": slope, "J0_times_logP4": target, "pass": abs(slope / target - 1.0) <= tol})
    return CheckResult("J-scaling", all(r["pass"] for r in rows),
                       f"J(0) = {', '.join(f'{j:.5g}' for j in Js)}, slope {slope:.3f} vs {target:g}",
                       rows, {"slope": slope, "target": target})


CRITERIA = {
    1: check_delta_identity,
    2: check_cQ,
    3: check_char_orthogonality,
    4: check_expsum_identities,
    5: check_deligne,
    6: check_averaged_I,
    7: check_poisson,
    8: check_h_analytics,
    9: check_count,
    10: check_singular_series,
    11: check_J_scaling,
}
