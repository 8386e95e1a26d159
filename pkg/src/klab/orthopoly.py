"""Exact recurrence coefficients, polynomials, zeros and Gauss rules for the
weight ``exp(-N s z)`` on ``[-1, 1]``.

Monic polynomials satisfy ``z p_n = p_{n+1} + alpha_n p_n + beta_n p_{n-1}``.
Everything is computed from closed-form moments by the mixed-moment
(Chebyshev) algorithm at a precision large enough to absorb its
exponential ill-conditioning.  The diagonal sequence ``N = n`` is obtained
by building one table per ``n``; rows with different ``N`` are never mixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import mpmath
from mpmath import mp

from . import kernels
from .errors import DegenerateMoment, NoConvergence, Nonexistent, ZeroDerivative
from .precision import PrecisionContext, aberth_roots, circle_seeds


@dataclass(frozen=True)
class Weight:
    s: mpmath.mpc
    N: int

    def __init__(self, s, N: int):
        if int(N) != N or N < 1:
            raise ValueError("N must be a positive integer")
        object.__setattr__(self, "s", mpmath.mpc(s))
        object.__setattr__(self, "N", int(N))

    @property
    def c(self):
        return self.N * self.s


@dataclass(frozen=True)
class MomentTable:
    c: mpmath.mpc
    k_max: int
    m: tuple


@dataclass(frozen=True)
class RecurrenceRow:
    n: int
    alpha: object
    beta: object
    h: object
    exists: bool


@dataclass(frozen=True)
class RecurrenceTable:
    weight: Weight
    rows: tuple
    digits: int

    @property
    def first_degenerate(self):
        for row in self.rows:
            if not row.exists:
                return row.n
        return None

    def row(self, n: int) -> RecurrenceRow:
        r = self.rows[n]
        if not r.exists:
            raise DegenerateMoment(n, self.weight.N)
        return r

    def alphas(self, upto: int):
        return [self.row(k).alpha for k in range(upto)]

    def betas(self, upto: int):
        return [self.row(k).beta for k in range(upto)]


@dataclass(frozen=True)
class QuadratureRule:
    n: int
    nodes: tuple
    weights: tuple


@dataclass(frozen=True)
class DiagonalEntry:
    n: int
    alpha: object
    beta: object
    h: object
    digits: int


def required_digits(s, n: int) -> int:
    """Working digits that keep row ``n`` of the diagonal table accurate.

    The measured loss of the mixed-moment algorithm is about
    ``n (0.75 + 0.5 |Re s|)`` digits; the first term below covers it near the
    imaginary axis and the second takes over for large real parts.
    """
    s = mpmath.mpc(s)
    base = 2.2 * n + 0.9 * n * abs(float(s.imag))
    real_growth = n * (0.9 + 0.6 * abs(float(s.real)))
    return int(math.ceil(40 + max(base, real_growth)))


def _moment_extra_digits(c, k_max: int) -> int:
    # growth of rounding errors in the forward recurrence (factor k/|c| per
    # step once k > |c|) plus the cancellation against exp(|Re c|)
    ac = float(abs(c))
    amp = 0.0
    for k in range(max(1, int(ac) + 1), k_max + 1):
        amp += math.log10(k / ac)
    return int(amp + abs(float(c.real)) / math.log(10) + abs(math.log10(ac)) + 10)


def compute_moments(weight: Weight, k_max: int, ctx: PrecisionContext) -> MomentTable:
    """``m_k = int_{-1}^{1} z^k exp(-c z) dz`` for ``k = 0..k_max`` with ``c = N s``."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    with ctx.working():
        c = mpmath.mpc(weight.c)
        if c == 0:
            m = [mpmath.mpc(mpmath.mpf(2) / (k + 1)) if k % 2 == 0 else mpmath.mpc(0) for k in range(k_max + 1)]
            return MomentTable(c, k_max, tuple(m))
        if abs(c) < mpmath.mpf(10) ** (-(ctx.digits / 4)):
            return MomentTable(c, k_max, tuple(_moments_taylor(c, k_max)))
        extra = _moment_extra_digits(c, k_max)
        digits = ctx.work_digits + extra
        with mp.workdps(digits):
            inv_c = 1 / c
            plus = mpmath.exp(c) * inv_c
            minus = mpmath.exp(-c) * inv_c
            m0 = plus - minus
            raw = kernels.backend.moments_forward(inv_c, plus, minus, m0, k_max, digits)
        m = tuple(+v for v in raw)
        return MomentTable(c, k_max, m)


def _moments_taylor(c, k_max):
    # m_k = sum_j (-c)^j / j! * 2/(k+j+1) over k+j even
    eps = mpmath.eps
    out = []
    for k in range(k_max + 1):
        total = mpmath.mpc(0)
        term = mpmath.mpc(1)
        j = 0
        while True:
            if (k + j) % 2 == 0:
                contrib = term * 2 / (k + j + 1)
                total += contrib
                if j > 0 and abs(contrib) <= eps * abs(total):
                    break
            j += 1
            term *= -c / j
            if j > 10000:
                raise NoConvergence("Taylor series for small-c moments")
        out.append(total)
    return out


def moment_recurrence_defect(table: MomentTable) -> mpmath.mpf:
    """Largest relative defect of the integration-by-parts identity."""
    c = table.c
    if c == 0:
        worst = mpmath.mpf(0)
        for k, v in enumerate(table.m):
            exact = mpmath.mpf(2) / (k + 1) if k % 2 == 0 else 0
            worst = max(worst, abs(v - exact))
        return worst
    ec, emc = mpmath.exp(c), mpmath.exp(-c)
    worst = mpmath.mpf(0)
    for k in range(1, table.k_max + 1):
        rhs = ((-1) ** k * ec - emc) / c + k * table.m[k - 1] / c
        scale = max(abs(table.m[k]), abs(ec / c), abs(k * table.m[k - 1] / c))
        worst = max(worst, abs(table.m[k] - rhs) / scale)
    return worst


def recurrence_from_moments(moments: MomentTable, n_max: int, ctx: PrecisionContext, weight: Weight | None = None) -> RecurrenceTable:
    """Rows ``0..n_max`` of the recurrence from the mixed-moment table.

    The table stops at the first vanishing diagonal mixed moment; that row and
    all later ones are flagged as nonexistent.
    """
    if moments.k_max < 2 * n_max + 1:
        raise ValueError("need k_max >= 2 n_max + 1")
    with ctx.working():
        loss = ctx.work_digits - 5
        c = moments.c
        # m_0 = 2 sinh(c)/c cancels from terms of size |e^{+-c}/c|
        m0_scale = 2 * mpmath.cosh(abs(c.real)) / abs(c) if c != 0 else 2
        if abs(moments.m[0]) < mpmath.mpf(10) ** (-loss) * m0_scale:
            alpha, beta, norms = [], [], []
        else:
            alpha, beta, norms, _ = kernels.backend.chebyshev(list(moments.m), n_max, ctx.work_digits, loss)
        rows = []
        for k in range(len(alpha)):
            rows.append(RecurrenceRow(k, +alpha[k], +beta[k], +norms[k], True))
        for k in range(len(alpha), n_max + 1):
            rows.append(RecurrenceRow(k, None, None, None, False))
        if weight is None:
            weight = Weight(moments.c, 1)
        return RecurrenceTable(weight, tuple(rows), ctx.digits)


def _key(s):
    s = mpmath.mpc(s)
    return (s.real, s.imag)


@lru_cache(maxsize=256)
def _table_cached(s_re, s_im, N, n_max, digits, guard):
    ctx = PrecisionContext(digits, guard)
    w = Weight(mpmath.mpc(s_re, s_im), N)
    with ctx.working():
        mom = compute_moments(w, 2 * n_max + 1, ctx)
        return recurrence_from_moments(mom, n_max, ctx, weight=w)


def recurrence_table(s, N: int, n_max: int, ctx: PrecisionContext) -> RecurrenceTable:
    """Rows ``0..n_max`` for the weight ``exp(-N s z)`` at the precision of ``ctx``."""
    re, im = _key(s)
    return _table_cached(re, im, int(N), int(n_max), ctx.digits, ctx.guard_digits)


def working_context(s, n: int, ctx: PrecisionContext) -> PrecisionContext:
    return ctx.with_digits(max(ctx.digits, required_digits(s, n)))


def _diagonal_entry(s, n, ctx):
    table = recurrence_table(s, n, n, ctx)
    row = table.row(n)
    return DiagonalEntry(n, row.alpha, row.beta, row.h, ctx.digits)


def diagonal_recurrence(s, n_list: Sequence[int], ctx: PrecisionContext, validate: bool = False, max_retries: int = 3):
    """``(n, alpha_n^n, beta_n^n)`` for every requested ``n``.

    Each ``n`` gets its own table at ``max(ctx.digits, required_digits)``
    digits.  With ``validate`` each value is recomputed at 1.5 times the
    digits and the precision is raised until the two agree to
    ``10^(-ctx.digits+5)``.
    """
    out = []
    for n in n_list:
        if int(n) != n or n < 1:
            raise ValueError("each n must be a positive integer")
        wctx = working_context(s, n, ctx)
        try:
            entry = _diagonal_entry(s, n, wctx)
            if validate:
                for _ in range(max_retries + 1):
                    hi = wctx.scaled(1.5)
                    check = _diagonal_entry(s, n, hi)
                    with hi.working():
                        tol = mpmath.mpf(10) ** (-ctx.digits + 5)
                        ok = abs(check.alpha - entry.alpha) <= tol * max(1, abs(check.alpha)) and abs(
                            check.beta - entry.beta
                        ) <= tol * max(1, abs(check.beta))
                    if ok:
                        break
                    wctx, entry = hi, check
                else:
                    raise NoConvergence(f"precision self-validation failed for n={n}")
        except DegenerateMoment as exc:
            raise DegenerateMoment(exc.k, n) from None
        out.append(entry)
    return out


def _poly_table(s, N, n, ctx):
    wctx = working_context(s, max(n, N), ctx)
    table = recurrence_table(s, N, max(n - 1, 0), wctx)
    try:
        alphas = table.alphas(n)
        betas = table.betas(n)
    except DegenerateMoment as exc:
        raise Nonexistent(f"p_{n} does not exist for N={N}: {exc}") from None
    return wctx, table, alphas, betas


def eval_poly(s, n: int, z, ctx: PrecisionContext, N: int | None = None):
    """Monic ``p_n^N(z)`` and its derivative; ``N`` defaults to the diagonal ``n``."""
    N = n if N is None else N
    if n == 0:
        return mpmath.mpc(1), mpmath.mpc(0)
    wctx, _table, alphas, betas = _poly_table(s, N, n, ctx)
    (p, d, _q), = kernels.backend.three_term_many(alphas, betas, n, [mpmath.mpc(z)], wctx.work_digits)
    return p, d


def zeros(s, n: int, ctx: PrecisionContext, N: int | None = None, seed: int = 0):
    """The ``n`` zeros of ``p_n^N`` sorted by (Re, Im)."""
    N = n if N is None else N
    wctx, _table, alphas, betas = _poly_table(s, N, n, ctx)

    def many(zs):
        return [(p, d) for p, d, _q in kernels.backend.three_term_many(alphas, betas, n, zs, wctx.work_digits)]

    with wctx.working():
        roots = aberth_roots(None, n, wctx, seeds=circle_seeds(n, 2, seed), p_eval_many=many)
    return sorted(roots, key=lambda z: (z.real, z.imag))


def gauss_rule(s, N: int, n: int, ctx: PrecisionContext) -> QuadratureRule:
    """Nodes at the zeros of ``p_n^N`` with Christoffel weights
    ``h_{n-1} / (p_n'(z_j) p_{n-1}(z_j))``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    wctx = working_context(s, max(n, N), ctx)
    table = recurrence_table(s, N, n, wctx)
    try:
        alphas = table.alphas(n)
        betas = table.betas(n)
        h_prev = table.row(n - 1).h
    except DegenerateMoment as exc:
        raise Nonexistent(str(exc)) from None
    nodes = zeros(s, n, ctx, N=N)
    vals = kernels.backend.three_term_many(alphas, betas, n, nodes, wctx.work_digits)
    weights = []
    with wctx.working():
        for p, d, q in vals:
            if d == 0 or q == 0:
                raise ZeroDerivative("vanishing derivative at a Gauss node")
            weights.append(h_prev / (d * q))
    return QuadratureRule(n, tuple(nodes), tuple(weights))


def oscillatory_integral(rule: QuadratureRule, f: Callable):
    return mpmath.fsum(w * f(z) for z, w in zip(rule.nodes, rule.weights))
