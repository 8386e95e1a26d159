"""Predictors near breaking points.

Regular breaking points ``s*`` (``Re H(s*) = 0`` away from ``+-2``) with
``s = s* + L1/n``, and the critical point ``s = 2`` with ``s = 2 + L2 n^(-2/3)``,
where the recurrence coefficients are governed by the Hastings-McLeod type
solution of

    q'' = x q + 2 q^3 - 1/2,   q ~ sqrt(-x/2) (x -> -inf),   q ~ 1/(2x) (x -> +inf).

The boundary value problem is solved in double precision on a uniform grid;
the grid error (about ``h^2``) dominates anything extra digits would buy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.linalg import solve_banded

from .errors import BVPDiverged, NotOnBreakingCurve, OutOfDomain, RegionMismatch
from .phase_portrait import RegionLabel, classify, h0_saddle_value, saddle_root
from .precision import PrecisionContext

PII_ALPHA = 0.5


# --------------------------------------------------------------------------
# regular breaking points


def _breaking_tol(ctx, tol):
    return mpmath.mpf(10) ** (-(ctx.digits // 2)) if tol is None else mpmath.mpf(tol)


def kappa_of(s_star, ctx: PrecisionContext, tol=None):
    """``Im H(s*)`` for ``s*`` on a breaking curve (``|Re H(s*)| < tol``)."""
    with ctx.working():
        H = h0_saddle_value(s_star, ctx)
        if abs(H.real) >= _breaking_tol(ctx, tol):
            raise NotOnBreakingCurve(f"|Re H(s*)| = {mpmath.nstr(abs(H.real), 3)}")
        return H.imag


def breaking_point(re_s, ctx: PrecisionContext, lower: bool = True, y_max=4):
    """Point of the lower (or upper) breaking curve with the given real part,
    ``-2 < re_s < 2``."""
    with ctx.working():
        x = mpmath.mpf(re_s)
        if not -2 < x < 2:
            raise ValueError("the finite breaking curves lie over -2 < Re s < 2")
        sgn = -1 if lower else 1

        def f(y):
            return h0_saddle_value(mpmath.mpc(x, sgn * y), ctx).real

        # Re H > 0 near the real segment and < 0 far from it
        ys = [mpmath.mpf(y_max) * k / 400 for k in range(1, 401)]
        prev = ys[0]
        for y in ys[1:]:
            if f(prev) > 0 >= f(y):
                root = mpmath.findroot(f, (prev, y), solver="anderson")
                return mpmath.mpc(x, sgn * root)
            prev = y
        raise NotOnBreakingCurve(f"no breaking point found over Re s = {x}")


def delta_n(s_star, L1, n: int, ctx: PrecisionContext, kappa=None):
    """``exp(-i n kappa) exp(L1 (4/s*^2 - 1)^(1/2))`` with the root on the
    branch of the genus-0 h-function at the saddle."""
    with ctx.working():
        s_star, L1 = mpmath.mpc(s_star), mpmath.mpc(L1)
        k = kappa_of(s_star, ctx) if kappa is None else kappa
        return mpmath.expj(-n * k) * mpmath.exp(L1 * saddle_root(s_star, ctx))


@dataclass(frozen=True)
class RegularDSPrediction:
    n: int
    s: mpmath.mpc
    delta: mpmath.mpc
    alpha: mpmath.mpc
    beta: mpmath.mpc
    alpha_at_star: mpmath.mpc
    beta_at_star: mpmath.mpc
    alpha_theorem: mpmath.mpc
    beta_theorem: mpmath.mpc


def _expansion(s, r, dn, n):
    # coefficients evaluated at s with r = (4/s^2 - 1)^(1/2)
    rt = mpmath.sqrt(mpmath.pi)
    a = dn * (s * s + 2 * s * r - 4) / (rt * s**3) / mpmath.sqrt(n) + 2 * dn**2 * (
        s * s + 4 * s * r - 8
    ) / (mpmath.pi * s**5) / n
    b = mpmath.mpf(1) / 4 + dn * r / (2 * rt * s) / mpmath.sqrt(n) - dn**2 / (2 * mpmath.pi * s * s) / n
    return a, b


def regular_ds_predict(s_star, L1, n: int, ctx: PrecisionContext, check_region: bool = True, kappa=None):
    """Recurrence coefficients at ``s = s* + L1/n`` to order ``1/n``.

    ``alpha, beta`` evaluate the expansion coefficients at ``s`` (the root
    taken at ``s`` on the saddle branch), ``*_at_star`` at ``s*``.
    ``*_theorem`` is the other printed form, which has an extra ``n^(-1/2)``
    in the first alpha term and no ``delta_n`` in the first beta term; its
    ``sqrt(4 - s*^2)`` is read as ``s* (4/s*^2 - 1)^(1/2)``.
    """
    with ctx.working():
        s_star, L1 = mpmath.mpc(s_star), mpmath.mpc(L1)
        n = int(n)
        s = s_star + L1 / n
        if check_region:
            label = classify(s, ctx).label
            if label is not RegionLabel.G0:
                raise RegionMismatch(f"s = s* + L1/n is {label.value} at n={n}, expected G0")
        k = kappa_of(s_star, ctx) if kappa is None else kappa
        dn = delta_n(s_star, L1, n, ctx, kappa=k)
        a, b = _expansion(s, saddle_root(s, ctx), dn, n)
        r_star = saddle_root(s_star, ctx)
        a_star, b_star = _expansion(s_star, r_star, dn, n)
        q = s_star * r_star
        rt = mpmath.sqrt(mpmath.pi)
        a_thm = dn * (2 - q) * q / (rt * s_star**3 * mpmath.sqrt(n)) / mpmath.sqrt(n) - 2 * dn**2 * (2 - q) ** 2 / (
            mpmath.pi * s_star**5
        ) / n
        b_thm = mpmath.mpf(1) / 4 + q / (2 * rt * s_star**2) / mpmath.sqrt(n) - dn**2 / (2 * mpmath.pi * s_star**2) / n
        return RegularDSPrediction(n, s, dn, a, b, a_star, b_star, a_thm, b_thm)


# --------------------------------------------------------------------------
# Painleve II boundary value problem


def pii_left(x, alpha=PII_ALPHA):
    """``sqrt(-x/2) - alpha/(2x)``, valid for large negative ``x``."""
    return math.sqrt(-x / 2) - alpha / (2 * x)


def pii_right(x, alpha=PII_ALPHA):
    """``alpha/x + (2 alpha - 2 alpha^3)/x^4``, valid for large positive ``x``."""
    return alpha / x + (2 * alpha - 2 * alpha**3) / x**4


@dataclass(frozen=True)
class PIISolution:
    x: np.ndarray
    q: np.ndarray
    qprime: np.ndarray
    D: np.ndarray
    alpha: float
    residual: float
    newton_iterations: int

    @property
    def h(self):
        return float(self.x[1] - self.x[0])

    def ode_residual(self):
        """Second-difference residual at the interior nodes."""
        x, q, h = self.x, self.q, self.h
        return (q[:-2] - 2 * q[1:-1] + q[2:]) / h**2 - x[1:-1] * q[1:-1] - 2 * q[1:-1] ** 3 + self.alpha

    def rows(self):
        return zip(self.x, self.q, self.qprime, self.D)


def _residual(q, x, h, alpha, qa, qb):
    full = np.concatenate(([qa], q, [qb]))
    return (full[:-2] - 2 * full[1:-1] + full[2:]) / h**2 - x[1:-1] * q - 2 * q**3 + alpha


def _newton(x, q0, alpha, tol, max_iter):
    h = x[1] - x[0]
    qa, qb = pii_left(x[0], alpha), pii_right(x[-1], alpha)
    q = q0[1:-1].copy()
    m = q.size
    F = _residual(q, x, h, alpha, qa, qb)
    for it in range(1, max_iter + 1):
        ab = np.empty((3, m))
        ab[0, :] = 1 / h**2
        ab[2, :] = 1 / h**2
        ab[1, :] = -2 / h**2 - x[1:-1] - 6 * q**2
        step = solve_banded((1, 1), ab, -F)
        norm = np.max(np.abs(F))
        lam = 1.0
        while lam > 1e-4:
            trial = q + lam * step
            Ft = _residual(trial, x, h, alpha, qa, qb)
            if np.max(np.abs(Ft)) < (1 - lam / 4) * norm or np.max(np.abs(Ft)) < tol:
                break
            lam /= 2
        else:
            raise BVPDiverged(f"line search failed at Newton iteration {it}")
        q, F = trial, Ft
        if np.max(np.abs(F)) < tol and np.max(np.abs(lam * step)) < 1e-10:
            return np.concatenate(([qa], q, [qb])), float(np.max(np.abs(F))), it
    raise BVPDiverged(f"no convergence in {max_iter} Newton iterations")


def _initial_guess(x, alpha):
    # blend of the two asymptotic forms, switched smoothly around x = 0
    left = np.sqrt(np.maximum(-x / 2, 0) + 0.25)
    right = alpha / np.sqrt(x * x + 4)
    w = 0.5 * (1 + np.tanh(x))
    return (1 - w) * left + w * right


def solve_pii_hm(x_left=25.0, x_right=25.0, nodes: int = 4000, alpha=PII_ALPHA, tol=1e-10, max_iter=60):
    """Finite-difference solution on ``[-x_left, x_right]`` with Dirichlet data
    from the corrected endpoint asymptotics.

    If damped Newton fails from the blended initial guess, the left endpoint
    is moved out from ``-8`` in steps, each solve seeding the next.
    """
    if x_left < 8 or x_right < 8:
        raise ValueError("both half-widths must be at least 8 for the endpoint asymptotics")
    if nodes < 100:
        raise ValueError("need at least 100 nodes")
    x = np.linspace(-x_left, x_right, nodes)
    try:
        q, res, its = _newton(x, _initial_guess(x, alpha), alpha, tol, max_iter)
    except BVPDiverged:
        q = None
        for xl in list(np.arange(8.0, x_left, 4.0)) + [x_left]:
            xs = np.linspace(-xl, x_right, nodes)
            guess = _initial_guess(xs, alpha) if q is None else np.interp(xs, x_prev, q, left=pii_left(-xl, alpha))
            q, res, its = _newton(xs, guess, alpha, tol, max_iter)
            x_prev = xs
        x = x_prev
    qp = np.gradient(q, x, edge_order=2)
    D = qp**2 - q**4 - x * q**2 + 2 * alpha * q
    for arr in (x, q, qp, D):
        arr.setflags(write=False)
    return PIISolution(x, q, qp, D, float(alpha), res, its)


def _splines(sol: PIISolution):
    qpp = sol.x * sol.q + 2 * sol.q**3 - sol.alpha
    return CubicHermiteSpline(sol.x, sol.q, sol.qprime), CubicHermiteSpline(sol.x, sol.qprime, qpp)


def U_of(w, sol: PIISolution) -> float:
    """``q(w)^2 + q'(w)`` by cubic Hermite interpolation on the grid."""
    w = float(w)
    if not sol.x[0] <= w <= sol.x[-1]:
        raise OutOfDomain(f"w={w} outside [{sol.x[0]}, {sol.x[-1]}]")
    sq, sqp = _splines(sol)
    return float(sq(w)) ** 2 + float(sqp(w))


@dataclass(frozen=True)
class CriticalDSPrediction:
    n: int
    s: mpmath.mpf
    U: mpmath.mpf
    alpha: mpmath.mpf
    beta: mpmath.mpf


def critical_ds_predict(L2, n: int, sol: PIISolution, ctx: PrecisionContext) -> CriticalDSPrediction:
    """``alpha = -U(-L2) n^(-2/3)`` and ``beta = 1/4 + alpha/2`` at
    ``s = 2 + L2 n^(-2/3)``, ``L2 < 0``."""
    if not L2 < 0:
        raise ValueError("L2 must be negative")
    with ctx.working():
        U = mpmath.mpf(U_of(-float(L2), sol))
        scale = mpmath.mpf(int(n)) ** (-mpmath.mpf(2) / 3)
        alpha = -U * scale
        return CriticalDSPrediction(int(n), 2 + mpmath.mpf(L2) * scale, U, alpha, mpmath.mpf(1) / 4 + alpha / 2)
