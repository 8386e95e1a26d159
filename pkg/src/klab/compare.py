"""Exact recurrence coefficients next to their large-n predictions.

Each regime turns a parameter set and a list of degrees into rows of
``ComparisonRow``.  Stored values are rounded to the requested digits before
the errors are formed, so re-deriving the errors from an emitted table gives
the emitted errors exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath

from . import double_scaling, genus1, orthopoly
from .errors import NearDegenerate, RegionMismatch
from .phase_portrait import RegionLabel, classify
from .precision import PrecisionContext

REGIMES = ("genus0", "genus1", "regular", "critical")


def genus0_predict(s, n: int, ctx: PrecisionContext):
    """``alpha ~ 2s/((s^2-4)^2 n^2)``, ``beta ~ 1/4 + (s^2+4)/(4 (s^2-4)^2 n^2)``."""
    with ctx.working():
        s = mpmath.mpc(s)
        d = (s * s - 4) ** 2
        return 2 * s / d / n**2, mpmath.mpf(1) / 4 + (s * s + 4) / (4 * d) / n**2


def richardson_limit(ns: Sequence[int], values: Sequence):
    """Value at ``1/n = 0`` of the polynomial in ``1/n`` through the samples."""
    xs = [mpmath.mpf(1) / n for n in ns]
    total = mpmath.mpc(0)
    for i, (xi, vi) in enumerate(zip(xs, values)):
        w = mpmath.mpf(1)
        for j, xj in enumerate(xs):
            if j != i:
                w *= xj / (xj - xi)
        total += w * vi
    return total


def _round(z, digits):
    z = mpmath.mpc(z)
    return mpmath.mpc(mpmath.mpf(mpmath.nstr(z.real, digits)), mpmath.mpf(mpmath.nstr(z.imag, digits)))


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    regime: str
    alpha: mpmath.mpc
    beta: mpmath.mpc
    alpha_hat: mpmath.mpc
    beta_hat: mpmath.mpc
    alpha_abs_err: mpmath.mpf
    beta_abs_err: mpmath.mpf
    alpha_rel_err: mpmath.mpf
    beta_rel_err: mpmath.mpf

    @staticmethod
    def errors(alpha, beta, alpha_hat, beta_hat, digits):
        ea = abs(alpha_hat - alpha)
        eb = abs(beta_hat - beta)
        ra = ea / abs(alpha) if alpha != 0 else mpmath.inf
        rb = eb / abs(beta) if beta != 0 else mpmath.inf
        return tuple(mpmath.mpf(mpmath.nstr(e, digits)) if mpmath.isfinite(e) else e for e in (ea, eb, ra, rb))

    @classmethod
    def build(cls, n, regime, alpha, beta, alpha_hat, beta_hat, digits):
        vals = [_round(v, digits) for v in (alpha, beta, alpha_hat, beta_hat)]
        return cls(n, regime, *vals, *cls.errors(*vals, digits))


def _exact(s, n, ctx):
    return orthopoly.diagonal_recurrence(s, [n], ctx)[0]


def compare_genus0(s, n_list, ctx):
    with ctx.working():
        s = mpmath.mpc(s)
        label = classify(s, ctx).label
        if label is not RegionLabel.G0:
            raise RegionMismatch(f"s={mpmath.nstr(s, 10)} is {label.value}, not G0")
        rows = []
        for n in n_list:
            e = _exact(s, n, ctx)
            a, b = genus0_predict(s, n, ctx)
            rows.append(ComparisonRow.build(n, "genus0", e.alpha, e.beta, a, b, ctx.digits))
        return rows


def compare_genus1(s, n_list, ctx, epsilon=genus1.DEFAULT_EPSILON):
    """Rows for the admissible degrees only; the others are skipped."""
    data = genus1.genus1_data(s, ctx)
    rows = []
    for n in n_list:
        if genus1.solvability_margin(data, n) <= epsilon:
            continue
        try:
            a, b = genus1.genus1_predict(data, n, ctx, epsilon=epsilon)
        except NearDegenerate:
            continue
        e = _exact(data.s, n, ctx)
        rows.append(ComparisonRow.build(n, "genus1", e.alpha, e.beta, a, b, ctx.digits))
    return rows


def compare_regular(s_star, L1, n_list, ctx):
    rows = []
    with ctx.working():
        kappa = double_scaling.kappa_of(s_star, ctx)
        for n in n_list:
            p = double_scaling.regular_ds_predict(s_star, L1, n, ctx, kappa=kappa)
            e = _exact(p.s, n, ctx)
            rows.append(ComparisonRow.build(n, "regular", e.alpha, e.beta, p.alpha, p.beta, ctx.digits))
    return rows


def compare_critical(L2, n_list, ctx, sol=None):
    sol = double_scaling.solve_pii_hm() if sol is None else sol
    rows = []
    with ctx.working():
        for n in n_list:
            p = double_scaling.critical_ds_predict(L2, n, sol, ctx)
            e = _exact(p.s, n, ctx)
            rows.append(ComparisonRow.build(n, "critical", e.alpha, e.beta, p.alpha, p.beta, ctx.digits))
    return rows
