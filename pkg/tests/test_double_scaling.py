import mpmath
import numpy as np
import pytest

from klab import double_scaling as ds
from klab.errors import NotOnBreakingCurve, OutOfDomain, RegionMismatch
from klab.phase_portrait import solve_tc
from klab.precision import PrecisionContext


@pytest.fixture(scope="module")
def ctx():
    return PrecisionContext(40)


def test_breaking_point_on_axis_is_tc(ctx):
    p = ds.breaking_point(0, ctx)
    with ctx.working():
        assert abs(p - mpmath.mpc(0, -solve_tc(ctx))) < mpmath.mpf(10) ** -35


def test_breaking_point_reproducible_across_precision(ctx):
    a = ds.breaking_point(-1, ctx)
    b = ds.breaking_point(-1, PrecisionContext(60))
    with mpmath.workdps(60):
        assert abs(a - b) < mpmath.mpf(10) ** -35


def test_breaking_point_rejects_outside_segment(ctx):
    with pytest.raises(ValueError):
        ds.breaking_point(2.5, ctx)


def test_kappa_is_odd_under_conjugation(ctx):
    lo = ds.breaking_point("0.5", ctx, lower=True)
    up = ds.breaking_point("0.5", ctx, lower=False)
    with ctx.working():
        assert abs(lo - mpmath.conj(up)) < mpmath.mpf(10) ** -35
        assert abs(ds.kappa_of(lo, ctx) + ds.kappa_of(up, ctx)) < mpmath.mpf(10) ** -35


def test_kappa_requires_breaking_point(ctx):
    with pytest.raises(NotOnBreakingCurve):
        ds.kappa_of(-1j, ctx)


def test_delta_n_properties(ctx):
    s_star = ds.breaking_point("-0.3", ctx)
    with ctx.working():
        kappa = ds.kappa_of(s_star, ctx)
        assert abs(abs(ds.delta_n(s_star, 0, 17, ctx)) - 1) < mpmath.mpf(10) ** -35
        L1 = mpmath.mpc("0.2", "0.1")
        d1, d2 = ds.delta_n(s_star, L1, 30, ctx), ds.delta_n(s_star, L1, 31, ctx)
        assert abs(d2 / d1 - mpmath.expj(-kappa)) < mpmath.mpf(10) ** -35
        r = ds.saddle_root(s_star, ctx)
        assert abs(abs(d1) - abs(mpmath.exp(L1 * r))) < mpmath.mpf(10) ** -35


def test_regular_predictor_structure(ctx):
    s_star = ds.breaking_point(0, ctx)
    with ctx.working():
        L1 = mpmath.mpc(0, "0.1")
        preds = [ds.regular_ds_predict(s_star, L1, n, ctx) for n in (100, 400, 1600)]
        gaps = [abs(p.beta - mpmath.mpf(1) / 4) for p in preds]
        # leading correction is of order n^(-1/2)
        assert 1.7 < gaps[0] / gaps[1] < 2.3 and 1.7 < gaps[1] / gaps[2] < 2.3
        for p in preds:
            assert abs(p.s - s_star - L1 / p.n) < mpmath.mpf(10) ** -38
            assert abs(p.alpha - p.alpha_at_star) < 5 / mpmath.mpf(p.n)


def test_regular_predictor_rejects_genus1_side(ctx):
    s_star = ds.breaking_point(0, ctx)
    with pytest.raises(RegionMismatch):
        ds.regular_ds_predict(s_star, -1j, 50, ctx)


def test_pii_solution_boundary_behaviour(pii_solution):
    sol = pii_solution
    assert sol.residual < 1e-10
    assert np.max(np.abs(sol.ode_residual())) < 1e-3
    i = np.searchsorted(sol.x, -20.0)
    # next asymptotic term is of order |x|^(-5/2)
    assert abs(sol.q[i] - ds.pii_left(sol.x[i])) < 20.0 ** -2.5
    j = np.searchsorted(sol.x, 20.0)
    assert abs(sol.q[j] - ds.pii_right(sol.x[j])) < 1e-4
    with pytest.raises(ValueError):
        sol.q[0] = 1.0


def test_pii_grid_refinement_is_second_order():
    u = [ds.U_of(2.0, ds.solve_pii_hm(nodes=n)) for n in (1000, 2000, 4000)]
    ratio = abs(u[0] - u[1]) / abs(u[1] - u[2])
    assert 3.0 < ratio < 5.0


def test_pii_argument_validation():
    with pytest.raises(ValueError):
        ds.solve_pii_hm(x_left=5)
    with pytest.raises(ValueError):
        ds.solve_pii_hm(nodes=50)


def test_critical_predictor(pii_solution, ctx):
    p = ds.critical_ds_predict(-2, 216, pii_solution, ctx)
    with ctx.working():
        assert abs(p.beta - (mpmath.mpf(1) / 4 + p.alpha / 2)) < mpmath.mpf(10) ** -38
        assert abs(p.s - (2 - 2 * mpmath.mpf(216) ** (-mpmath.mpf(2) / 3))) < mpmath.mpf(10) ** -38
        assert abs(p.alpha + p.U / 36) < mpmath.mpf(10) ** -38
    with pytest.raises(ValueError):
        ds.critical_ds_predict(0.5, 100, pii_solution, ctx)
    with pytest.raises(OutOfDomain):
        ds.U_of(1e3, pii_solution)
