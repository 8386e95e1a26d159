import mpmath
import pytest

from klab import genus1, orthopoly
from klab.errors import NearDegenerate, WrongRegion
from klab.precision import PrecisionContext


@pytest.fixture(scope="module")
def ctx():
    return PrecisionContext(40, 10)


@pytest.fixture(scope="module")
def data_plus2i(ctx):
    with ctx.working():
        return genus1.genus1_data(mpmath.mpc(0, 2), ctx)


@pytest.fixture(scope="module")
def data_offaxis(ctx):
    with ctx.working():
        return genus1.genus1_data(mpmath.mpc("0.4", "-1.9"), ctx)


def test_rejects_genus0_point(ctx):
    with pytest.raises(WrongRegion):
        genus1.solve_endpoints(-1j, ctx)


def test_endpoints_satisfy_boutroux(genus1_minus2i, ctx):
    d = genus1_minus2i
    res = genus1.boutroux_residuals(d.s, d.lam0, d.lam1, ctx)
    assert max(abs(r) for r in res) < mpmath.mpf(10) ** -35
    assert d.tau.imag > 0


def test_theta_quasi_periodicity(genus1_minus2i, ctx):
    tau = genus1_minus2i.tau
    fn = genus1.ThetaFn.make(tau, ctx.work_digits)
    with ctx.working():
        z = mpmath.mpc("0.17", "-0.08")
        t = genus1.theta(z, fn, ctx)
        assert abs(genus1.theta(z + 1, fn, ctx) - t) < mpmath.mpf(10) ** -35
        shifted = genus1.theta(z + tau, fn, ctx)
        assert abs(shifted - mpmath.exp(-1j * mpmath.pi * tau - 2j * mpmath.pi * z) * t) < mpmath.mpf(10) ** -35 * abs(shifted)
        assert abs(genus1.theta((1 + tau) / 2, fn, ctx)) < mpmath.mpf(10) ** -35
        h = mpmath.mpf(10) ** -12
        num = (genus1.theta(z + h, fn, ctx) - genus1.theta(z - h, fn, ctx)) / (2 * h) / t
        assert abs(num - genus1.theta_dlog(z, fn, ctx)) < mpmath.mpf(10) ** -18


def test_reduce_lattice_round_trip(genus1_minus2i):
    tau = genus1_minus2i.tau
    with mpmath.workdps(40):
        zeta = mpmath.mpc(3.7, 0) + 4 * tau - 0.2 * tau
        z0, j, k = genus1.reduce_lattice(zeta, tau)
        assert abs(z0 + j + k * tau - zeta) < mpmath.mpf(10) ** -35
        assert abs(z0.imag) <= tau.imag / 2


def test_no_two_consecutive_excluded(genus1_minus2i, ctx):
    adm = genus1.admissible_indices(genus1_minus2i, n_max=200, ctx=ctx)
    assert adm.consecutive_excluded == []
    assert len(adm.indices) + len(adm.excluded) == 200


def test_reflection_negates_alpha(genus1_minus2i, data_plus2i, ctx):
    rows_m = genus1.predictor_table(genus1_minus2i, range(40, 50), ctx)
    rows_p = genus1.predictor_table(data_plus2i, range(40, 50), ctx)
    compared = 0
    with ctx.working():
        for (n, am, bm, okm), (_, ap, bp, okp) in zip(rows_m, rows_p):
            if okm and okp:
                assert abs(ap + am) < mpmath.mpf(10) ** -30
                assert abs(bp - bm) < mpmath.mpf(10) ** -30
                compared += 1
    assert compared >= 5


def _errors(data, ns, ctx, margin=0.2):
    # the leading-order error grows like 1/(n * margin) near the theta zero
    out = {}
    exact = {e.n: e for e in orthopoly.diagonal_recurrence(data.s, ns, ctx)}
    with ctx.working():
        for n, a, b, ok in genus1.predictor_table(data, ns, ctx):
            if ok and genus1.solvability_margin(data, n) > margin:
                out[n] = (abs(a - exact[n].alpha), abs(b - exact[n].beta))
    return out


def test_predictor_accuracy_on_axis(genus1_minus2i, ctx):
    errs = _errors(genus1_minus2i, range(40, 51), ctx)
    assert len(errs) >= 5
    assert max(e[0] for e in errs.values()) < 0.05
    assert max(e[1] for e in errs.values()) < 0.05


def test_predictor_accuracy_off_axis(data_offaxis, ctx):
    errs = _errors(data_offaxis, range(40, 51), ctx)
    assert len(errs) >= 5
    assert max(e[0] for e in errs.values()) < 0.05
    assert max(e[1] for e in errs.values()) < 0.05


def test_lattice_shift_invariance(data_offaxis, ctx):
    n = next(n for n, _a, _b, ok in genus1.predictor_table(data_offaxis, range(40, 50), ctx) if ok)
    a0, b0 = genus1.genus1_predict(data_offaxis, n, ctx)
    with ctx.working():
        a1, b1 = genus1.genus1_predict(data_offaxis, n, ctx, shift=2 - 3 * data_offaxis.tau)
        assert abs(a0 - a1) < mpmath.mpf(10) ** -30 and abs(b0 - b1) < mpmath.mpf(10) ** -30


def test_guard_raises_near_theta_zero(genus1_minus2i, ctx):
    d = genus1_minus2i
    with ctx.working():
        # choose the shift that puts W exactly on the zero (1 + tau)/2
        bad = (1 + d.tau) / 2 - genus1.theta_shift(d, 40)
    with pytest.raises(NearDegenerate):
        genus1.genus1_predict(d, 40, ctx, shift=bad)


def test_predict_requires_completed_data(genus1_minus2i, ctx):
    from dataclasses import replace

    with pytest.raises(ValueError):
        genus1.genus1_predict(replace(genus1_minus2i, tau=None), 40, ctx)


def test_as_strings_round_trips(genus1_minus2i):
    strings = genus1_minus2i.as_strings(30)
    with mpmath.workdps(40):
        lam0 = mpmath.mpc(strings["lam0"]["re"], strings["lam0"]["im"])
        assert abs(lam0 - genus1_minus2i.lam0) < mpmath.mpf(10) ** -28
