import mpmath
import pytest

from klab import phase_portrait as pp
from klab.errors import AmbiguousNearBoundary, SingularParameter
from klab.precision import PrecisionContext


@pytest.mark.parametrize("s", [1, -2j, 0.3 + 1.1j])
def test_h0_expansion_at_infinity(s, ctx40):
    with ctx40.working():
        s = mpmath.mpc(s)
        for z in (mpmath.mpc(1e4, 3e3), mpmath.mpc(-2e4, -1e3)):
            expected = -s * z - pp.ell0() + 2 * mpmath.log(z)
            assert abs(pp.h0_eval(s, z, ctx40) - expected) < 1e-3


def _central(f, z, h=mpmath.mpf(10) ** -12):
    # the library rounds inputs to its working precision, so mpmath.diff's
    # tiny adaptive steps would vanish
    return (f(z + h) - f(z - h)) / (2 * h)


def test_h0_prime_matches_numerical_derivative(ctx40):
    s = mpmath.mpc(0.4, -1.3)
    with ctx40.working():
        for z in (mpmath.mpc(0.2, 0.7), mpmath.mpc(-1.5, -0.4), mpmath.mpc(3, 0.1)):
            num = _central(lambda w: pp.h0_eval(s, w, ctx40), z)
            assert abs(num - pp.h0_prime(s, z, ctx40)) < mpmath.mpf(10) ** -20


def test_saddle_value_derivative(ctx40):
    s = mpmath.mpc(-0.5, -1.8)
    with ctx40.working():
        num = _central(lambda t: pp.h0_saddle_value(t, ctx40), s)
        assert abs(num - pp.h0_saddle_derivative(s, ctx40)) < mpmath.mpf(10) ** -20
        # 2/s is a zero of h'
        assert abs(pp.h0_prime(s, 2 / s, ctx40)) < mpmath.mpf(10) ** -38


def test_saddle_value_at_zero_is_rejected(ctx40):
    with pytest.raises(SingularParameter):
        pp.h0_saddle_value(0, ctx40)


@pytest.mark.parametrize(
    "s, label",
    [
        (0.5, pp.RegionLabel.G0),
        (0, pp.RegionLabel.G0),
        (-1j, pp.RegionLabel.G0),
        (-2j, pp.RegionLabel.G1Minus),
        (2j, pp.RegionLabel.G1Plus),
        (3, pp.RegionLabel.BreakRayPos),
        (-3.5, pp.RegionLabel.BreakRayNeg),
        (2, pp.RegionLabel.CriticalPoint2),
        (-2, pp.RegionLabel.CriticalPointMinus2),
    ],
)
def test_classify_labels(s, label, ctx40):
    assert pp.classify(s, ctx40).label is label


def test_classify_on_and_near_breaking_curve():
    ctx = PrecisionContext(40)
    tc = pp.solve_tc(ctx)
    with ctx.working():
        assert pp.classify(mpmath.mpc(0, -tc), ctx).label is pp.RegionLabel.BreakMinus
        assert pp.classify(mpmath.mpc(0, tc), ctx).label is pp.RegionLabel.BreakPlus
        near = mpmath.mpc(0, -tc - mpmath.mpf(10) ** -20)
        assert pp.classify(near, ctx).label is pp.RegionLabel.G1Minus
        with pytest.raises(AmbiguousNearBoundary):
            pp.classify(near, ctx, strict=True)


def test_classify_is_conjugation_symmetric(ctx40):
    for s in (0.3 - 1.5j, -0.8 - 0.9j, 1.2 - 0.2j):
        a = pp.classify(s, ctx40).label.value
        b = pp.classify(s.conjugate(), ctx40).label.value
        assert a.replace("Minus", "") == b.replace("Plus", "")


def test_tc_value():
    ctx = PrecisionContext(50)
    tc = pp.solve_tc(ctx)
    with ctx.working():
        assert abs(pp.tc_residual(tc)) < mpmath.mpf(10) ** -45
        assert mpmath.nstr(tc, 15) == "1.32548683869836"


def test_one_edge_hprime():
    ctx = PrecisionContext(40)
    with ctx.working():
        for s in (3, -2.5):
            s = mpmath.mpf(s)
            z = mpmath.mpc(1e5, 1e5)
            # h' = -s + 2/z + O(z^-2)
            assert abs((pp.one_edge_hprime(s, z, ctx) + s) * z - 2) < 1e-3
            lam, out = (4 / s - 1, 1) if s > 0 else (1 + 4 / s, -1)
            # the soft edge is a zero of h'
            assert abs(pp.one_edge_hprime(s, lam + out * mpmath.mpf(10) ** -12, ctx)) < 1e-5
    with pytest.raises(SingularParameter):
        pp.one_edge_hprime(1.5, 0.3j, ctx)


def test_emanation_counts():
    ctx = PrecisionContext(30)
    s = mpmath.mpc(0, -1)
    q = pp.genus0_qsqrt(s, ctx)
    with ctx.working():
        for p in pp.genus0_critical_points(s):
            dirs = pp.emanation_directions(q, p)
            assert len(dirs) == p.order + 2
            for u in dirs:
                assert abs(abs(u) - 1) < 1e-20
