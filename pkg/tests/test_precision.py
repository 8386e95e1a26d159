import mpmath
import pytest

from klab.errors import PointOnCut
from klab.precision import (
    Path,
    PrecisionContext,
    PrincipalAtPoint,
    aberth_roots,
    csqrt_cut,
    fmt_complex,
    integrate_path,
    newton_complex,
    newton_solve,
    parse_complex,
)


@pytest.mark.parametrize(
    "text, value",
    [("1", 1), ("-2i", -2j), ("0+1i", 1j), ("1.5-0.25j", 1.5 - 0.25j), ("i", 1j), ("-i", -1j), ("2e-3+4E1i", 0.002 + 40j)],
)
def test_parse_complex(text, value):
    assert complex(parse_complex(text)) == value


@pytest.mark.parametrize("text", ["", "1x", "i2", "1+", "--1", "1 2"])
def test_parse_complex_rejects(text):
    with pytest.raises(ValueError):
        parse_complex(text)


def test_parse_is_exact_at_working_precision():
    ctx = PrecisionContext(60)
    with ctx.working():
        z = parse_complex("0.1")
        assert abs(z - mpmath.mpf(1) / 10) < mpmath.mpf(10) ** -70


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(29)
    with pytest.raises(ValueError):
        PrecisionContext(50, -1)
    assert PrecisionContext(50, 7).work_digits == 57


def test_path_validation():
    with pytest.raises(ValueError):
        Path([0, 0])
    with pytest.raises(ValueError):
        Path([0, 1, 0], closed=True)
    p = Path([0, 1, 1j], closed=True)
    assert len(p.segments()) == 3 and p.end == p.start


def test_sqrt_behaves_like_z_and_jumps_across_cut():
    ctx = PrecisionContext(40)
    cut = Path([-1, 1])
    with ctx.working():
        big = mpmath.mpc(1e6, 3e5)
        assert abs(csqrt_cut(big, cut, ctx=ctx) / big - 1) < 1e-11
        above = csqrt_cut(mpmath.mpc("0.3", "1e-15"), cut, ctx=ctx)
        below = csqrt_cut(mpmath.mpc("0.3", "-1e-15"), cut, ctx=ctx)
        assert abs(above + below) < 1e-14
        # no jump on the real axis outside the cut
        assert abs(csqrt_cut(mpmath.mpc(-3, "1e-20"), cut, ctx=ctx) - csqrt_cut(mpmath.mpc(-3, "-1e-20"), cut, ctx=ctx)) < 1e-18


def test_sqrt_polyline_cut_squares_back():
    ctx = PrecisionContext(40)
    cut = Path([-1, 0.5j, 1])
    with ctx.working():
        for z in (mpmath.mpc(0.2, 0.1), mpmath.mpc(-2, 3), mpmath.mpc(0, -0.4)):
            r = csqrt_cut(z, cut, ctx=ctx)
            assert abs(r * r - (z * z - 1)) < mpmath.mpf(10) ** -40
        # the segment [-1, 1] is not a cut here
        a = csqrt_cut(mpmath.mpc(0, "1e-20"), cut, ctx=ctx)
        b = csqrt_cut(mpmath.mpc(0, "-1e-20"), cut, ctx=ctx)
        assert abs(a - b) < 1e-15


def test_sqrt_point_on_cut_and_normalization():
    ctx = PrecisionContext(40)
    cut = Path([-1, 1])
    with pytest.raises(PointOnCut):
        csqrt_cut(0.5, cut, ctx=ctx)
    with ctx.working():
        flipped = csqrt_cut(3, cut, PrincipalAtPoint(2, -mpmath.sqrt(3)), ctx=ctx)
        assert abs(flipped + mpmath.sqrt(8)) < 1e-30


def test_integrate_path_with_endpoint_singularity():
    ctx = PrecisionContext(40)
    with ctx.working():
        # factored so the integrand itself does not cancel near the ends
        val = integrate_path(lambda z: 1 / mpmath.sqrt((1 - z) * (1 + z)), Path([-1, 1]), ctx, singular_ends=[True, True])
        assert abs(val - mpmath.pi) < ctx.tol
        val = integrate_path(lambda z: mpmath.exp(z), Path([0, 1j, 1 + 1j]), ctx)
        assert abs(val - (mpmath.exp(1 + 1j) - 1)) < mpmath.mpf(10) ** -38


def test_newton_solvers():
    ctx = PrecisionContext(50)
    x, y = newton_solve(lambda v: [v[0] ** 2 + v[1] ** 2 - 4, v[0] - v[1]], [1, 0.5], ctx)
    with ctx.working():
        assert abs(x - mpmath.sqrt(2)) < mpmath.mpf(10) ** -48 and abs(y - x) < mpmath.mpf(10) ** -48
        z = newton_complex(lambda z: z**3 - 1, mpmath.mpc(-0.4, 0.8), ctx, fprime=lambda z: 3 * z * z)
        assert abs(z - mpmath.expjpi(mpmath.mpf(2) / 3)) < mpmath.mpf(10) ** -48


def test_aberth_roots_of_unity():
    ctx = PrecisionContext(40)
    n = 7
    roots = aberth_roots(lambda z: (z**n - 1, n * z ** (n - 1)), n, ctx)
    with ctx.working():
        expected = [mpmath.expjpi(2 * mpmath.mpf(k) / n) for k in range(n)]
        for e in expected:
            assert min(abs(r - e) for r in roots) < mpmath.mpf(10) ** -38


def test_fmt_complex_is_deterministic():
    with mpmath.workdps(30):
        z = mpmath.mpc(1, -2) / 3
        assert fmt_complex(z, 10) == fmt_complex(z, 10)
        assert fmt_complex(z, 5).endswith("i")
