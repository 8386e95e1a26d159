import mpmath
import numpy as np
import pytest

from klab import orthopoly
from klab.errors import DegenerateMoment
from klab.precision import PrecisionContext


@pytest.mark.parametrize("s, N", [(-1j, 5), (0.5 + 2j, 3), (1, 20), (-3, 7)])
def test_moments_match_direct_quadrature(s, N):
    ctx = PrecisionContext(40)
    with ctx.working():
        table = orthopoly.compute_moments(orthopoly.Weight(s, N), 12, ctx)
        c = table.c
        for k in (0, 1, 5, 12):
            ref = mpmath.quad(lambda x: x**k * mpmath.exp(-c * x), [-1, 0, 1])
            assert abs(table.m[k] - ref) <= mpmath.mpf(10) ** -35 * max(1, abs(ref))
        assert orthopoly.moment_recurrence_defect(table) < mpmath.mpf(10) ** -35


def test_tiny_c_uses_series():
    ctx = PrecisionContext(40)
    with ctx.working():
        table = orthopoly.compute_moments(orthopoly.Weight(mpmath.mpf(10) ** -20, 1), 6, ctx)
        assert abs(table.m[0] - 2) < mpmath.mpf(10) ** -19
        assert abs(table.m[1] - (-2 * mpmath.mpf(10) ** -20 / 3)) < mpmath.mpf(10) ** -45


def test_weight_rejects_bad_N():
    with pytest.raises(ValueError):
        orthopoly.Weight(1, 0)
    with pytest.raises(ValueError):
        orthopoly.Weight(1, 2.5)


def test_required_digits_grow_with_n_and_s():
    assert orthopoly.required_digits(1j, 50) < orthopoly.required_digits(1j, 100)
    assert orthopoly.required_digits(1j, 50) < orthopoly.required_digits(3j, 50)


def test_recurrence_polynomials_are_orthogonal():
    # <p_n, z^k> = 0 for k < n, checked with independent quadrature
    ctx = PrecisionContext(40)
    s, n = mpmath.mpc(0.4, -0.9), 6
    with ctx.working():
        for k in range(n):

            def f(x, k=k):
                p, _ = orthopoly.eval_poly(s, n, x, ctx)
                return p * x**k * mpmath.exp(-n * s * x)

            assert abs(mpmath.quad(f, [-1, 0, 1])) < mpmath.mpf(10) ** -30


def test_validate_mode_agrees():
    ctx = PrecisionContext(40)
    plain = orthopoly.diagonal_recurrence(-2j, [10, 30], ctx)
    checked = orthopoly.diagonal_recurrence(-2j, [10, 30], ctx, validate=True)
    with ctx.working():
        for a, b in zip(plain, checked):
            assert abs(a.alpha - b.alpha) < mpmath.mpf(10) ** -35
            assert abs(a.beta - b.beta) < mpmath.mpf(10) ** -35


def test_diagonal_rejects_bad_degree():
    with pytest.raises(ValueError):
        orthopoly.diagonal_recurrence(1, [0], PrecisionContext(30))


def test_degenerate_row_is_flagged():
    # exp(-N s z) with a vanishing first moment: sinh(c)/c = 0 at c = i pi
    ctx = PrecisionContext(40)
    with ctx.working():
        table = orthopoly.recurrence_table(mpmath.mpc(0, mpmath.pi), 1, 3, ctx)
    assert table.first_degenerate == 0
    with pytest.raises(DegenerateMoment):
        table.row(0)


def test_zeros_are_roots_and_legendre_at_s0():
    ctx = PrecisionContext(40)
    z = orthopoly.zeros(0, 8, ctx)
    ref = sorted(np.polynomial.legendre.leggauss(8)[0])
    assert max(abs(complex(a) - b) for a, b in zip(z, ref)) < 1e-14
    zs = orthopoly.zeros(0.3 - 1.2j, 12, ctx)
    with ctx.working():
        for r in zs:
            p, d = orthopoly.eval_poly(0.3 - 1.2j, 12, r, ctx)
            assert abs(p) < mpmath.mpf(10) ** -30 * max(1, abs(d))


def test_gauss_rule_exactness_off_axis():
    ctx = PrecisionContext(50)
    s, n = mpmath.mpc(0.6, -0.8), 6
    rule = orthopoly.gauss_rule(s, n, n, ctx)
    with ctx.working():
        mom = orthopoly.compute_moments(orthopoly.Weight(s, n), 2 * n - 1, ctx).m
        for k in range(2 * n):
            got = orthopoly.oscillatory_integral(rule, lambda z, k=k: z**k)
            assert abs(got - mom[k]) < mpmath.mpf(10) ** -40 * max(1, abs(mom[k]))


def test_large_n_beta_tends_to_quarter_at_s1():
    ctx = PrecisionContext(40)
    rows = orthopoly.diagonal_recurrence(1, [10, 40, 80], ctx)
    gaps = [abs(mpmath.mpc(e.beta) - 0.25) for e in rows]
    assert gaps[0] > gaps[1] > gaps[2]
