"""Two-cut (genus-1) data: branch points, periods, theta functions and the
recurrence-coefficient predictor built from them.

Conventions.  The branch points are ``-1, lam0, lam1, 1`` with main arcs
``[-1, lam0]`` and ``[lam1, 1]`` and the complementary arc ``[lam0, lam1]``,
all realized as straight segments.  This is a homotopy choice: every
quantity below is a period or an Abel-map value, so it only depends on the
arcs up to deformations that do not sweep across a branch point, and
:func:`check_contours` verifies that against traced trajectories.

On the top sheet

    Xi(z)  = sqrt((z+1)(z-lam0)) * sqrt((z-lam1)(z-1)) ~ z^2,
    h'(z)  = -s Xi(z) / (z^2 - 1)                      ~ -s + 2/z,

the holomorphic differential is ``omega = c dz / Xi`` with ``c`` fixed by a
unit A-period and the Abel map is ``u(z) = -int_1^z omega``; sign
conventions are listed in :func:`periods_and_constants`.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import mpmath
from mpmath import mp

from .errors import Diverged, NearDegenerate, NoConvergence, TruncationInsufficient, WrongRegion
from .precision import Path, PrecisionContext, newton_solve


# --------------------------------------------------------------------------
# square roots on straight cuts
#
# A point is carried as ``(anchor, w)`` with ``z = anchor + w``.  Differences
# ``z - p`` are formed as ``(anchor - p) + w``, which is exact when ``p`` is the
# anchor; quadrature from a branch point therefore keeps full relative
# accuracy in the singular factor at nodes packed against the endpoint.


def _diff(anchor, w, p):
    return w if p == anchor else (anchor - p) + w


def _sq(za, zb, a, b):
    # sqrt((z-a)(z-b)) cut on [a, b], ~z at infinity, from za = z-a, zb = z-b.
    # Two factorizations of the same function; each keeps the factor for the
    # far endpoint away from its principal cut, so the near endpoint decides
    u = (a - b) / abs(a - b)
    if abs(za) <= abs(zb):
        return u * mpmath.sqrt(za / u) * mpmath.sqrt(zb / u)
    return -u * mpmath.sqrt(-za / u) * mpmath.sqrt(-zb / u)


def _sq_on(za, zb, a, b):
    # a continuous branch along the open segment (a, b); equals the left (+)
    # boundary value of _sq
    return 1j * (b - a) * mpmath.sqrt(za / (b - a)) * mpmath.sqrt(-zb / (b - a))


def _factors(anchor, w, lam0, lam1):
    return (_diff(anchor, w, -1), _diff(anchor, w, lam0), _diff(anchor, w, lam1), _diff(anchor, w, 1))


def _xi(anchor, w, lam0, lam1, side=None):
    """Top-sheet ``Xi``; ``side='m0'`` or ``'m1'`` gives the ``+`` boundary
    value on that main arc."""
    zm, z0, z1, zp = _factors(anchor, w, lam0, lam1)
    f0 = _sq_on(zm, z0, -1, lam0) if side == "m0" else _sq(zm, z0, -1, lam0)
    f1 = _sq_on(z1, zp, lam1, 1) if side == "m1" else _sq(z1, zp, lam1, 1)
    return f0 * f1, zm * zp, z0, z1


def _quad_anchored(F, a, b, ctx, tol=None):
    """``int_a^b f dz`` on the segment, with ``F(anchor, w)`` the integrand at
    ``anchor + w``.  Each half is parametrized from its own end as ``w = d v^2``,
    which turns square-root endpoint behaviour into an analytic integrand."""
    a, b = mpmath.mpc(a), mpmath.mpc(b)
    d = b - a
    tol = ctx.tol if tol is None else tol
    total = mpmath.mpc(0)
    for anchor, sgn in ((a, 1), (b, -1)):
        val, err = mp.quad(lambda v: F(anchor, sgn * d * v * v) * 2 * v, [0, mpmath.sqrt(mpmath.mpf(1) / 2)], error=True, maxdegree=10)
        if not (err <= tol * max(1, abs(val))):
            raise NoConvergence(f"segment quadrature error {mpmath.nstr(err, 5)} on {mpmath.nstr(a, 6)}->{mpmath.nstr(b, 6)}")
        total += val * d
    return total


def _quad_ray(F, ctx, tol=None):
    """``int_1^inf f dz`` along the real axis, ``F`` as in _quad_anchored."""
    tol = ctx.tol if tol is None else tol
    one = mpmath.mpc(1)
    val, err = mp.quad(lambda v: F(one, mpmath.mpc(v * v)) * 2 * v, [0, 1, mpmath.inf], error=True, maxdegree=10)
    if not (err <= tol * max(1, abs(val))):
        raise NoConvergence(f"ray quadrature error {mpmath.nstr(err, 5)}")
    return val


# --------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class Genus1Data:
    """Branch points, contours and (once completed) periods and constants.

    ``c`` is the coefficient in ``omega = c dz / Xi``; ``b = -s c`` is the
    same normalization for the differential written as ``dz / (h' (z^2-1))``.
    """

    s: mpmath.mpc
    lam0: mpmath.mpc
    lam1: mpmath.mpc
    gamma_m0: Path
    gamma_c1: Path
    gamma_m1: Path
    digits: int
    boutroux: tuple = ()
    b: mpmath.mpc = None
    c: mpmath.mpc = None
    tau: mpmath.mpc = None
    eta1: mpmath.mpf = None
    omega0: mpmath.mpf = None
    Delta0: mpmath.mpc = None
    d: mpmath.mpc = None
    ell: mpmath.mpf = None
    u_inf: mpmath.mpc = None
    u1: mpmath.mpc = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return self.tau is not None

    def hprime(self, z):
        z = mpmath.mpc(z)
        xi, q, _z0, _z1 = _xi(z, mpmath.mpc(0), self.lam0, self.lam1)
        return -self.s * xi / q

    def as_strings(self, digits: int | None = None) -> dict:
        digits = digits or self.digits
        with mpmath.workdps(max(digits, self.digits) + 10):
            return self._strings(digits)

    def _strings(self, digits):
        out = {}
        for name in ("s", "lam0", "lam1", "b", "tau", "eta1", "omega0", "Delta0", "d", "ell", "u_inf", "u1"):
            v = getattr(self, name)
            if v is None:
                continue
            v = mpmath.mpc(v)
            out[name] = {"re": mpmath.nstr(v.real, digits), "im": mpmath.nstr(v.imag, digits)}
        out["boutroux"] = [mpmath.nstr(r, 5) for r in self.boutroux]
        out["diagnostics"] = {k: (mpmath.nstr(v, 5) if isinstance(v, (mpmath.mpf, mpmath.mpc)) else v) for k, v in self.diagnostics.items()}
        return out


def _paths(lam0, lam1):
    return Path([-1, lam0]), Path([lam0, lam1]), Path([lam1, 1])


def genus1_qsqrt(data: Genus1Data):
    """Square root of the genus-1 quadratic differential density; its
    trajectories (``Re int q dz`` constant) are traced with the genus-0
    tracer, which continues the sign itself."""
    s, l0, l1 = data.s, data.lam0, data.lam1

    def q(z):
        return -s * mpmath.sqrt((z - l0) * (z - l1) / (z * z - 1))

    return q


def genus1_critical_points(data: Genus1Data):
    from .phase_portrait import CriticalPoint

    return [
        CriticalPoint(mpmath.mpc(-1), -1),
        CriticalPoint(mpmath.mpc(1), -1),
        CriticalPoint(data.lam0, 1),
        CriticalPoint(data.lam1, 1),
    ]


# --------------------------------------------------------------------------
# Boutroux conditions


def _boutroux_integrals(s, delta, ctx, with_derivative):
    c = 2 / s
    l0, l1 = c + delta, c - delta

    def hA(anchor, w):
        xi, q, _z0, _z1 = _xi(anchor, w, l0, l1, side="m0")
        return -s * xi / q

    def hB(anchor, w):
        xi, q, _z0, _z1 = _xi(anchor, w, l0, l1)
        return -s * xi / q

    def dA(anchor, w):
        xi, q, z0, z1 = _xi(anchor, w, l0, l1, side="m0")
        return -s * xi / q * (-1 / (2 * z0) + 1 / (2 * z1))

    def dB(anchor, w):
        xi, q, z0, z1 = _xi(anchor, w, l0, l1)
        return -s * xi / q * (-1 / (2 * z0) + 1 / (2 * z1))

    IA = _quad_anchored(hA, -1, l0, ctx)
    IB = _quad_anchored(hB, l0, l1, ctx)
    if not with_derivative:
        return IA, IB
    return IA, IB, _quad_anchored(dA, -1, l0, ctx), _quad_anchored(dB, l0, l1, ctx)


def boutroux_residuals(s, lam0, lam1, ctx: PrecisionContext):
    """``(Re int_{-1}^{lam0} h', Re int_{lam0}^{lam1} h')``.  Together with the
    residue of ``h'`` at infinity these make every period of ``h'`` purely
    imaginary."""
    with ctx.working():
        s = mpmath.mpc(s)
        delta = (mpmath.mpc(lam0) - mpmath.mpc(lam1)) / 2
        IA, IB = _boutroux_integrals(s, delta, ctx, False)
        return IA.real, IB.real


def _newton_delta(s, delta0, ctx):
    # unknown delta = (lam0 - lam1)/2; both integrals are holomorphic in delta
    def F(x):
        IA, IB = _boutroux_integrals(s, mpmath.mpc(x[0], x[1]), ctx, False)
        return [IA.real, IB.real]

    def J(x):
        _IA, _IB, DA, DB = _boutroux_integrals(s, mpmath.mpc(x[0], x[1]), ctx, True)
        return [[DA.real, -DA.imag], [DB.real, -DB.imag]]

    tol = mpmath.mpf(10) ** (-(ctx.digits - 5))
    x = newton_solve(F, [delta0.real, delta0.imag], ctx, J=J, max_iter=60, tol=tol)
    return mpmath.mpc(x[0], x[1])


def _axis_seed(t, ctx):
    # s = -i t: lam0 = -x + 2i/t, lam1 = x + 2i/t and the second condition
    # holds by symmetry, leaving the real equation Re I_A(x) = 0
    s = mpmath.mpc(0, -t)
    lo = PrecisionContext(30, 5)

    def f(x):
        with lo.working():
            IA, _ = _boutroux_integrals(s, mpmath.mpc(-x, 0), lo, False)
            return IA.real

    with lo.working():
        prev_x, prev_f = None, None
        for k in range(1, 41):
            x = mpmath.mpf(k) / 10
            fx = f(x)
            if prev_f is not None and (fx > 0) != (prev_f > 0):
                a, b, fa = prev_x, x, prev_f
                for _ in range(30):
                    m = (a + b) / 2
                    fm = f(m)
                    if (fm > 0) == (fa > 0):
                        a, fa = m, fm
                    else:
                        b = m
                return mpmath.mpc(-(a + b) / 2, 0)
            prev_x, prev_f = x, fx
    raise Diverged(f"no sign change of the Boutroux function on the imaginary axis at t={mpmath.nstr(t, 8)}")


def _build(s, lam0, lam1, ctx, diagnostics):
    res = boutroux_residuals(s, lam0, lam1, ctx)
    m0, c1, m1 = _paths(lam0, lam1)
    return Genus1Data(s, lam0, lam1, m0, c1, m1, ctx.digits, tuple(res), diagnostics=dict(diagnostics))


AXIS_SEED_MIN = mpmath.mpf("1.4")


def continuation_path(s, step=mpmath.mpf("0.05")):
    """Parameter values from the imaginary-axis seed ``-i max(-Im s, 1.4)`` to
    ``s`` in straight steps of at most ``step``."""
    s = mpmath.mpc(s)
    start = mpmath.mpc(0, -max(-s.imag, AXIS_SEED_MIN))
    k = int(mpmath.ceil(abs(s - start) / step))
    if k == 0:
        return [start]
    return [start + (s - start) * j / k for j in range(k + 1)]


def continue_endpoints(path, ctx: PrecisionContext):
    """Half-differences ``delta = (lam0 - lam1)/2`` along ``path``, the first
    point of which must lie on the negative imaginary axis.

    Raises ``Diverged`` if Newton fails or a step moves ``delta`` by more than
    ten times the parameter step plus a fixed allowance of 0.05.
    """
    with ctx.working():
        path = [mpmath.mpc(p) for p in path]
        if path[0].real != 0 or path[0].imag >= 0:
            raise ValueError("continuation must start on the negative imaginary axis")
        delta = _newton_delta(path[0], _axis_seed(-path[0].imag, ctx), ctx)
        out = [delta]
        for prev, cur in zip(path, path[1:]):
            guess = delta if len(out) < 2 else 2 * out[-1] - out[-2]
            try:
                new = _newton_delta(cur, guess, ctx)
            except Diverged:
                new = _newton_delta(cur, delta, ctx)
            if abs(new - delta) > 10 * abs(cur - prev) + mpmath.mpf("0.05"):
                raise Diverged(f"endpoint jump {mpmath.nstr(abs(new - delta), 5)} at s={mpmath.nstr(cur, 8)}")
            delta = new
            out.append(delta)
        return out


def solve_endpoints(s, ctx: PrecisionContext, check_region: bool = True) -> Genus1Data:
    """Boutroux endpoints with ``lam0 + lam1 = 4/s``; ``lam0`` is the one
    joined to ``-1``.

    ``Im s < 0`` is reached by continuation from the imaginary axis.  For
    ``Im s > 0`` the solution at ``-s`` is reflected, ``lam0(s) = -lam1(-s)``
    and ``lam1(s) = -lam0(-s)``, which keeps ``lam0`` attached to ``-1``.
    """
    from .phase_portrait import RegionLabel, classify

    with ctx.working():
        s = mpmath.mpc(s)
        if check_region:
            label = classify(s, ctx).label
            if label not in (RegionLabel.G1Minus, RegionLabel.G1Plus):
                raise WrongRegion(f"s={mpmath.nstr(s, 10)} is classified {label.value}, not genus 1")
        if s.imag > 0:
            base = solve_endpoints(-s, ctx, check_region=False)
            diag = dict(base.diagnostics, reflected=True)
            return _build(s, -base.lam1, -base.lam0, ctx, diag)
        path = continuation_path(s)
        deltas = continue_endpoints(path, ctx)
        c = 2 / s
        return _build(s, c + deltas[-1], c - deltas[-1], ctx, {"continuation_steps": len(path) - 1})


# --------------------------------------------------------------------------
# periods and constants


def _in_left_sector(lam0, lam1, direction):
    # at lam0 the chain -1 -> lam0 -> lam1 splits a small circle in two; the
    # left sector runs counterclockwise from the lam1 direction to the -1 one
    a = mpmath.arg((-1 - lam0) / (lam1 - lam0)) % (2 * mpmath.pi)
    d = mpmath.arg(direction / (lam1 - lam0)) % (2 * mpmath.pi)
    return 0 < d < a


def periods_and_constants(data: Genus1Data, ctx: PrecisionContext) -> Genus1Data:
    """Fill in ``b, c, tau, eta1, omega0, Delta0, d, ell, u_inf, u1``.

    Sign conventions: the ``+`` side of an arc is the right side of the
    chain ``-1 -> lam0 -> lam1 -> 1``, the A cycle circles ``[-1, lam0]``
    clockwise and ``u_+ - u_- = 1`` across ``[lam0, lam1]``.  These give
    ``Im tau > 0``, a positive density ``h'_+ dz / (2 pi i)`` on the main arcs
    of total mass one, ``eta1`` the mass of ``[lam1, 1]`` and ``Delta0 = -eta1
    tau``.  ``Delta0`` is evaluated from its own defining integrals and the
    last identity is kept as a diagnostic, as are the imaginary parts of the
    real constants.
    """
    with ctx.working():
        s, l0, l1 = data.s, data.lam0, data.lam1
        two_pi_i = 2j * mpmath.pi

        def inv_xi(side=None):
            def f(anchor, w):
                return 1 / _xi(anchor, w, l0, l1, side)[0]

            return f

        def hp(side=None):
            def f(anchor, w):
                xi, q, _a, _b = _xi(anchor, w, l0, l1, side)
                return -s * xi / q

            return f

        # _xi(side=...) is the left boundary value; the + value is its negative
        P_A = -_quad_anchored(inv_xi("m0"), -1, l0, ctx)
        c = -1 / (2 * P_A)
        b = -s * c

        # Abel map and h at lam0 along the straight path from 1
        U10 = _quad_anchored(inv_xi(), 1, l0, ctx)
        H10 = _quad_anchored(hp(), 1, l0, ctx)
        left = _in_left_sector(l0, l1, 1 - l0)
        u_l0 = -c * U10
        # u_R - u_L = 1 and u_L + u_R = tau at lam0
        tau = 2 * u_l0 + 1 if left else 2 * u_l0 - 1

        eta1_c = -_quad_anchored(hp("m1"), l1, 1, ctx) / two_pi_i
        # h_L - h_R = 4 pi i eta1 across the complementary arc
        h_sum = 2 * H10 - 2 * two_pi_i * eta1_c if left else 2 * H10 + 2 * two_pi_i * eta1_c
        omega0_c = h_sum / (2 * two_pi_i)

        Q_c1 = _quad_anchored(inv_xi(), l0, l1, ctx)
        Delta0 = eta1_c * Q_c1 / P_A

        S, P = l0 + l1, l0 * l1

        def g_ell(anchor, w):
            # -s + 2/z - h'(z); beyond z = 2 rearranged so the O(1) terms do
            # not cancel, leaving only an O(z) cancellation whose rounding
            # decays like 1/z
            z = anchor + w
            xi, q, _a, _b = _xi(anchor, w, l0, l1)
            if abs(w) < 1:
                return -s + 2 / z + s * xi / q
            quartic = -S * z**3 + (P - 1) * z**2 + S * z - P
            return (s * quartic / (xi + z * z) + s + 2 * z - 2 / z) / q

        ell_c = -s + _quad_ray(g_ell, ctx)
        u_inf = -c * _quad_ray(inv_xi(), ctx)
        d = reduce_lattice(-u_inf, tau)[0]

        diag = dict(data.diagnostics)
        diag.update(
            {
                "Delta0_plus_eta1_tau": abs(Delta0 + eta1_c * tau),
                "eta1_imag": abs(eta1_c.imag),
                "omega0_imag": abs(omega0_c.imag),
                "ell_imag": abs(ell_c.imag),
                "abel_left_sector": left,
            }
        )
        return dataclasses.replace(
            data,
            b=b,
            c=c,
            tau=tau,
            eta1=eta1_c.real,
            omega0=omega0_c.real,
            Delta0=Delta0,
            d=d,
            ell=ell_c.real,
            u_inf=u_inf,
            u1=c,
            diagnostics=diag,
        )


def genus1_data(s, ctx: PrecisionContext, check_region: bool = True) -> Genus1Data:
    """Endpoints plus periods and constants."""
    return periods_and_constants(solve_endpoints(s, ctx, check_region), ctx)


def abel_map(data: Genus1Data, z, ctx: PrecisionContext):
    """``u(z) = -int_1^z omega`` along the straight segment from 1; valid when
    that segment avoids the arcs."""
    with ctx.working():
        z = mpmath.mpc(z)
        return -data.c * _quad_anchored(lambda a, w: 1 / _xi(a, w, data.lam0, data.lam1)[0], 1, z, ctx)


# --------------------------------------------------------------------------
# theta function


def reduce_lattice(zeta, tau):
    """``(zeta0, j, k)`` with ``zeta = zeta0 + j + k tau``, ``|Im zeta0| <=
    Im tau / 2`` and ``|Re zeta0 - Re(...)| <= 1/2``."""
    k = int(mpmath.nint(zeta.imag / tau.imag))
    z = zeta - k * tau
    j = int(mpmath.nint(z.real))
    return z - j, j, k


def lattice_distance(zeta, tau):
    """Distance from ``zeta`` to the nearest point of ``Z + tau Z``."""
    z0, _j, _k = reduce_lattice(mpmath.mpc(zeta), tau)
    return min(abs(z0 - p - q * tau) for p in (-1, 0, 1) for q in (-1, 0, 1))


@dataclass(frozen=True)
class ThetaFn:
    """``Theta(zeta) = sum_m exp(2 pi i m zeta + pi i tau m^2)``.

    ``M`` is the number of terms per side needed at ``digits`` for an
    argument already reduced to ``|Im zeta| <= Im tau / 2``; the series itself
    is summed by ``mpmath.jtheta``.
    """

    tau: mpmath.mpc
    digits: int
    M: int = 0

    @classmethod
    def make(cls, tau, digits: int, max_terms: int = 5000):
        with mpmath.workdps(digits + 10):
            return cls._make(mpmath.mpc(tau), digits, max_terms)

    @classmethod
    def _make(cls, tau, digits, max_terms):
        if tau.imag <= 0:
            raise TruncationInsufficient("Im tau must be positive")
        # tail of exp(-pi Im tau (m^2 - m)) below 10^-digits
        need = (digits + 5) * mpmath.log(10) / (mpmath.pi * tau.imag)
        M = int(mpmath.ceil((1 + mpmath.sqrt(1 + 4 * need)) / 2)) + 1
        if M > max_terms:
            raise TruncationInsufficient(f"{M} terms needed for Im tau = {mpmath.nstr(tau.imag, 5)}")
        return cls(tau, digits, M)

    @property
    def q(self):
        return mpmath.expjpi(self.tau)


def theta(zeta, fn: ThetaFn, ctx: PrecisionContext):
    with ctx.working():
        zeta = mpmath.mpc(zeta)
        z0, _j, k = reduce_lattice(zeta, fn.tau)
        val = mpmath.jtheta(3, mpmath.pi * z0, fn.q)
        if k:
            val *= mpmath.exp(-2j * mpmath.pi * k * z0 - 1j * mpmath.pi * k * k * fn.tau)
        return val


def theta_dlog(zeta, fn: ThetaFn, ctx: PrecisionContext):
    """``Theta'(zeta) / Theta(zeta)``."""
    with ctx.working():
        zeta = mpmath.mpc(zeta)
        z0, _j, k = reduce_lattice(zeta, fn.tau)
        val = mpmath.pi * mpmath.jtheta(3, mpmath.pi * z0, fn.q, 1) / mpmath.jtheta(3, mpmath.pi * z0, fn.q)
        return val - 2j * mpmath.pi * k


# --------------------------------------------------------------------------
# admissible degrees and the predictor

DEFAULT_EPSILON = mpmath.mpf("0.05")


def theta_shift(data: Genus1Data, n: int):
    """``W_n = n (Delta0 - omega0)``, the theta-argument shift at degree n.

    The sign pattern is the one fixed by the orientations of
    :func:`periods_and_constants`; it equals ``-n (omega0 + Delta0)`` modulo
    the lattice only when ``eta1 = 1/2``.
    """
    return n * (data.Delta0 - data.omega0)


def solvability_margin(data: Genus1Data, n: int):
    """Lattice distance of ``W_n`` from the theta zero ``(1 + tau)/2``; the
    model problem is solvable iff this is nonzero."""
    return lattice_distance(theta_shift(data, n) - (1 + data.tau) / 2, data.tau)


@dataclass(frozen=True)
class AdmissibleSet:
    indices: list
    excluded: list
    consecutive_excluded: list
    epsilon: mpmath.mpf


def admissible_indices(data: Genus1Data, epsilon=DEFAULT_EPSILON, n_max: int = 200, ctx: PrecisionContext | None = None):
    """Degrees ``1 <= n <= n_max`` whose solvability margin exceeds
    ``epsilon``.  Pairs of consecutive excluded degrees are reported in
    ``consecutive_excluded`` rather than raised."""
    ctx = ctx or PrecisionContext(data.digits)
    with ctx.working():
        eps = mpmath.mpf(epsilon)
        good, bad = [], []
        for n in range(1, n_max + 1):
            (good if solvability_margin(data, n) > eps else bad).append(n)
        pairs = [n for n in bad if n + 1 in set(bad)]
        return AdmissibleSet(good, bad, pairs, eps)


def genus1_predict(data: Genus1Data, n: int, ctx: PrecisionContext, shift=0, epsilon=DEFAULT_EPSILON, printed: bool = False):
    """Leading-order ``(alpha_n, beta_n)`` from the theta-function model.

    With ``phi1 = (2 + lam0 - lam1)/4`` and ``phi2`` the next coefficient of
    ``phi(z) = ((z+1)(z-lam1)/((z-lam0)(z-1)))^(1/4)`` at infinity,

        beta  = phi1^2 M1(inf,-d) M2(inf,d) / (M1(inf,d) M2(inf,-d)),
        alpha = phi2/phi1 - phi1/2 + d/dw [log M2(1/w,d) - log M2(1/w,-d)]_(w=0),

    where ``M1(z,d) = Theta(u - W + d)/Theta(u + d)``, ``M2(z,d) =
    Theta(-u - W + d)/Theta(-u + d)``.  With the conventions of
    :func:`periods_and_constants` the shift is :func:`theta_shift`.
    ``printed=True`` instead uses ``W = n (omega0 + Delta0)`` and ``phi1/2 -
    phi2/phi1``, which does not match the recurrence off the imaginary axis.

    ``shift`` is added to ``W`` before evaluation; the result is invariant
    under lattice shifts.
    """
    if not data.complete:
        raise ValueError("genus-1 data must be completed by periods_and_constants")
    with ctx.working():
        fn = ThetaFn.make(data.tau, ctx.work_digits)
        sign = 1 if printed else -1
        W = (n * (data.omega0 + data.Delta0) if printed else theta_shift(data, n)) + shift
        guard = mpmath.mpf(epsilon) / 10
        if lattice_distance(W - (1 + data.tau) / 2, data.tau) < guard:
            raise NearDegenerate(f"Theta(W) is within {mpmath.nstr(guard, 3)} of its zero at n={n}")
        if lattice_distance(2 * data.u_inf - (1 + data.tau) / 2, data.tau) < guard:
            raise NearDegenerate("Theta(2 u_inf) is near its zero")
        if lattice_distance(2 * data.u_inf + W - (1 + data.tau) / 2, data.tau) < guard:
            # M2 vanishes at infinity; alpha has a pole there
            raise NearDegenerate(f"Theta(2 u_inf + W) is near its zero at n={n}")
        ui, d, l0, l1 = data.u_inf, data.d, data.lam0, data.lam1

        def M1(dd):
            return theta(ui - W + dd, fn, ctx) / theta(ui + dd, fn, ctx)

        def M2(dd):
            return theta(-ui - W + dd, fn, ctx) / theta(-ui + dd, fn, ctx)

        def dlogM2(dd):
            # d/dw log M2(1/w, dd) at w = 0, with u(1/w) = u_inf + u1 w + ...
            return -data.u1 * (theta_dlog(-ui - W + dd, fn, ctx) - theta_dlog(-ui + dd, fn, ctx))

        phi_part = (l1 * l1 - l0 * l0) / (4 + 2 * l0 - 2 * l1)
        beta = (2 + l0 - l1) ** 2 / 16 * (M1(-d) * M2(d)) / (M1(d) * M2(-d))
        alpha = sign * phi_part + dlogM2(d) - dlogM2(-d)
        return alpha, beta


def predictor_table(data: Genus1Data, n_list, ctx: PrecisionContext, epsilon=DEFAULT_EPSILON):
    """Rows ``(n, alpha_hat, beta_hat, admissible)``; inadmissible degrees get
    ``None`` predictions."""
    rows = []
    with ctx.working():
        for n in n_list:
            ok = solvability_margin(data, n) > epsilon
            a = b = None
            if ok:
                try:
                    a, b = genus1_predict(data, n, ctx, epsilon=epsilon)
                except NearDegenerate:
                    ok = False
            rows.append((n, a, b, ok))
    return rows


# --------------------------------------------------------------------------
# contour checks


def _winding(z, loop):
    total = mpmath.mpf(0)
    for a, b in zip(loop, loop[1:] + loop[:1]):
        total += mpmath.arg((b - z) / (a - z))
    return int(mpmath.nint(total / (2 * mpmath.pi)))


def check_contours(data: Genus1Data, ctx: PrecisionContext, **trace_kw):
    """Trace the critical trajectories leaving ``-1`` and ``lam1`` and confirm
    that the arcs landing on ``lam0`` and ``1`` can be deformed to the straight
    segments without crossing another branch point.

    Returns ``{name: (polyline or None, ok)}`` for ``m0`` and ``m1``.
    """
    from .phase_portrait import Termination, emanation_directions, trace_trajectory

    q = genus1_qsqrt(data)
    pts = genus1_critical_points(data)
    targets = {"m0": (pts[0], data.lam0), "m1": (pts[3], mpmath.mpc(1))}
    others = {"m0": [data.lam1, mpmath.mpc(1)], "m1": [mpmath.mpc(-1), data.lam0]}
    out = {}
    for name, (src, goal) in targets.items():
        found = None
        for u in emanation_directions(q, src):
            tr = trace_trajectory(q, src.z, u, ctx, pts, source=src, **trace_kw)
            if tr.termination is Termination.HitCriticalPoint and abs(tr.hit - goal) < mpmath.mpf("1e-6"):
                found = tr
                break
        if found is None:
            out[name] = (None, False)
            continue
        loop = list(found.points.points) + [goal]
        ok = all(_winding(p, loop) == 0 for p in others[name])
        out[name] = (found, ok)
    return out
