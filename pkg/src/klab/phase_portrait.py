"""Genus-0 h-function, saddle values, breaking curves, region labels and
trajectories of quadratic differentials.

The genus-0 function is

    h(z; s) = 2 log(z + r(z)) - s r(z),   r(z) = (z^2 - 1)^(1/2) ~ z,

evaluated with ``r`` cut on a polyline from -1 to 1 (default the segment) and
the principal logarithm.  Its only saddle is ``z0 = 2/s`` and the saddle
value ``H(s) = h(2/s; s)`` is holomorphic in ``s`` off the real rays
``|s| >= 2``.  Breaking curves are components of ``Re H = 0``; the sign
convention used throughout is ``Re H > 0`` in the genus-0 region.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
from mpmath import mp

from .errors import (
    AmbiguousNearBoundary,
    BranchJump,
    LostCurve,
    PointOnCut,
    SingularParameter,
)
from .precision import LIKE_Z, Path, PrecisionContext, csqrt_cut, newton_solve

DEFAULT_CUT = Path([-1, 1])


# --------------------------------------------------------------------------
# genus-0 h-function


def _root(z, cut, ctx):
    return csqrt_cut(z, cut, LIKE_Z, ctx=ctx)


def h0_eval(s, z, ctx: PrecisionContext, cut: Path = DEFAULT_CUT):
    with ctx.working():
        s, z = mpmath.mpc(s), mpmath.mpc(z)
        r = _root(z, cut, ctx)
        return 2 * mpmath.log(z + r) - s * r


def h0_prime(s, z, ctx: PrecisionContext, cut: Path = DEFAULT_CUT):
    with ctx.working():
        s, z = mpmath.mpc(s), mpmath.mpc(z)
        return (2 - s * z) / _root(z, cut, ctx)


def ell0():
    """Genus-0 constant in ``h = -s z - ell + 2 log z + o(1)``."""
    return -2 * mpmath.log(2)


def _saddle_root(s, ctx, cut):
    z0 = 2 / s
    return z0, _root(z0, cut, ctx)


def h0_saddle_value(s, ctx: PrecisionContext, cut: Path = DEFAULT_CUT):
    """``H(s) = h(2/s; s)``; zero at ``s = +-2`` where the saddle meets ``+-1``."""
    with ctx.working():
        s = mpmath.mpc(s)
        if s == 0:
            raise SingularParameter("saddle z0 = 2/s is at infinity for s = 0")
        if s == 2:
            return mpmath.mpc(0)
        if s == -2:
            return mpmath.mpc(0, 2 * mpmath.pi)
        z0, r = _saddle_root(s, ctx, cut)
        return 2 * mpmath.log(z0 + r) - s * r


def h0_saddle_derivative(s, ctx: PrecisionContext, cut: Path = DEFAULT_CUT):
    """``dH/ds = -(4/s^2 - 1)^(1/2)`` with the root of ``h`` at the saddle."""
    with ctx.working():
        s = mpmath.mpc(s)
        _z0, r = _saddle_root(s, ctx, cut)
        return -r


def saddle_root(s, ctx: PrecisionContext):
    """``(4/s^2 - 1)^(1/2)`` on the branch used by :func:`h0_eval` at ``z0``."""
    with ctx.working():
        return _saddle_root(mpmath.mpc(s), ctx, DEFAULT_CUT)[1]


@dataclass(frozen=True)
class HGenus0:
    s: mpmath.mpc
    cut: Path = DEFAULT_CUT

    def h(self, z, ctx):
        return h0_eval(self.s, z, ctx, self.cut)

    def hprime(self, z, ctx):
        return h0_prime(self.s, z, ctx, self.cut)

    @property
    def saddle(self):
        return 2 / mpmath.mpc(self.s)

    def saddle_value(self, ctx):
        return h0_saddle_value(self.s, ctx, self.cut)

    @property
    def ell(self):
        return ell0()


def one_edge_hprime(s, z, ctx: PrecisionContext):
    """Derivative of the genus-0 h-function with one soft edge, real ``|s| > 2``.

    For ``s > 2`` the support is ``[-1, 4/s - 1]`` and for ``s < -2`` it is
    ``[1 + 4/s, 1]``; the root is normalized so ``h' ~ -s + 2/z``.  This
    function has no saddle point.
    """
    with ctx.working():
        s, z = mpmath.mpc(s), mpmath.mpc(z)
        if s.imag != 0 or abs(s.real) <= 2:
            raise SingularParameter("one-edge h-function needs real |s| > 2")
        if s.real > 2:
            lam, edge = 4 / s - 1, mpmath.mpc(-1)
        else:
            lam, edge = 1 + 4 / s, mpmath.mpc(1)
        root = csqrt_cut(z, Path([edge, lam]), LIKE_Z, ctx=ctx)
        return -s * root / (z - edge)


# --------------------------------------------------------------------------
# t_c


def tc_residual(t):
    q = mpmath.sqrt(t * t + 4)
    return 2 * mpmath.log((2 + q) / t) - q


def solve_tc(ctx: PrecisionContext):
    """Unique positive root of ``2 log((2 + sqrt(t^2+4))/t) - sqrt(t^2+4)``."""
    with ctx.working():
        lo, hi = mpmath.mpf("0.5"), mpmath.mpf(3)

        def F(x):
            return [tc_residual(x[0])]

        def J(x):
            t = x[0]
            q = mpmath.sqrt(t * t + 4)
            return [[2 * (t / (q * (2 + q)) - 1 / t) - t / q]]

        # a few bisection steps keep Newton inside the bracket
        for _ in range(8):
            mid = (lo + hi) / 2
            if tc_residual(mid) > 0:
                lo = mid
            else:
                hi = mid
        (t,) = newton_solve(F, [(lo + hi) / 2], ctx, J=J, tol=mpmath.mpf(10) ** (-ctx.work_digits + 3))
        if not lo <= t <= hi:
            raise LostCurve("t_c Newton left its bracket")
        return t


# --------------------------------------------------------------------------
# region labels


class RegionLabel(enum.Enum):
    G0 = "G0"
    G1Plus = "G1Plus"
    G1Minus = "G1Minus"
    BreakPlus = "BreakPlus"
    BreakMinus = "BreakMinus"
    BreakRayPos = "BreakRayPos"
    BreakRayNeg = "BreakRayNeg"
    CriticalPoint2 = "CriticalPoint2"
    CriticalPointMinus2 = "CriticalPointMinus2"


@dataclass(frozen=True)
class Classification:
    s: mpmath.mpc
    label: RegionLabel
    re_h_cr: object


def classify(s, ctx: PrecisionContext, tol=None, strict: bool = False) -> Classification:
    """Region of the ``s``-plane containing ``s``.

    With ``strict`` a point whose ``|Re H|`` lies between ``tol`` and
    ``10 tol`` raises :class:`AmbiguousNearBoundary` instead of being labelled
    by the sign test.
    """
    with ctx.working():
        s = mpmath.mpc(s)
        tol = mpmath.mpf(10) ** (-(ctx.digits // 2)) if tol is None else mpmath.mpf(tol)
        if abs(s - 2) < tol:
            return Classification(s, RegionLabel.CriticalPoint2, mpmath.mpf(0))
        if abs(s + 2) < tol:
            return Classification(s, RegionLabel.CriticalPointMinus2, mpmath.mpf(0))
        if s.imag == 0 and abs(s.real) > 2:
            label = RegionLabel.BreakRayPos if s.real > 0 else RegionLabel.BreakRayNeg
            return Classification(s, label, mpmath.mpf(0))
        if s == 0:
            return Classification(s, RegionLabel.G0, mpmath.inf)
        re_h = h0_saddle_value(s, ctx).real
        if abs(re_h) < tol:
            if s.imag == 0:
                raise AmbiguousNearBoundary(re_h)
            label = RegionLabel.BreakPlus if s.imag > 0 else RegionLabel.BreakMinus
            return Classification(s, label, re_h)
        if strict and abs(re_h) < 10 * tol:
            raise AmbiguousNearBoundary(re_h)
        if re_h > 0:
            return Classification(s, RegionLabel.G0, re_h)
        label = RegionLabel.G1Plus if s.imag > 0 else RegionLabel.G1Minus
        return Classification(s, label, re_h)


# --------------------------------------------------------------------------
# breaking curves


class Branch(enum.Enum):
    Plus = "Plus"
    Minus = "Minus"
    RayPos = "RayPos"
    RayNeg = "RayNeg"


@dataclass(frozen=True)
class BreakingCurve:
    branch: Branch
    path: Path
    axis_crossings: tuple = ()
    last_traced: object = None
    residual: object = None


def _level_correct(G: Callable, dG: Callable, s, iters, tol):
    # Newton along the gradient of Re G, i.e. transverse to the level curve
    for _ in range(iters):
        val = G(s).real
        if abs(val) < tol:
            return s
        d = dG(s)
        s = s - val * mpmath.conj(d) / abs(d) ** 2
    if abs(G(s).real) < tol * 10 ** 10:
        return s
    raise LostCurve(f"corrector failed near s={mpmath.nstr(s, 8)}")


def _emanation_angles(G, center, radius, want, samples=720):
    # zero crossings of Re G on a small circle, refined by bisection
    angles = []

    def f(theta):
        return G(center + radius * mpmath.expj(theta)).real

    prev_t = None
    prev_v = None
    for k in range(samples + 1):
        t = 2 * mpmath.pi * k / samples
        try:
            v = f(t)
        except PointOnCut:
            prev_t = None
            continue
        if prev_t is not None and prev_v * v < 0:
            a, b, fa = prev_t, t, prev_v
            for _ in range(80):
                m = (a + b) / 2
                fm = f(m)
                if fa * fm <= 0:
                    b = m
                else:
                    a, fa = m, fm
            angles.append((a + b) / 2)
        prev_t, prev_v = t, v
    return [a for a in angles if want(mpmath.expj(a))]


def trace_breaking_curve(branch: Branch, arclength_step, ctx: PrecisionContext, box=8):
    """Polyline along ``Re H(s) = 0``.

    ``Plus`` and ``Minus`` start next to ``s = 2`` in the upper/lower half
    plane and stop once within one step of ``s = -2``; points where the
    curve crosses the imaginary axis are solved for exactly and inserted.
    Rays are returned as the segments from ``+-2`` to the bounding box.
    """
    branch = Branch(branch)
    if branch is Branch.RayPos:
        return BreakingCurve(branch, Path([2, box]), (), mpmath.mpc(box), mpmath.mpf(0))
    if branch is Branch.RayNeg:
        return BreakingCurve(branch, Path([-2, -box]), (), mpmath.mpc(-box), mpmath.mpf(0))
    with ctx.working():
        step0 = mpmath.mpf(arclength_step)
        if step0 <= 0:
            raise ValueError("step must be positive")
        tol = mpmath.mpf(10) ** (-ctx.work_digits + 8)
        sign = 1 if branch is Branch.Plus else -1

        def G(s):
            return h0_saddle_value(s, ctx)

        def dG(s):
            return h0_saddle_derivative(s, ctx)

        start, target = mpmath.mpc(2), mpmath.mpc(-2)
        r0 = min(step0, mpmath.mpf("0.05"))
        angles = _emanation_angles(G, start, r0, lambda u: sign * u.imag > abs(u) / 10)
        if not angles:
            raise LostCurve("no emanation direction found at s=2")
        s = _level_correct(G, dG, start + r0 * mpmath.expj(angles[0]), 60, tol)
        pts = [start, s]
        crossings = []
        tangent = (s - start) / abs(s - start)
        step = step0
        for _ in range(200000):
            d = dG(s)
            t = 1j * mpmath.conj(d) / abs(d)
            if (t * mpmath.conj(tangent)).real < 0:
                t = -t
            try:
                s_new = _level_correct(G, dG, s + step * t, 30, tol)
            except (LostCurve, PointOnCut):
                step /= 2
                if step < step0 * mpmath.mpf(2) ** -30:
                    raise LostCurve(f"step underflow at s={mpmath.nstr(s, 8)}")
                continue
            if abs(s_new - s) > 3 * step:
                step /= 2
                continue
            if s.real * s_new.real < 0:
                crossings.append(_axis_crossing(G, dG, s, s_new, tol))
                pts.append(crossings[-1])
            tangent = (s_new - s) / abs(s_new - s)
            s = s_new
            pts.append(s)
            step = min(step0, step * 2)
            if abs(s - target) < step0:
                break
        else:
            raise LostCurve("breaking curve did not reach s=-2")
        last = s
        residual = max(abs(G(p).real) for p in pts[1:])
        pts.append(target)
        return BreakingCurve(branch, Path(pts), tuple(crossings), last, residual)


def _axis_crossing(G, dG, a, b, tol):
    # solve Re H(i y) = 0 for y between the two neighbouring points
    y = (a.imag * b.real - b.imag * a.real) / (b.real - a.real)
    for _ in range(100):
        s = mpmath.mpc(0, y)
        val = G(s).real
        if abs(val) < tol:
            return s
        # d/dy Re H(iy) = Re(i H'(iy))
        y = y - val / (1j * dG(s)).real
    raise LostCurve("axis crossing did not converge")


# --------------------------------------------------------------------------
# trajectories of quadratic differentials


class Termination(enum.Enum):
    HitCriticalPoint = "HitCriticalPoint"
    LeftDomain = "LeftDomain"
    StepLimit = "StepLimit"


@dataclass(frozen=True)
class CriticalPoint:
    z: mpmath.mpc
    order: int  # multiplicity of Q: zero order m > 0, simple pole -1


@dataclass
class TrajectoryPolyline:
    points: Path
    source: mpmath.mpc
    termination: Termination
    hit: object = None
    re_integral: object = None
    arclength: object = None
    diagnostics: list = field(default_factory=list)

    @property
    def terminator(self) -> str:
        if self.termination is Termination.HitCriticalPoint:
            return f"HitCriticalPoint({mpmath.nstr(self.hit, 12)})"
        return self.termination.value


def emanation_directions(qsqrt: Callable, p: CriticalPoint, probe=mpmath.mpf("1e-12")):
    """The ``m + 2`` unit directions along which ``Re int sqrt(Q) dz`` is
    constant at a critical point of order ``m``."""
    m = p.order
    a = mpmath.mpc(0)
    for k in range(4):
        u = mpmath.expj(mpmath.pi / 4 + k * mpmath.pi / 2)
        v = qsqrt(p.z + probe * u)
        a += v * v / (probe * u) ** m
    a /= 4
    e = mpmath.mpf(m) / 2 + 1
    phi = mpmath.arg(mpmath.sqrt(a))
    count = m + 2
    out = []
    for k in range(count):
        theta = (mpmath.pi / 2 - phi + k * mpmath.pi) / e
        out.append(mpmath.expj(theta))
    return out


def _short_integral(f, a, b):
    # 3-point Gauss-Legendre on [a, b]; used for tiny corrector moves
    mid, half = (a + b) / 2, (b - a) / 2
    x = mpmath.sqrt(mpmath.mpf(3) / 5)
    return half * (mpmath.mpf(5) / 9 * (f(mid - half * x) + f(mid + half * x)) + mpmath.mpf(8) / 9 * f(mid))


def trace_trajectory(
    qsqrt: Callable,
    seed,
    direction,
    ctx: PrecisionContext,
    critical_points: Sequence[CriticalPoint] = (),
    source: CriticalPoint | None = None,
    r_stop=mpmath.mpf("1e-4"),
    box=8,
    max_step=mpmath.mpf("0.02"),
    step_limit: int = 100000,
    start_radius=None,
) -> TrajectoryPolyline:
    """Follow ``sqrt(Q) dz in iR`` from ``seed`` in the direction ``direction``.

    ``qsqrt`` may return either square root; the sign is continued from step
    to step.  Each step is a midpoint predictor followed by a corrector that
    restores ``Re`` of the accumulated chord integral to zero.  The trace stops
    inside ``r_stop`` of a critical point, outside ``|Re z|, |Im z| <= box``, or
    after ``step_limit`` steps.
    """
    with ctx.working():
        r_stop = mpmath.mpf(r_stop)
        max_step = mpmath.mpf(max_step)
        tol = mpmath.mpf(10) ** (-(ctx.digits // 3) - 5)
        seed = mpmath.mpc(seed)
        u = mpmath.mpc(direction)
        u /= abs(u)
        crit = [c for c in critical_points]

        def nearest(z, skip_source):
            best, who = mpmath.inf, None
            for c in crit:
                if skip_source and source is not None and c.z == source.z:
                    continue
                d = abs(z - c.z)
                if d < best:
                    best, who = d, c
            return best, who

        acc = mpmath.mpc(0)
        if source is not None:
            r0 = start_radius if start_radius is not None else min(max_step, mpmath.mpf("1e-3"))
            z = seed + r0 * u
            # first leg leaves a singular point; tanh-sinh handles the endpoint
            v_prev = qsqrt(z)
            z, acc, v_prev = _correct_first(qsqrt, seed, z, v_prev, tol)
            pts = [seed, z]
        else:
            z = seed
            v_prev = qsqrt(z)
            pts = [z]
        if (1j / v_prev * mpmath.conj(u)).real < 0:
            v_prev = -v_prev
        arclength = abs(pts[-1] - pts[0])
        left_source = source is None
        step = max_step
        termination = Termination.StepLimit
        hit = None
        for _ in range(step_limit):
            dist_all, who_all = nearest(z, skip_source=not left_source)
            if not left_source and source is not None and abs(z - source.z) > 10 * max(r_stop, abs(pts[1] - pts[0])):
                left_source = True
            if who_all is not None and dist_all < r_stop:
                termination, hit = Termination.HitCriticalPoint, who_all.z
                break
            if abs(z.real) > box or abs(z.imag) > box:
                termination = Termination.LeftDomain
                break
            dist, _who = nearest(z, skip_source=False)
            h = min(step, max_step, max(dist * mpmath.mpf("0.3"), r_stop / 4))
            try:
                z_new, v_new, dacc = _step(qsqrt, z, v_prev, h, acc, tol)
            except BranchJump:
                step = h / 2
                if step < r_stop * mpmath.mpf(2) ** -20:
                    raise
                continue
            acc += dacc
            arclength += abs(z_new - z)
            z, v_prev = z_new, v_new
            pts.append(z)
            step = min(max_step, h * 2)
        path = Path(pts)
        return TrajectoryPolyline(path, seed, termination, hit, acc.real, arclength)


def _direction(v):
    return 1j * mpmath.conj(v) / abs(v)


def _tracked(qsqrt, z, v_prev):
    v = qsqrt(z)
    if abs(v - v_prev) > abs(v + v_prev):
        v = -v
    # argument jump above pi/2 means the step crossed a branch structure
    if (v * mpmath.conj(v_prev)).real < 0:
        raise BranchJump(f"argument jump at z={mpmath.nstr(z, 8)}")
    return v


def _segment_integral(qsqrt, a, b, va):
    # Gauss-Legendre on the chord with sign continuation from a
    def f(t):
        v = qsqrt(a + (b - a) * t)
        return -v if abs(v - va) > abs(v + va) else v

    return mp.quad(f, [0, 1], method="gauss-legendre") * (b - a)


def _step(qsqrt, z, v, h, acc, tol):
    t1 = _direction(v)
    vm = _tracked(qsqrt, z + h / 2 * t1, v)
    zp = z + h * _direction(vm)
    vp = _tracked(qsqrt, zp, vm)
    dacc = _segment_integral(qsqrt, z, zp, v)
    track = vp
    for _ in range(12):
        err = (acc + dacc).real
        if abs(err) < tol * h:
            break
        delta = -err * mpmath.conj(track) / abs(track) ** 2

        def ftr(w, ref=track):
            u = qsqrt(w)
            return -u if abs(u - ref) > abs(u + ref) else u

        dacc += _short_integral(ftr, zp, zp + delta)
        zp = zp + delta
        track = _tracked(qsqrt, zp, track)
    else:
        raise BranchJump("corrector did not settle")
    return zp, track, dacc


def _correct_first(qsqrt, a, z, v, tol):
    # integral from the critical point a to z, then transverse corrections
    def f(t, ref=v):
        w = a + (z - a) * t
        u = qsqrt(w)
        return -u if abs(u - ref) > abs(u + ref) else u

    acc = mp.quad(f, [0, 1]) * (z - a)
    track = v
    for _ in range(40):
        if abs(acc.real) < tol * abs(z - a):
            return z, acc, track
        delta = -acc.real * mpmath.conj(track) / abs(track) ** 2

        def ftr(w, ref=track):
            u = qsqrt(w)
            return -u if abs(u - ref) > abs(u + ref) else u

        acc += _short_integral(ftr, z, z + delta)
        z = z + delta
        track = _tracked(qsqrt, z, track)
    raise BranchJump("first-step corrector did not settle")


# --------------------------------------------------------------------------
# critical graphs


def genus0_qsqrt(s, ctx):
    s = mpmath.mpc(s)

    def q(z):
        return (2 - s * z) / mpmath.sqrt(z * z - 1)

    return q


def genus0_critical_points(s):
    s = mpmath.mpc(s)
    return [CriticalPoint(mpmath.mpc(-1), -1), CriticalPoint(mpmath.mpc(1), -1), CriticalPoint(2 / s, 2)]


def critical_graph_from(qsqrt, points: Sequence[CriticalPoint], ctx: PrecisionContext, **kw):
    """Trace every trajectory leaving every critical point.  Failures are
    recorded in the diagnostics of an empty polyline instead of raised."""
    out = []
    for p in points:
        for u in emanation_directions(qsqrt, p):
            try:
                out.append(trace_trajectory(qsqrt, p.z, u, ctx, points, source=p, **kw))
            except (BranchJump, LostCurve, PointOnCut) as exc:
                out.append(
                    TrajectoryPolyline(Path([p.z]), p.z, Termination.StepLimit, diagnostics=[f"{type(exc).__name__}: {exc}"])
                )
    return out


def critical_graph(s, ctx: PrecisionContext, genus1_data=None, **kw):
    """Critical graph of the genus-0 differential, or of the genus-1 one when
    ``genus1_data`` (endpoints solved) is given."""
    if genus1_data is None:
        return critical_graph_from(genus0_qsqrt(s, ctx), genus0_critical_points(s), ctx, **kw)
    from .genus1 import genus1_qsqrt, genus1_critical_points

    return critical_graph_from(genus1_qsqrt(genus1_data), genus1_critical_points(genus1_data), ctx, **kw)
