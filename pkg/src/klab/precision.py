"""Arbitrary-precision substrate: working-precision handle, branch-controlled
square roots, path quadrature, Newton iteration and a simultaneous root finder.

All numbers are :mod:`mpmath` ``mpf``/``mpc`` objects.  A :class:`PrecisionContext`
is threaded through every call; the computation itself runs at
``digits + guard_digits`` and callers round to ``digits`` when they emit.
"""

from __future__ import annotations

import random
import re
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import mpmath
from mpmath import mp

from .errors import DegenerateDegree, Diverged, NoConvergence, PointOnCut

DEFAULT_DIGITS = 120
DEFAULT_GUARD = 15


@dataclass(frozen=True)
class PrecisionContext:
    """Immutable working-precision handle.

    ``digits`` is the number of decimal digits the caller wants to trust;
    ``guard_digits`` are added for intermediate rounding.
    """

    digits: int = DEFAULT_DIGITS
    guard_digits: int = DEFAULT_GUARD

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 30:
            raise ValueError(f"digits must be an integer >= 30, got {self.digits}")
        if int(self.guard_digits) != self.guard_digits or self.guard_digits < 0:
            raise ValueError("guard_digits must be a non-negative integer")

    @property
    def work_digits(self) -> int:
        return self.digits + self.guard_digits

    @property
    def tol(self):
        """Target accuracy 10^(-digits+guard) used by solvers and quadrature."""
        return mpmath.mpf(10) ** (-self.digits + self.guard_digits)

    def eps(self, offset: int = 0):
        """10^(-digits + offset) at the current precision."""
        return mpmath.mpf(10) ** (-self.digits + offset)

    def with_digits(self, digits: int) -> "PrecisionContext":
        return PrecisionContext(int(digits), self.guard_digits)

    def scaled(self, factor: float) -> "PrecisionContext":
        return self.with_digits(int(round(self.digits * factor)))

    @contextmanager
    def working(self, extra: int = 0):
        """Run the body at ``work_digits + extra`` decimal digits."""
        with mp.workdps(self.work_digits + extra):
            yield self


def to_mpc(x) -> mpmath.mpc:
    if isinstance(x, str):
        return parse_complex(x)
    return mpmath.mpc(x)


_COMPLEX_RE = re.compile(
    r"""^\s*
    (?:(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?![\dij.eE]))?
    \s*
    (?:(?P<im>[+-]?\s*(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)\s*[ij])?
    \s*$""",
    re.VERBOSE,
)


def parse_complex(text: str) -> mpmath.mpc:
    """Parse strings such as ``1``, ``-2i``, ``0+1i``, ``1.5-0.25j``, ``i``.

    The decimal text is handed to mpmath so no binary rounding happens, the
    value is exact at the current precision.
    """
    if not isinstance(text, str) or not text.strip():
        raise ValueError(f"cannot parse complex number from {text!r}")
    m = _COMPLEX_RE.match(text)
    if m is None or (m.group("re") is None and m.group("im") is None):
        raise ValueError(f"cannot parse complex number from {text!r}")
    re_part = mpmath.mpf(m.group("re")) if m.group("re") is not None else mpmath.mpf(0)
    im_part = mpmath.mpf(0)
    if m.group("im") is not None:
        im_text = m.group("im").replace(" ", "")
        if im_text in ("", "+"):
            im_part = mpmath.mpf(1)
        elif im_text == "-":
            im_part = mpmath.mpf(-1)
        else:
            im_part = mpmath.mpf(im_text)
    return mpmath.mpc(re_part, im_part)


def fmt(x, digits: int) -> str:
    """Deterministic decimal string with ``digits`` significant digits."""
    return mpmath.nstr(mpmath.mpf(x), digits, min_fixed=-4, max_fixed=6)


def fmt_complex(z, digits: int) -> str:
    z = mpmath.mpc(z)
    im = fmt(z.imag, digits)
    sign = "" if im.startswith("-") else "+"
    return f"{fmt(z.real, digits)}{sign}{im}i"


# --------------------------------------------------------------------------
# Paths


@dataclass(frozen=True)
class Path:
    """Polyline through ``points``; a closed path returns to its first point."""

    points: tuple
    closed: bool = False

    def __init__(self, points: Iterable, closed: bool = False):
        pts = tuple(mpmath.mpc(p) for p in points)
        if len(pts) < 1:
            raise ValueError("a path needs at least one point")
        for a, b in zip(pts, pts[1:]):
            if a == b:
                raise ValueError("consecutive waypoints must be distinct")
        if closed and len(pts) > 1 and pts[0] == pts[-1]:
            raise ValueError("closed paths must not repeat their first point")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "closed", bool(closed))

    def segments(self):
        pts = self.points
        segs = list(zip(pts, pts[1:]))
        if self.closed and len(pts) > 1:
            segs.append((pts[-1], pts[0]))
        return segs

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[0] if self.closed else self.points[-1]

    def length(self):
        return mpmath.fsum(abs(b - a) for a, b in self.segments())

    def reversed(self) -> "Path":
        return Path(reversed(self.points), self.closed)

    def __len__(self):
        return len(self.points)


def distance_to_segment(z, a, b):
    d = b - a
    t = ((z - a) * mpmath.conj(d)).real / abs(d) ** 2
    t = min(max(t, mpmath.mpf(0)), mpmath.mpf(1))
    return abs(z - (a + t * d))


def distance_to_path(z, path: Path):
    segs = path.segments()
    if not segs:
        return abs(z - path.points[0])
    return min(distance_to_segment(z, a, b) for a, b in segs)


# --------------------------------------------------------------------------
# Branch-controlled square roots


class LikeZAtInfinity:
    """Normalization: the root behaves like ``+z`` for large ``|z|``."""

    def __repr__(self):
        return "LikeZAtInfinity()"


@dataclass(frozen=True)
class PrincipalAtPoint:
    """Normalization: the root at ``point`` is the one closest to ``value``."""

    point: object
    value: object


LIKE_Z = LikeZAtInfinity()


def _sqrt_segment(z, a, b):
    # sqrt((z-a)(z-b)) with its cut exactly on the segment [a, b] and ~z at
    # infinity: both factor cuts point along a-b, so they cancel beyond a.
    u = (a - b) / abs(a - b)
    return -u * mpmath.sqrt(-(z - a) / u) * mpmath.sqrt(-(z - b) / u)


def csqrt_cut(z, cut: Path, normalization=LIKE_Z, clearance=None, ctx: PrecisionContext | None = None):
    """Square root of ``(z - a)(z - b)`` continuous off the polyline ``cut``.

    ``a`` and ``b`` are the first and last waypoints of ``cut``.  For a
    multi-segment cut the function is built as a product of single-segment
    roots divided by the interior waypoint factors, which leaves a jump only
    across the polyline itself.
    """
    if cut.closed or len(cut.points) < 2:
        raise ValueError("cut must be an open polyline with at least two points")
    z = mpmath.mpc(z)
    if clearance is None:
        digits = ctx.digits if ctx is not None else mp.dps
        clearance = mpmath.mpf(10) ** (-(digits // 2))
    if distance_to_path(z, cut) <= clearance:
        raise PointOnCut(f"z={z} within {clearance} of the cut")
    pts = cut.points
    val = mpmath.mpc(1)
    for a, b in zip(pts, pts[1:]):
        val *= _sqrt_segment(z, a, b)
    for p in pts[1:-1]:
        val /= z - p
    if isinstance(normalization, PrincipalAtPoint):
        ref = csqrt_cut(normalization.point, cut, LIKE_Z, clearance=0)
        target = mpmath.mpc(normalization.value)
        if abs(ref - target) > abs(ref + target):
            val = -val
    return val


def sqrt_tracked(w, previous):
    """Square root of ``w`` on the branch closest to ``previous``."""
    r = mpmath.sqrt(w)
    if previous is not None and abs(r - previous) > abs(r + previous):
        r = -r
    return r


# --------------------------------------------------------------------------
# Quadrature


def integrate_path(
    f: Callable,
    path: Path,
    ctx: PrecisionContext,
    singular_ends: Sequence[bool] | None = None,
    maxdegree: int = 12,
    tol=None,
):
    """Integrate ``f(z) dz`` along ``path`` with tanh-sinh on each segment.

    Tanh-sinh clusters nodes double-exponentially at both ends of every
    segment, so square-root endpoint singularities need no special handling;
    ``singular_ends`` is accepted for documentation and is used only to keep
    the integrand from being sampled exactly at a flagged endpoint.
    """
    segs = path.segments()
    if singular_ends is None:
        singular_ends = [False] * (len(segs) + 1)
    with ctx.working():
        tol = ctx.tol if tol is None else mpmath.mpf(tol)
        total = mpmath.mpc(0)
        for a, b in segs:
            d = b - a

            def g(t, a=a, d=d):
                return f(a + d * t) * d

            val, err = mp.quad(g, [0, 1], error=True, maxdegree=maxdegree)
            if not (err <= tol * max(1, abs(val))):
                raise NoConvergence(
                    f"tanh-sinh error estimate {mpmath.nstr(err, 5)} above tolerance on segment {a}->{b}"
                )
            total += val
        return total


# --------------------------------------------------------------------------
# Newton iteration


def _norm_inf(v):
    return max(abs(x) for x in v) if len(v) else mpmath.mpf(0)


def newton_solve(
    F: Callable,
    x0: Sequence,
    ctx: PrecisionContext,
    J: Callable | None = None,
    max_iter: int = 200,
    max_halvings: int = 40,
    tol=None,
):
    """Damped Newton iteration for a real system ``F(x) = 0``.

    ``F`` maps a list of ``mpf`` to a list of ``mpf`` of the same length.
    Without ``J`` a forward-difference Jacobian is used.  A step that increases
    the residual is halved up to ``max_halvings`` times.
    """
    with ctx.working():
        tol = ctx.tol if tol is None else mpmath.mpf(tol)
        x = [mpmath.mpf(v) for v in x0]
        k = len(x)
        r = [mpmath.mpf(v) for v in F(x)]
        rn = _norm_inf(r)
        for _ in range(max_iter):
            if rn < tol:
                return x
            if J is not None:
                jac = mpmath.matrix(J(x))
            else:
                jac = mpmath.matrix(k, k)
                for j in range(k):
                    h = mpmath.mpf(10) ** (-(ctx.work_digits // 2)) * max(1, abs(x[j]))
                    xh = list(x)
                    xh[j] += h
                    rh = F(xh)
                    for i in range(k):
                        jac[i, j] = (rh[i] - r[i]) / h
            try:
                dx = mpmath.lu_solve(jac, mpmath.matrix(r))
            except ZeroDivisionError as exc:
                raise Diverged("singular Jacobian") from exc
            lam = mpmath.mpf(1)
            for _h in range(max_halvings + 1):
                xn = [x[i] - lam * dx[i] for i in range(k)]
                rnew = [mpmath.mpf(v) for v in F(xn)]
                rnn = _norm_inf(rnew)
                if rnn < rn or rnn < tol:
                    break
                lam /= 2
            else:
                raise Diverged(f"damping exhausted at residual {mpmath.nstr(rn, 5)}")
            x, r, rn = xn, rnew, rnn
        if rn < tol:
            return x
        raise Diverged(f"no convergence after {max_iter} iterations, residual {mpmath.nstr(rn, 5)}")


def newton_complex(f: Callable, z0, ctx: PrecisionContext, fprime: Callable | None = None, max_iter=200, tol=None):
    """Newton iteration for a holomorphic scalar ``f``, thin wrapper over
    :func:`newton_solve` on the real and imaginary parts."""

    def F(x):
        v = f(mpmath.mpc(x[0], x[1]))
        return [v.real, v.imag]

    J = None
    if fprime is not None:

        def J(x):
            d = fprime(mpmath.mpc(x[0], x[1]))
            return [[d.real, -d.imag], [d.imag, d.real]]

    z0 = mpmath.mpc(z0)
    x = newton_solve(F, [z0.real, z0.imag], ctx, J=J, max_iter=max_iter, tol=tol)
    return mpmath.mpc(x[0], x[1])


# --------------------------------------------------------------------------
# Simultaneous root finding


def circle_seeds(degree: int, radius=2, seed: int = 0):
    """Perturbed points on a circle, deterministic for a given ``seed``."""
    rng = random.Random(seed)
    out = []
    for k in range(degree):
        angle = 2 * mpmath.pi * (k + mpmath.mpf(0.5) + mpmath.mpf(0.25) * rng.random()) / degree
        r = radius * (1 + mpmath.mpf(0.05) * (rng.random() - 0.5))
        out.append(r * mpmath.expj(angle))
    return out


def aberth_roots(
    p_eval: Callable,
    degree: int,
    ctx: PrecisionContext,
    seeds: Sequence | None = None,
    max_iter: int = 1000,
    p_eval_many: Callable | None = None,
):
    """All roots of a degree-``degree`` polynomial by Aberth-Ehrlich iteration.

    ``p_eval(z)`` returns ``(p(z), p'(z))``; ``p_eval_many(zs)`` may be given to
    evaluate a whole vector at once.  Iteration stops once every correction is
    below the working epsilon, or once corrections stall (clustered roots)
    with residuals already below ``10^(-digits/2)`` relative to ``|p'|``.
    """
    if degree < 1:
        raise DegenerateDegree("degree must be at least 1")
    with ctx.working():
        zs = [mpmath.mpc(v) for v in (seeds if seeds is not None else circle_seeds(degree))]
        if len(zs) != degree:
            raise ValueError("need exactly one seed per root")
        eps = mpmath.mpf(10) ** (-ctx.work_digits + 2)
        half = mpmath.mpf(10) ** (-(ctx.digits // 2))
        if p_eval_many is None:
            def p_eval_many(pts):
                return [p_eval(z) for z in pts]
        best = None
        stall = 0
        for _ in range(max_iter):
            vals = p_eval_many(zs)
            if all(d == 0 for _v, d in vals) and all(v == 0 for v, _d in vals):
                raise DegenerateDegree("p and p' vanish identically")
            corr = []
            for i, (v, d) in enumerate(vals):
                if v == 0:
                    corr.append(mpmath.mpc(0))
                    continue
                if d == 0:
                    corr.append(mpmath.mpc(eps * 10 ** 10))
                    continue
                ratio = v / d
                s = mpmath.fsum(1 / (zs[i] - zs[j]) for j in range(degree) if j != i) if degree > 1 else 0
                denom = 1 - ratio * s
                corr.append(ratio / denom if denom != 0 else ratio)
            zs = [z - c for z, c in zip(zs, corr)]
            size = max(abs(c) / max(1, abs(z)) for z, c in zip(zs, corr))
            if size < eps:
                return zs
            if best is None or size < best / 2:
                best, stall = size, 0
            else:
                stall += 1
            if stall >= 25:
                vals = p_eval_many(zs)
                if all(abs(v) <= half * max(abs(d), eps) or abs(v) <= eps for v, d in vals):
                    return zs
        raise NoConvergence(f"Aberth iteration did not converge in {max_iter} steps")
