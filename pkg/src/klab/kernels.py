"""Hot loops behind a common interface, compiled when available.

Two backends implement the same three functions on mpmath values:

* ``moments_forward`` - forward integration-by-parts recurrence for moments;
* ``chebyshev`` - mixed-moment table giving recurrence coefficients and norms;
* ``three_term_many`` - monic polynomial, derivative and previous polynomial
  at many points.

The compiled backend (``klab._kernel``, Cython over MPFR) is chosen at import;
setting ``KLAB_KERNEL=python`` forces the mpmath implementation.  Both give
results that agree to the working precision, not bit for bit, because MPFR
and mpmath round intermediate products differently; a run is reproducible
for a fixed backend.
"""

from __future__ import annotations

import os

import mpmath
from mpmath import mp


def _bits_for(digits: int) -> int:
    return int(digits * 3.3219280948873626) + 8


class PythonBackend:
    name = "python"

    def moments_forward(self, inv_c, plus, minus, m0, kmax, digits):
        with mp.workdps(digits):
            out = [mpmath.mpc(m0)]
            m = out[0]
            for k in range(1, kmax + 1):
                m = k * inv_c * m + (plus if k % 2 == 0 else -plus) - minus
                out.append(m)
            return out

    def chebyshev(self, moments, n_max, digits, loss_digits):
        with mp.workdps(digits):
            L = 2 * n_max + 2
            if len(moments) < L:
                raise ValueError("need moments m_0..m_{2 n_max + 1}")
            loss = mpmath.mpf(10) ** (-loss_digits)
            prev = [mpmath.mpc(m) for m in moments[:L]]
            prev2 = [mpmath.mpc(0)] * L
            if prev[0] == 0:
                return [], [], [], 0
            alpha = [prev[1] / prev[0]]
            beta = [prev[0]]
            norms = [prev[0]]
            q_prev = alpha[0]
            for k in range(1, n_max + 1):
                a, b = alpha[k - 1], beta[k - 1]
                cur = [mpmath.mpc(0)] * L
                scale = 0
                for l in range(k, L - k):
                    t = a * prev[l]
                    v = prev[l + 1] - t
                    if k >= 2:
                        u = b * prev2[l]
                        v -= u
                    else:
                        u = 0
                    if l == k:
                        scale = max(abs(prev[l + 1]), abs(t), abs(u))
                    cur[l] = v
                if cur[k] == 0 or abs(cur[k]) < loss * scale:
                    return alpha, beta, norms, k
                q = cur[k + 1] / cur[k]
                alpha.append(q - q_prev)
                q_prev = q
                beta.append(cur[k] / prev[k - 1])
                norms.append(cur[k])
                prev2, prev = prev, cur
            return alpha, beta, norms, -1

    def three_term_many(self, alpha, beta, n, zs, digits):
        with mp.workdps(digits):
            out = []
            for z in zs:
                p0, p1 = mpmath.mpc(0), mpmath.mpc(1)
                d0, d1 = mpmath.mpc(0), mpmath.mpc(0)
                for k in range(n):
                    w = z - alpha[k]
                    d0, d1 = d1, p1 + w * d1 - beta[k] * d0
                    p0, p1 = p1, w * p1 - beta[k] * p0
                out.append((p1, d1, p0))
            return out


def _pair(x):
    sign, man, exp, _bc = mpmath.mpf(x)._mpf_
    if not man:
        return (0, 0)
    return (-int(man) if sign else int(man), int(exp))


def _cpair(z):
    z = mpmath.mpc(z)
    return (_pair(z.real), _pair(z.imag))


def _unpair(c):
    (mr, er), (mi, ei) = c
    return mpmath.mpc(mpmath.mpf((mr, er)), mpmath.mpf((mi, ei)))


class CompiledBackend:
    name = "compiled"

    def __init__(self, module):
        self._k = module

    def moments_forward(self, inv_c, plus, minus, m0, kmax, digits):
        with mp.workdps(digits):
            raw = self._k.moments_forward(_cpair(inv_c), _cpair(plus), _cpair(minus), _cpair(m0), kmax, _bits_for(digits))
            return [_unpair(c) for c in raw]

    def chebyshev(self, moments, n_max, digits, loss_digits):
        with mp.workdps(digits):
            L = 2 * n_max + 2
            if len(moments) < L:
                raise ValueError("need moments m_0..m_{2 n_max + 1}")
            raw = [_cpair(m) for m in moments[:L]]
            al, be, hh, deg = self._k.chebyshev(raw, n_max, _bits_for(digits), int(loss_digits * 3.3219280948873626))
            return [_unpair(c) for c in al], [_unpair(c) for c in be], [_unpair(c) for c in hh], deg

    def three_term_many(self, alpha, beta, n, zs, digits):
        with mp.workdps(digits):
            raw = self._k.three_term_many(
                [_cpair(a) for a in alpha[:n]], [_cpair(b) for b in beta[:n]], n, [_cpair(z) for z in zs], _bits_for(digits)
            )
            return [(_unpair(p), _unpair(d), _unpair(q)) for p, d, q in raw]


def _select():
    if os.environ.get("KLAB_KERNEL", "").lower() == "python":
        return PythonBackend()
    try:
        from . import _kernel
    except ImportError:
        return PythonBackend()
    return CompiledBackend(_kernel)


python_backend = PythonBackend()
backend = _select()


def compiled_backend():
    """The compiled backend, or ``None`` if the extension is not built."""
    try:
        from . import _kernel
    except ImportError:
        return None
    return CompiledBackend(_kernel)
