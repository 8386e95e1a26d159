"""Time the compiled and pure-Python kernels on the same inputs.

    python3 benchmarks/bench_kernels.py --n 60 --digits 200 --repeat 3
"""

import argparse
import time

import mpmath

from klab import kernels, orthopoly
from klab.precision import PrecisionContext, parse_complex


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def max_rel_diff(a, b):
    return max(abs(x - y) / max(abs(y), mpmath.mpf(10) ** -300) for x, y in zip(a, b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--s", default="-2i")
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--digits", type=int, default=200)
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    compiled = kernels.compiled_backend()
    if compiled is None:
        print("compiled extension not built; nothing to compare")
        return
    python = kernels.python_backend
    ctx = PrecisionContext(args.digits)
    with ctx.working():
        w = orthopoly.Weight(parse_complex(args.s), args.n)
        table = orthopoly.compute_moments(w, 2 * args.n + 1, ctx)
        moments = list(table.m)
        inv_c = 1 / w.c
        plus, minus = mpmath.exp(w.c) * inv_c, mpmath.exp(-w.c) * inv_c
        zs = [mpmath.expjpi(mpmath.mpf(k) / args.points) * mpmath.mpf("0.9") for k in range(args.points)]
    d = ctx.work_digits
    loss = ctx.digits // 3

    cases = [
        ("moments_forward", lambda b: b.moments_forward(inv_c, plus, minus, plus - minus, 2 * args.n + 1, d)),
        ("chebyshev", lambda b: b.chebyshev(moments, args.n, d, loss)[:3]),
    ]
    with ctx.working():
        al, be, _h, _deg = python.chebyshev(moments, args.n, d, loss)
    cases.append(("three_term_many", lambda b: b.three_term_many(al, be, len(al) - 1, zs, d)))

    print(f"s={args.s} n={args.n} digits={args.digits} best of {args.repeat}")
    print(f"{'kernel':<18}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}{'max rel diff':>15}")
    for name, call in cases:
        tp, outp = best_of(lambda: call(python), args.repeat)
        tc, outc = best_of(lambda: call(compiled), args.repeat)
        with ctx.working():
            flat_p = _flatten(outp)
            flat_c = _flatten(outc)
            diff = max_rel_diff(flat_c, flat_p)
        print(f"{name:<18}{tp:>12.4f}{tc:>14.4f}{tp / tc:>10.1f}{mpmath.nstr(diff, 3):>15}")


def _flatten(x):
    if isinstance(x, (list, tuple)):
        out = []
        for v in x:
            out.extend(_flatten(v))
        return out
    return [mpmath.mpc(x)]


if __name__ == "__main__":
    main()
