"""Command line front end.

Every command computes first and writes last: output goes to ``--out``
through a temporary file and a rename, or to stdout.  Numbers are emitted as
decimal strings at the requested digits, also inside JSON.

Exit codes: 0 success, 2 usage error, 3 computation error (the error class is
printed on stderr).
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
import tempfile

import click
import mpmath

from . import compare, double_scaling, genus1, orthopoly, phase_portrait
from .errors import KlabError
from .precision import PrecisionContext, parse_complex

QUAD_FUNCTIONS = {
    "1": lambda z: mpmath.mpc(1),
    "z": lambda z: z,
    "z2": lambda z: z * z,
    "cos": mpmath.cos,
    "lorentz": lambda z: 1 / (1 + z * z / 4),
}


class ComplexParam(click.ParamType):
    name = "complex"

    def convert(self, value, param, ctx):
        if isinstance(value, mpmath.mpc):
            return value
        try:
            with mpmath.workdps(200):
                parse_complex(value)
        except ValueError:
            self.fail(f"{value!r} is not a complex number such as 1, -2i or 0.5+1i", param, ctx)
        return value  # parsed again at the working precision


class IntList(click.ParamType):
    name = "int-list"

    def convert(self, value, param, ctx):
        if isinstance(value, list):
            return value
        try:
            out = [int(v) for v in value.split(",") if v.strip()]
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated list of integers", param, ctx)
        if not out or min(out) < 1:
            self.fail("degrees must be positive integers", param, ctx)
        return out


COMPLEX = ComplexParam()
INT_LIST = IntList()


def _num(x, digits):
    # converting at the default 15 digits would round the value first
    with mpmath.workdps(digits + 10):
        return mpmath.nstr(mpmath.mpf(x), digits)


def _cnum(z, digits):
    with mpmath.workdps(digits + 10):
        z = mpmath.mpc(z)
        return {"re": _num(z.real, digits), "im": _num(z.imag, digits)}


def _emit(out_path, text):
    if out_path is None:
        click.echo(text, nl=False)
        return
    directory = os.path.dirname(os.path.abspath(out_path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".klab-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


class Run:
    def __init__(self, digits, out):
        self.digits = digits
        self.out = out
        self.ctx = PrecisionContext(digits)

    def s(self, text):
        with self.ctx.working():
            return parse_complex(text)

    def mpf(self, text):
        with self.ctx.working():
            return mpmath.mpf(text)


def _run(body):
    # computation errors map to exit code 3; usage errors are click's (2)
    try:
        text = body()
    except KlabError as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        sys.exit(3)
    return text


@click.group()
@click.option("--digits", type=click.IntRange(min=30), default=120, envvar="KLAB_DIGITS", show_default=True,
              help="Trusted decimal digits (env KLAB_DIGITS).")
@click.option("--out", "out", type=click.Path(dir_okay=False), default=None, help="Output file; stdout if omitted.")
@click.pass_context
def main(ctx, digits, out):
    """Orthogonal polynomials with the weight exp(-n s z) on [-1, 1]."""
    ctx.obj = Run(digits, out)


def _finish(run, body):
    text = _run(body)
    _emit(run.out, text)


@main.command()
@click.option("--s", "s_text", type=COMPLEX, required=True)
@click.option("--n-max", type=click.IntRange(min=1), required=True)
@click.pass_obj
def recurrence(run, s_text, n_max):
    """Diagonal recurrence coefficients alpha_n, beta_n for n = 1..n_max."""

    def body():
        s = run.s(s_text)
        rows = []
        d = run.digits
        for e in orthopoly.diagonal_recurrence(s, range(1, n_max + 1), run.ctx):
            a, b = _cnum(e.alpha, d), _cnum(e.beta, d)
            rows.append([e.n, a["re"], a["im"], b["re"], b["im"]])
        return _csv(["n", "alpha_re", "alpha_im", "beta_re", "beta_im"], rows)

    _finish(run, body)


@main.command()
@click.option("--s", "s_text", type=COMPLEX, required=True)
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for the starting circle.")
@click.pass_obj
def zeros(run, s_text, n, seed):
    """Zeros of the diagonal polynomial p_n."""

    def body():
        roots = orthopoly.zeros(run.s(s_text), n, run.ctx, seed=seed)
        return _csv(["k", "re", "im"], [[k, _num(z.real, run.digits), _num(z.imag, run.digits)] for k, z in enumerate(roots)])

    _finish(run, body)


@main.command()
@click.pass_obj
def tc(run):
    """The critical value t_c where -i t_c is a breaking point."""

    def body():
        t = phase_portrait.solve_tc(run.ctx)
        return _num(t, run.digits) + "\n"

    _finish(run, body)


@main.command()
@click.option("--s", "s_text", type=COMPLEX, required=True)
@click.pass_obj
def classify(run, s_text):
    """Region of the s-plane containing s."""

    def body():
        c = phase_portrait.classify(run.s(s_text), run.ctx)
        re_h = c.re_h_cr
        return _json(
            {
                "s": _cnum(c.s, run.digits),
                "label": c.label.value,
                "re_h_cr": _num(re_h, run.digits) if mpmath.isfinite(re_h) else "inf",
            }
        )

    _finish(run, body)


@main.command("breaking-curve")
@click.option("--branch", type=click.Choice([b.value for b in phase_portrait.Branch]), required=True)
@click.option("--step", default="0.05", show_default=True, help="Arclength step.")
@click.pass_obj
def breaking_curve(run, branch, step):
    """Polyline along a breaking curve."""

    def body():
        curve = phase_portrait.trace_breaking_curve(branch, run.mpf(step), run.ctx)
        d = run.digits
        return _csv(["k", "re", "im"], [[k, _num(p.real, d), _num(p.imag, d)] for k, p in enumerate(curve.path.points)])

    _finish(run, body)


@main.command()
@click.option("--s", "s_text", type=COMPLEX, required=True)
@click.option("--step", default="0.01", show_default=True)
@click.pass_obj
def trajectories(run, s_text, step):
    """Critical graph of the quadratic differential, genus 0 or 1 by region."""

    def body():
        s = run.s(s_text)
        label = phase_portrait.classify(s, run.ctx).label
        data = None
        if label in (phase_portrait.RegionLabel.G1Minus, phase_portrait.RegionLabel.G1Plus):
            data = genus1.solve_endpoints(s, run.ctx)
        graph = phase_portrait.critical_graph(s, run.ctx, genus1_data=data, max_step=run.mpf(step))
        d = min(run.digits, 20)
        rows = []
        for t, tr in enumerate(graph):
            for k, p in enumerate(tr.points.points):
                rows.append([t, _num(tr.source.real, d), _num(tr.source.imag, d), tr.terminator, k, _num(p.real, d), _num(p.imag, d)])
        return _csv(["trajectory", "source_re", "source_im", "terminator", "k", "re", "im"], rows)

    _finish(run, body)


@main.command()
@click.option("--s", "s_text", type=COMPLEX, required=True)
@click.pass_obj
def endpoints(run, s_text):
    """Genus-1 endpoints, periods and constants."""

    def body():
        data = genus1.genus1_data(run.s(s_text), run.ctx)
        return _json(data.as_strings(run.digits))

    _finish(run, body)


COMPARE_HEADER = [
    "n", "regime",
    "alpha_re", "alpha_im", "beta_re", "beta_im",
    "alpha_hat_re", "alpha_hat_im", "beta_hat_re", "beta_hat_im",
    "alpha_abs_err", "beta_abs_err", "alpha_rel_err", "beta_rel_err",
]  # fmt: skip


def comparison_csv(rows, digits):
    out = []
    for r in rows:
        line = [r.n, r.regime]
        for z in (r.alpha, r.beta, r.alpha_hat, r.beta_hat):
            c = _cnum(z, digits)
            line += [c["re"], c["im"]]
        line += [_num(e, digits) if mpmath.isfinite(e) else "inf" for e in (r.alpha_abs_err, r.beta_abs_err, r.alpha_rel_err, r.beta_rel_err)]
        out.append(line)
    return _csv(COMPARE_HEADER, out)


@main.command("compare")
@click.option("--regime", type=click.Choice(compare.REGIMES), required=True)
@click.option("--n-list", type=INT_LIST, required=True)
@click.option("--s", "s_text", type=COMPLEX, help="Parameter for genus0 and genus1.")
@click.option("--s-star", type=COMPLEX, help="Breaking point for regular; default -i t_c.")
@click.option("--L1", "L1", type=COMPLEX, default="0.1i", show_default=True)
@click.option("--L2", "L2", default="-2", show_default=True)
@click.pass_obj
def compare_cmd(run, regime, n_list, s_text, s_star, L1, L2):
    """Exact coefficients against the large-n prediction of a regime."""
    if regime in ("genus0", "genus1") and s_text is None:
        raise click.UsageError(f"--s is required for --regime {regime}")
    try:
        if float(L2) >= 0:
            raise ValueError
    except ValueError:
        raise click.BadParameter("L2 must be a negative number", param_hint="--L2") from None

    def body():
        ctx = run.ctx
        if regime == "genus0":
            rows = compare.compare_genus0(run.s(s_text), n_list, ctx)
        elif regime == "genus1":
            rows = compare.compare_genus1(run.s(s_text), n_list, ctx)
        elif regime == "regular":
            if s_star is None:
                with ctx.working():
                    ss = mpmath.mpc(0, -phase_portrait.solve_tc(ctx))
            else:
                ss = run.s(s_star)
            rows = compare.compare_regular(ss, run.s(L1), n_list, ctx)
        else:
            rows = compare.compare_critical(run.mpf(L2), n_list, ctx)
        return comparison_csv(rows, run.digits)

    _finish(run, body)


@main.command()
@click.option("--omega", required=True, help="Frequency in exp(i omega z).")
@click.option("--n", type=click.IntRange(min=1), required=True)
@click.option("--f", "f_id", type=click.Choice(sorted(QUAD_FUNCTIONS)), required=True)
@click.pass_obj
def quad(run, omega, n, f_id):
    """Gaussian rule for int_{-1}^{1} f(z) exp(i omega z) dz with n nodes."""
    try:
        float(omega)
    except ValueError:
        raise click.BadParameter("omega must be a real number", param_hint="--omega") from None

    def body():
        ctx = run.ctx
        with ctx.working():
            w = mpmath.mpf(omega)
            # exp(i omega z) = exp(-N s z) with N = n, s = -i omega / n
            s = mpmath.mpc(0, -w) / n
            rule = orthopoly.gauss_rule(s, n, n, ctx)
            f = QUAD_FUNCTIONS[f_id]
            value = orthopoly.oscillatory_integral(rule, f)
            reference = mpmath.quad(lambda x: f(x) * mpmath.expj(w * x), mpmath.linspace(-1, 1, 9))
            return _json(
                {
                    "omega": _num(w, run.digits),
                    "n": n,
                    "f": f_id,
                    "value": _cnum(value, run.digits),
                    "reference": _cnum(reference, run.digits),
                    "abs_err": _num(abs(value - reference), 5),
                }
            )

    _finish(run, body)


@main.command()
@click.option("--x-left", default=25.0, show_default=True, type=float)
@click.option("--x-right", default=25.0, show_default=True, type=float)
@click.option("--nodes", default=4000, show_default=True, type=click.IntRange(min=100))
@click.pass_obj
def pii(run, x_left, x_right, nodes):
    """Painleve II boundary value solution as x, q, q', D."""
    if x_left < 8 or x_right < 8:
        raise click.BadParameter("half-widths must be at least 8")

    def body():
        sol = double_scaling.solve_pii_hm(x_left, x_right, nodes)
        return _csv(["x", "q", "qprime", "D"], [[repr(float(v)) for v in row] for row in sol.rows()])

    _finish(run, body)


if __name__ == "__main__":
    main()
