"""Command-line front end: ``hornbernstein <command> ...``.

Exit codes: 0 success or certified, 1 certification failure or refutation,
2 usage or domain error.
"""

from __future__ import annotations

import csv
import functools
import io
import sys
from fractions import Fraction

import click
import mpmath

from . import certify as C
from . import functions as F
from .exactcore import format_rational, parse_rational
from .moments import a_sequence, moment_table, t_moments
from .precision import DomainError, EvalRequest, PrecisionError, PrecisionReal, default_digits
from .serialize import REFERENCE_VALUES, OutputEnvelope, to_jsonable

EXIT_FAIL = 1
EXIT_USAGE = 2


class RationalType(click.ParamType):
    """Exact rational from "p/q", a decimal or an integer."""

    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return parse_rational(str(value))
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a rational number", param, ctx)


RATIONAL = RationalType()


def _guard(fn):
    """Map library errors to exit codes instead of tracebacks."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (DomainError, ValueError, ZeroDivisionError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_USAGE)
        except (PrecisionError, C.CertificationError) as exc:
            click.echo(f"failed: {exc}", err=True)
            sys.exit(EXIT_FAIL)

    return wrapper


def _emit_json(command: str, parameters: dict, results, provenance=None) -> None:
    click.echo(OutputEnvelope(command, to_jsonable(parameters), results, provenance or {}).to_json(), nl=False)


def _decimal(x: Fraction, digits: int) -> str:
    with mpmath.workdps(digits + 10):
        return mpmath.nstr(mpmath.mpf(x.numerator) / x.denominator, digits)


def _real_text(x: PrecisionReal, digits: int) -> str:
    return f"{mpmath.nstr(x.value, digits + 2, strip_zeros=False)}  (abs_error <= {x.error_string()})"


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Exact moments, special functions and positivity certificates for h_alpha."""


# -- moments ---------------------------------------------------------------------


@main.command()
@click.option("--n", "n_max", type=click.IntRange(min=0), required=True, help="Largest index.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "table"]), default="table")
@click.option("--decimal", "decimal", type=click.IntRange(min=1), default=None,
              help="Show rounded decimals with this many digits instead of exact p/q.")
@_guard
def moments(n_max, fmt, decimal):
    """Table of rho_n, s_n, t_n and a_n for n = 0..N."""
    table = moment_table(n_max)

    def show(x: Fraction) -> str:
        return _decimal(x, decimal) if decimal else format_rational(x)

    names = ("n", "rho", "s", "t", "a")
    rows = [[str(n)] + [show(v) for v in vals] for n, *vals in table.rows()]
    if fmt == "json":
        results = [dict(zip(names, [int(r[0])] + r[1:])) for r in rows]
        params = {"n": n_max, "decimal": decimal}
        _emit_json("moments", params, results)
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(names)
        writer.writerows(rows)
        click.echo(buf.getvalue(), nl=False)
    else:
        widths = [max(len(names[j]), *(len(r[j]) for r in rows)) for j in range(len(names))]
        click.echo("  ".join(h.rjust(w) for h, w in zip(names, widths)))
        for r in rows:
            click.echo("  ".join(c.rjust(w) for c, w in zip(r, widths)))


# -- certify ---------------------------------------------------------------------


@main.command("certify")
@click.option("--c", "c", type=RATIONAL, required=True, help="Constant c in t_n > c/(n+1).")
@click.option("--sigma", type=RATIONAL, default="0.985", show_default=True)
@click.option("--from", "n_from", type=click.IntRange(min=0), required=True)
@click.option("--to", "n_to", type=click.IntRange(min=0), required=True)
@click.option("--json", "as_json", is_flag=True)
@_guard
def certify_cmd(c, sigma, n_from, n_to, as_json):
    """Check t_n > c/(n+1): exactly on [from, to] and by the tail bound beyond."""
    if n_from > n_to:
        raise click.UsageError("--from must not exceed --to")
    tail = C.tail_threshold(c, sigma)
    rng = C.verify_moment_bound(c, n_from, n_to)
    ok = tail.valid and rng.all_pass
    if as_json:
        params = {"c": c, "sigma": sigma, "from": n_from, "to": n_to}
        _emit_json("certify", params, {"tail": tail, "range": rng, "certified": ok})
    else:
        click.echo(f"tau0(1 - sigma) = {tail.tau0_value}")
        if tail.valid:
            click.echo(f"tail bound: t_n > {c}/(n+1) for all n >= {tail.n_threshold}")
        else:
            click.echo(f"tail bound: invalid, tau0(1 - sigma) <= {c}")
        if rng.all_pass:
            click.echo(f"range {n_from}..{n_to}: all pass")
        else:
            click.echo(f"range {n_from}..{n_to}: failures at n = {', '.join(map(str, rng.failures))}")
        click.echo("certified" if ok else "NOT certified")
    sys.exit(0 if ok else EXIT_FAIL)


# -- beta* and alpha* ------------------------------------------------------------------


@main.command("beta-star")
@click.option("--N", "N", type=click.IntRange(min=5), default=20, show_default=True)
@click.option("--digits", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--fixed-N", "fixed", is_flag=True, help="Do not raise N when the bisection stalls.")
@click.option("--max-N", "max_N", type=click.IntRange(min=5), default=200, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@_guard
def beta_star(N, digits, fixed, max_N, as_json):
    """Certified bracket for beta*."""
    b = C.bracket_beta_star(N, digits, EvalRequest(max(digits, 10)), auto_escalate=not fixed, max_N=max_N)
    provenance = {"beta_star_published": REFERENCE_VALUES["beta_star"]}
    if as_json:
        params = {"N": N, "digits": digits, "auto_escalate": not fixed}
        _emit_json("beta-star", params, b, provenance)
    else:
        click.echo(f"lower (P_N > 0 on (0, inf)):   {_decimal(b.lower, digits + 3)}  = {format_rational(b.lower)}")
        click.echo(f"upper (refuted, beta* < alpha): {_decimal(b.upper, digits + 3)}  = {format_rational(b.upper)}")
        click.echo(f"width: {_decimal(b.width, 3)}   N used: {b.N_used}")
        click.echo(f"published value: {REFERENCE_VALUES['beta_star']}")
        if b.n_insufficient:
            click.echo("N insufficient: no certificate at the last midpoint", err=True)
    sys.exit(EXIT_FAIL if b.n_insufficient else 0)


@main.command("alpha-star")
@click.option("--digits", type=click.IntRange(min=1, max=30), default=6, show_default=True)
@click.option("--s-max", "s_max", type=click.FloatRange(min=1), default=200, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@_guard
def alpha_star(digits, s_max, as_json):
    """Non-certified estimate of alpha* from the sign of min phi_alpha."""
    est = C.estimate_alpha_star(EvalRequest(digits), s_max=s_max)
    provenance = {"alpha_star_published": REFERENCE_VALUES["alpha_star"], "certified": False}
    if as_json:
        _emit_json("alpha-star", {"digits": digits, "s_max": s_max}, est, provenance)
    else:
        click.echo(f"alpha* ~ {_real_text(est, digits)}")
        click.echo("estimate only: the inner minimization is heuristic, not certified")
        click.echo(f"published value: {REFERENCE_VALUES['alpha_star']}")


# -- eval ------------------------------------------------------------------------

# name -> (callable, argument names in call order)
_FUNCTIONS = {
    "h": (F.eval_h, ("alpha", "x")),
    "rho": (F.eval_rho, ("x",)),
    "g": (F.eval_g, ("x",)),
    "tau0": (F.eval_tau0, ("t",)),
    "phi": (F.eval_phi_series, ("alpha", "s")),
    "G": (F.eval_G, ("alpha", "x")),
    "F": (F.eval_F, ("alpha", "t")),
    "M": (F.eval_M, ("x",)),
    "d": (F.eval_d, ("s",)),
}


@main.command("eval")
@click.option("--fn", "fn", type=click.Choice(list(_FUNCTIONS)), required=True)
@click.option("--x", type=RATIONAL)
@click.option("--t", type=RATIONAL)
@click.option("--s", type=RATIONAL)
@click.option("--alpha", type=RATIONAL)
@click.option("--digits", type=click.IntRange(min=1, max=1000), default=None,
              help="Requested digits (default HB_PRECISION_DEFAULT or 20).")
@click.option("--json", "as_json", is_flag=True)
@_guard
def eval_cmd(fn, x, t, s, alpha, digits, as_json):
    """Evaluate one function with a rigorous or estimated error bound."""
    digits = digits or default_digits()
    func, argnames = _FUNCTIONS[fn]
    given = {"x": x, "t": t, "s": s, "alpha": alpha}
    missing = [f"--{a}" for a in argnames if given[a] is None]
    if missing:
        raise click.UsageError(f"--fn {fn} needs {', '.join(missing)}")
    req = EvalRequest(digits)
    value = func(*(given[a] for a in argnames), req)
    if value.abs_error > req.tolerance:
        raise PrecisionError(f"abs_error {value.error_string()} exceeds 1e-{digits}")
    if as_json:
        params = {a: given[a] for a in argnames}
        params.update(fn=fn, digits=digits)
        _emit_json("eval", params, value)
    else:
        click.echo(f"{fn}({', '.join(f'{a}={given[a]}' for a in argnames)}) = {_real_text(value, digits)}")


# -- plot data --------------------------------------------------------------------


@main.command("plot-data")
@click.option("--fn", "fn", type=click.Choice(["tau0", "M", "PN"]), required=True)
@click.option("--from", "x_from", type=RATIONAL, required=True)
@click.option("--to", "x_to", type=RATIONAL, required=True)
@click.option("--points", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--file", "path", type=click.Path(dir_okay=False, allow_dash=True), default="-",
              help="Output CSV path ('-' for stdout).")
@click.option("--N", "N", type=click.IntRange(min=1), default=20, show_default=True, help="Degree for PN.")
@click.option("--alpha", type=RATIONAL, default="2.18859", show_default=True, help="alpha for PN.")
@click.option("--digits", type=click.IntRange(min=1, max=100), default=15, show_default=True)
@_guard
def plot_data(fn, x_from, x_to, points, path, N, alpha, digits):
    """CSV samples "x,value,abs_error" on an evenly spaced grid."""
    if x_to < x_from:
        raise click.UsageError("--to must not be below --from")
    if x_from == x_to:
        points = 1
    xs = [x_from] if points == 1 else [x_from + (x_to - x_from) * i / (points - 1) for i in range(points)]
    req = EvalRequest(digits)
    if fn == "PN":
        P = C.build_PN(N, alpha)

        def sample(x):
            return PrecisionReal.exact(P(x), req.working_digits)
    else:
        func = F.eval_tau0 if fn == "tau0" else F.eval_M

        def sample(x):
            return func(x, req)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "value", "abs_error"])
    for x in xs:
        v = sample(x)
        writer.writerow([_decimal(x, digits), mpmath.nstr(v.value, digits, strip_zeros=False), v.error_string()])
    if path == "-":
        click.echo(buf.getvalue(), nl=False)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        click.echo(f"error: cannot write {path}: {exc.strerror}", err=True)
        sys.exit(EXIT_USAGE)
    click.echo(f"wrote {len(xs)} rows to {path}")


# -- hausdorff -------------------------------------------------------------------------


@main.command()
@click.option("--seq", "seq", type=click.Choice(["t", "a"]), required=True)
@click.option("--K", "K", type=click.IntRange(min=0), required=True)
@click.option("--json", "as_json", is_flag=True)
@_guard
def hausdorff(seq, K, as_json):
    """Signs of all (-1)^k Delta^k mu_n with n + k <= K."""
    values = t_moments(K) if seq == "t" else a_sequence(K)
    report = C.hausdorff_check(values, K)
    label = (
        "experimental evidence, not a proof"
        if seq == "a"
        else "moments of a positive density; nonnegativity is expected"
    )
    if as_json:
        _emit_json("hausdorff", {"seq": seq, "K": K}, {"report": report, "status": label})
    else:
        n, k = report.location
        click.echo(f"sequence {seq}, K = {K}")
        click.echo(f"minimum (-1)^k Delta^k mu_n = {format_rational(report.min_value)}  at n={n}, k={k}")
        click.echo(f"  ~ {_decimal(report.min_value, 10)}")
        click.echo(f"all nonnegative: {'yes' if report.all_nonneg else 'no'}")
        click.echo(f"({label})")


if __name__ == "__main__":  # pragma: no cover
    main()
