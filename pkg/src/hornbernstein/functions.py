"""Arbitrary-precision evaluation of h_alpha, rho, g, tau0, phi_alpha, G_alpha,
F_alpha, M and d, with error bounds, plus quadrature oracles.

Closed forms are enclosed with mpmath interval arithmetic; the precision is
doubled until the enclosure is narrow enough, so their error bounds are
rigorous. Series carry explicit tail bounds. Quadratures use tanh-sinh and
report ten times the difference between the last two refinement levels.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction
from math import factorial
from typing import Callable, Optional

import mpmath
from mpmath import iv, mpf

from .exactcore import as_rational
from .moments import G_coefficient, t_moments
from .precision import DomainError, EvalRequest, PrecisionError, PrecisionReal

__all__ = [
    "eval_h",
    "eval_rho",
    "eval_g",
    "eval_tau0",
    "tau0_min",
    "eval_phi_series",
    "eval_phi_integral",
    "eval_G",
    "eval_F",
    "eval_F_scaled",
    "eval_M",
    "eval_d",
    "moment_oracle",
    "check_bernstein_representation",
    "check_laplace_representation",
    "g_stieltjes",
    "rho_laplace",
    "rho_stieltjes2",
    "integral_of_d",
    "PhiSeries",
]

_DEFAULT = EvalRequest()
QUAD_SAFETY = 10
_MAX_DOUBLINGS = 8


# -- interval enclosures ------------------------------------------------------


@contextmanager
def _iv_dps(dps: int):
    saved = iv.prec
    iv.dps = dps
    try:
        yield
    finally:
        iv.prec = saved


def _iv(x: Fraction):
    return iv.mpf(x.numerator) / iv.mpf(x.denominator)


def _bounds(interval) -> tuple[mpf, mpf]:
    lo, hi = interval._mpi_
    return mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi)


def _enclose(build: Callable[[], object], req: EvalRequest, extra_digits: int = 0) -> PrecisionReal:
    """Evaluate ``build`` in interval arithmetic until the radius meets ``req``."""
    target = mpf(10) ** (-(req.precision_digits + 2))
    dps = req.working_digits + extra_digits
    for _ in range(_MAX_DOUBLINGS):
        with _iv_dps(dps):
            enclosure = build()
        lo, hi = _bounds(enclosure)
        if mpmath.isfinite(lo) and mpmath.isfinite(hi):
            with mpmath.workdps(dps + 10):
                mid = (lo + hi) / 2
                rad = (hi - lo) / 2
                # mid is exact at this precision; rad rounded up by a hair
                rad = rad * (1 + mpf(10) ** (-dps)) + abs(mid) * mpf(10) ** (-(dps + 5))
            if rad <= target:
                # keep enough digits that rounding stays below the absolute target
                wd = req.working_digits + max(0, int(mpmath.mag(mid) * 0.30103) + 1)
                with mpmath.workdps(wd):
                    value = +mid
                    rad += abs(value - mid)
                return PrecisionReal(value, rad, wd)
        dps *= 2
    raise PrecisionError(f"interval enclosure did not reach 1e-{req.precision_digits} (last precision {dps // 2} digits)")


def _positive(x, name: str) -> Fraction:
    q = as_rational(x)
    if q <= 0:
        raise DomainError(f"{name} must be > 0, got {x}")
    return q


# -- closed forms ---------------------------------------------------------------


def eval_h(alpha, x, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """h_alpha(x) = exp(alpha x log(1 + 1/x)) for x > 0."""
    a = as_rational(alpha)
    x = _positive(x, "x")
    # |alpha x log(1+1/x)| <= |alpha|, so exp may add up to |alpha|/ln 10 digits
    extra = int(abs(a) / 2) + 1

    def build():
        return iv.exp(_iv(a) * _iv(x) * iv.log(_iv(1 + 1 / x)))

    return _enclose(build, req, extra)


def eval_rho(x, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """rho(x) = log(1 + 1/x) - 1/(x + 1)."""
    x = _positive(x, "x")

    def build():
        return iv.log(_iv(1 + 1 / x)) - _iv(1 / (x + 1))

    return _enclose(build, req)


def eval_g(x, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """g(x) = 1 / (x (x+1) [(x+1) log(1 + 1/x) - 1]) = -rho'(x)/rho(x)."""
    x = _positive(x, "x")

    def build():
        inner = _iv(x + 1) * iv.log(_iv(1 + 1 / x)) - 1
        return 1 / (_iv(x * (x + 1)) * inner)

    return _enclose(build, req)


def _tau0_interval(t, one_minus_t, log_ratio):
    # tau0 = 1 / (t [(1-t) L - 1]^2 + pi^2 t (1-t)^2),  L = log((1-t)/t)
    a = one_minus_t * log_ratio - 1
    return 1 / (t * a**2 + iv.pi**2 * t * one_minus_t**2)


def eval_tau0(t, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """The probability density tau0 on (0, 1)."""
    t = as_rational(t)
    if not 0 < t < 1:
        raise DomainError(f"tau0 needs 0 < t < 1, got {t}")

    def build():
        return _tau0_interval(_iv(t), _iv(1 - t), iv.log(_iv((1 - t) / t)))

    return _enclose(build, req)


def _tau0_D_prime(t, one_minus_t, log_ratio):
    """Derivative of the denominator D of tau0 (so tau0' = -D'/D^2)."""
    a = one_minus_t * log_ratio - 1
    da = -log_ratio - 1 / t
    return a**2 + 2 * t * a * da + iv.pi**2 * (one_minus_t**2 - 2 * t * one_minus_t)


def _D_prime_sign(t: Fraction) -> int:
    dps = 30
    for _ in range(_MAX_DOUBLINGS):
        with _iv_dps(dps):
            lo, hi = _bounds(_tau0_D_prime(_iv(t), _iv(1 - t), iv.log(_iv((1 - t) / t))))
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        dps *= 2
    return 0


def tau0_min(req: EvalRequest = _DEFAULT) -> tuple[PrecisionReal, PrecisionReal]:
    """Location and value of the interior minimum of tau0.

    Bisection on the sign of D' (tau0 = 1/D), which is positive left of the
    minimum and negative right of it.
    """
    lo, hi = Fraction(3, 10), Fraction(9, 10)
    if not (_D_prime_sign(lo) > 0 > _D_prime_sign(hi)):
        raise PrecisionError("tau0_min: could not bracket the minimum")
    width = Fraction(1, 10 ** (req.precision_digits + 2))
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = _D_prime_sign(mid)
        if s == 0:
            lo = hi = mid
            break
        if s > 0:
            lo = mid
        else:
            hi = mid
    center = (lo + hi) / 2
    half = (hi - lo) / 2
    t_star = PrecisionReal.exact(center, req.working_digits)
    t_star = PrecisionReal(t_star.value, t_star.abs_error + mpf(half.numerator) / half.denominator, req.working_digits)

    value = eval_tau0(center, req)
    # mean value bound: |tau0(center) - tau0(t*)| <= half * max |tau0'| over [lo, hi]
    with _iv_dps(req.working_digits):
        T = iv.mpf([_bounds(_iv(lo))[0], _bounds(_iv(hi))[1]])
        U = 1 - T
        L = iv.log(U / T)
        dprime = _tau0_D_prime(T, U, L)
        D = T * (U * L - 1) ** 2 + iv.pi**2 * T * U**2
        slope = dprime / D**2
        slope_lo, slope_hi = _bounds(slope)
    with mpmath.workdps(req.working_digits):
        slope_max = max(abs(slope_lo), abs(slope_hi))
        m = PrecisionReal(value.value, value.abs_error + slope_max * mpf(half.numerator) / half.denominator, req.working_digits)
    return t_star, m


def eval_d(s, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """d(s) = tau0(1 - e^{-s}) e^{-s}, the image of tau0 under t = 1 - e^{-s}."""
    s = _positive(s, "s")

    def build():
        S = _iv(s)
        e = iv.exp(-S)
        one_minus_e = 1 - e
        # log(e / (1 - e)) = -s - log(1 - e)
        return _tau0_interval(one_minus_e, e, -S - iv.log(one_minus_e)) * e

    # 1 - e^{-s} cancels for small s
    extra = max(0, int(-math.log10(float(s)))) if s < 1 else 0
    return _enclose(build, req, extra)


# -- quadrature ---------------------------------------------------------------


def _quad(f, points, req: EvalRequest, dps: Optional[int] = None, extra_error=0) -> PrecisionReal:
    dps = dps or req.working_digits
    levels = [req.quadrature_level] if req.quadrature_level else [None, 10, 12]
    tol = req.tolerance
    best = None
    for level in levels:
        with mpmath.workdps(dps):
            kwargs = {"error": True}
            if level is not None:
                kwargs["maxdegree"] = level
            value, err = mpmath.quad(f, points, **kwargs)
            err = QUAD_SAFETY * err + abs(value) * mpf(10) ** (-(dps - 5)) + extra_error
        best = PrecisionReal(value, err, dps)
        if err <= tol:
            return best
    if req.quadrature_level:
        return best
    raise PrecisionError(f"quadrature error estimate {mpmath.nstr(best.abs_error, 3)} exceeds 1e-{req.precision_digits}")


def _tau0_weighted(h: Callable, h_bound, req: EvalRequest) -> PrecisionReal:
    """int_0^1 tau0(t) h(t, 1 - t) dt.

    tau0(t) ~ 1/(t log^2 t) at 0 defeats plain tanh-sinh (the mass below
    1e-300 is still ~1e-3).  With t = exp(-e^w) the integrand decays like
    e^{-|w|} at both ends of the real line, and the cut at |w| = W costs at
    most 3 sup|h| e^{-W}.
    """
    dps = req.working_digits
    with mpmath.workdps(dps):
        W = (dps + 5) * mpmath.ln10
        pieces = max(8, int(2 * W / 8))

        def integrand(w):
            ew = mpmath.exp(w)
            t = mpmath.exp(-ew)
            u = -mpmath.expm1(-ew)
            L = mpmath.log(u) + ew
            return ew / ((u * L - 1) ** 2 + mpmath.pi**2 * u**2) * h(t, u)

        truncation = 3 * mpf(h_bound) * mpmath.exp(-W)
        return _quad(integrand, mpmath.linspace(-W, W, pieces + 1), req, dps, truncation)


def moment_oracle(n: int, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """t_n = int_0^1 s^n tau0(1 - s) ds by quadrature."""
    if n < 0:
        raise DomainError(f"moment index must be >= 0, got {n}")
    return _tau0_weighted(lambda t, u: u**n, 1, req)


def tau0_moment_oracle(n: int, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """s_n = int_0^1 t^n tau0(t) dt by quadrature."""
    if n < 0:
        raise DomainError(f"moment index must be >= 0, got {n}")
    return _tau0_weighted(lambda t, u: t**n, 1, req)


def g_stieltjes(x, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """g(x) from its Stieltjes form 1/(x+1) + int_0^1 tau0(t)/(x+t) dt."""
    x = _positive(x, "x")
    with mpmath.workdps(req.working_digits):
        X = mpf(x.numerator) / x.denominator
    integral = _tau0_weighted(lambda t, u: 1 / (X + t), 1 / X, req)
    return integral + PrecisionReal.exact(1 / (x + 1), req.working_digits)


def rho_laplace(x, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """rho(x) = int_0^inf e^{-tx} ((1 - e^{-t})/t - e^{-t}) dt."""
    x = _positive(x, "x")
    with mpmath.workdps(req.working_digits):
        X = mpf(x.numerator) / x.denominator

        def f(t):
            if t == 0:
                return mpf(0)
            return mpmath.exp(-t * X) * (-mpmath.expm1(-t) / t - mpmath.exp(-t))

    return _quad(f, [0, 1, mpmath.inf], req)


def rho_stieltjes2(x, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """rho(x) = int_0^1 t / (x + t)^2 dt."""
    x = _positive(x, "x")
    with mpmath.workdps(req.working_digits):
        X = mpf(x.numerator) / x.denominator
    return _quad(lambda t: t / (X + t) ** 2, [0, 1], req)


def integral_of_d(req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """int_0^inf d(s) ds, integrating d directly (it should equal 1)."""
    dps = req.working_digits
    with mpmath.workdps(dps):
        W = (dps + 5) * mpmath.ln10

        def d_num(s):
            e = mpmath.exp(-s)
            a = -mpmath.expm1(-s)  # tau0 argument
            L = -s - mpmath.log(a)
            return e / (a * (e * L - 1) ** 2 + mpmath.pi**2 * a * e**2)

        def near_zero(w):  # s = exp(-e^w) covers (0, 1)
            ew = mpmath.exp(w)
            s = mpmath.exp(-ew)
            return d_num(s) * s * ew

        head = _quad(near_zero, mpmath.linspace(-W, W, max(8, int(2 * W / 8)) + 1), req, dps,
                     3 * mpmath.exp(-W))
        tail = _quad(d_num, [1, 10, mpmath.inf], req, dps)
    return head + tail


# -- phi_alpha ------------------------------------------------------------------


class PhiSeries:
    """phi_alpha(s) = e^alpha sum_n (-1)^n p_{n+1}(alpha) s^n / n! at fixed alpha.

    The values p_n(alpha) are generated numerically from their recursion and
    cached, so repeated evaluations at many s are cheap. The tail bound uses
    |p_n(alpha)| <= (|alpha|)_n / n! (rising factorial), which dominates the
    recursion because its weights (k+1)/(k+2) are below 1.
    """

    def __init__(self, alpha, dps: int):
        self.alpha = as_rational(alpha)
        self.dps = dps
        with mpmath.workdps(dps):
            self._a = mpf(self.alpha.numerator) / self.alpha.denominator
            self._abs_a = abs(self._a)
            self._p = [mpf(1)]
            self._w: list[mpf] = []
            self._maj = [mpf(1)]
            self.exp_alpha = mpmath.exp(self._a)

    def p(self, n: int) -> mpf:
        with mpmath.workdps(self.dps):
            while len(self._p) <= n:
                m = len(self._p) - 1  # compute p_{m+1}
                while len(self._w) <= m:
                    k = len(self._w)
                    self._w.append(mpf(k + 1) / (k + 2))
                acc = mpmath.fsum(self._w[k] * self._p[m - k] for k in range(m + 1))
                self._p.append(self._a / (m + 1) * acc)
        return self._p[n]

    def _majorant(self, m: int) -> mpf:
        # (|a|)_m / m!, built up term by term
        while len(self._maj) <= m:
            k = len(self._maj)
            self._maj.append(self._maj[-1] * (self._abs_a + k - 1) / k)
        return self._maj[m]

    def _sum(self, s: mpf, shift: int, tol: mpf, max_terms: Optional[int]):
        """sum_n (-1)^n p_{n+shift} s^n/n!; returns (value, tail+roundoff bound, terms)."""
        cap = max_terms or 100000
        total = mpf(0)
        abs_total = mpf(0)
        power = mpf(1)  # s^n / n!
        n = 0
        while True:
            term = self.p(n + shift) * power
            total += term if n % 2 == 0 else -term
            abs_total += abs(term)
            n += 1
            power = power * s / n
            if n > s:
                # tail from index n: majorant term times geometric factor
                r = (n + shift + self._abs_a) / ((n + shift + 1) * (n + 1)) * s
                if r < 1:
                    tail = self._majorant(n + shift) * power / (1 - r)
                    if tail < tol:
                        break
            if n >= cap:
                raise PrecisionError(f"phi series: tail bound not below {mpmath.nstr(tol, 3)} after {n} terms")
        roundoff = abs_total * (n + 10) ** 2 * mpf(2) ** (-mpmath.mp.prec)
        return total, tail + roundoff, n

    def value(self, s, tol, max_terms=None) -> tuple[mpf, mpf]:
        with mpmath.workdps(self.dps):
            v, e, _ = self._sum(mpmath.mpmathify(s), 1, tol, max_terms)
            return self.exp_alpha * v, self.exp_alpha * e * (1 + mpf(10) ** (-10))

    def derivative(self, s, tol, max_terms=None) -> tuple[mpf, mpf]:
        with mpmath.workdps(self.dps):
            v, e, _ = self._sum(mpmath.mpmathify(s), 2, tol, max_terms)
            return -self.exp_alpha * v, self.exp_alpha * e * (1 + mpf(10) ** (-10))


def _series_dps(req: EvalRequest, s: float) -> int:
    # terms grow to about e^s before the alternating sum cancels them
    return req.working_digits + int(abs(s) / math.log(10)) + 5


def eval_phi_series(alpha, s, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """phi_alpha(s) from its power series, tail bound folded into abs_error."""
    alpha = as_rational(alpha)
    s = as_rational(s)
    dps = _series_dps(req, float(s))
    series = PhiSeries(alpha, dps)
    with mpmath.workdps(dps):
        S = mpf(s.numerator) / s.denominator
        value, err = series.value(S, req.tolerance / 10, req.max_terms)
        err += abs(value) * mpf(10) ** (-(dps - 5))
    if err > req.tolerance:
        raise PrecisionError("phi series: roundoff exceeds the request; raise precision")
    return PrecisionReal(value, err, req.working_digits)


def _phi_kernel(a: mpf) -> tuple[Callable, Callable]:
    """Integrand of the phi_alpha integral formula, as f(x, s) and f(1 - y, s).

    The reflected form keeps 1 - x exact near the singular endpoint x = 1.
    """

    def core(x, one_minus_x, s):
        if x <= 0 or one_minus_x <= 0:
            return mpf(0)
        base = mpmath.exp(a * x * (mpmath.log(x) - mpmath.log(one_minus_x)))
        return base * mpmath.sin(a * mpmath.pi * x) * mpmath.exp(-s * x)

    return (lambda x, s: core(x, 1 - x, s)), (lambda y, s: core(1 - y, y, s))


def _phi_right_half(right: Callable, a: mpf, S: mpf, req: EvalRequest) -> PrecisionReal:
    """int_0^{1/2} right(y) dy with y = exp(-e^w); right(y) ~ y^{-alpha} at 0.

    Plain tanh-sinh nodes near y = 0 carry only absolute accuracy, which costs
    a factor eps^(alpha-1) against the singularity.
    """
    dps = req.working_digits
    with mpmath.workdps(dps):
        w0 = mpmath.log(mpmath.ln2)
        decay = max(1 - a, mpf(1) / 64)
        W = mpmath.log(((dps + 10) * mpmath.ln10 + 10) / decay) + 1

        def integrand(w):
            ew = mpmath.exp(w)
            y = mpmath.exp(-ew)
            return right(y, S) * y * ew

        cut = abs(integrand(W)) * 10
        return _quad(integrand, mpmath.linspace(w0, W, 8), req, dps, cut)


def eval_phi_integral(alpha, s, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """phi_alpha(s) for 0 < alpha <= 1 from its integral formula."""
    alpha = as_rational(alpha)
    s = as_rational(s)
    if not 0 < alpha <= 1:
        raise DomainError(f"integral formula needs 0 < alpha <= 1, got {alpha}")
    if s < 0:
        raise DomainError(f"integral formula needs s >= 0, got {s}")
    with mpmath.workdps(req.working_digits):
        a = mpf(alpha.numerator) / alpha.denominator
        S = mpf(s.numerator) / s.denominator
        left, right = _phi_kernel(a)
    integral = _quad(lambda x: left(x, S), [0, mpf(1) / 2], req) + _phi_right_half(right, a, S, req)
    with mpmath.workdps(req.working_digits):
        result = integral / PrecisionReal(mpmath.pi, mpmath.pi * mpf(2) ** (2 - mpmath.mp.prec), req.working_digits)
        if alpha == 1:
            e = mpmath.exp(-S)
            result = result + PrecisionReal(e, abs(e) * mpf(2) ** (2 - mpmath.mp.prec), req.working_digits)
    return result


# -- G_alpha, F_alpha, M ----------------------------------------------------------


def _series_terms_for(x: Fraction, req: EvalRequest, bound: Callable[[int], mpf]) -> int:
    """Least N > x with bound(N) below a quarter of the tolerance."""
    N = max(5, int(x) + 2)
    cap = req.max_terms or 5000
    while bound(N) > req.tolerance / 4:
        N += 5
        if N > cap:
            raise PrecisionError(f"series tail did not reach 1e-{req.precision_digits} within {cap} terms")
    return N


def _exp_tail(N: int, x: mpf, B=1, shift: int = 0) -> mpf:
    """B * sum_{n>N} x^n/(n+shift)! <= B x^{N+1}/(N+1+shift)! / (1 - x/(N+2+shift))."""
    ratio = x / (N + 2 + shift)
    if ratio >= 1:
        return mpmath.inf
    return B * x ** (N + 1) / mpmath.factorial(N + 1 + shift) / (1 - ratio) * (1 + mpf(10) ** (-12))


def eval_G(alpha, x, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """G_alpha(x) = 2 + sum_{n>=1} x^n/n! (t_n - alpha/(n+1)).

    Coefficients are the exact rationals of G_coefficient; the tail after N
    terms is bounded with |t_n - alpha/(n+1)| <= 1 + |alpha|/(N+2).
    """
    alpha = as_rational(alpha)
    x = as_rational(x)
    if x < 0:
        raise DomainError(f"G_alpha needs x >= 0, got {x}")
    if x == 0:
        return PrecisionReal(2, 0, req.working_digits)
    dps = req.working_digits + int(float(x) / math.log(10)) + 5
    with mpmath.workdps(dps):
        X = mpf(x.numerator) / x.denominator

        def tail(N):
            return _exp_tail(N, X, 1 + abs(float(alpha)) / (N + 2))

        N = _series_terms_for(x, req, tail)
        t_moments(N)  # warm the cache once
        total = mpf(2)
        abs_total = mpf(2)
        power = mpf(1)
        for n in range(1, N + 1):
            power = power * X
            c = G_coefficient(n, alpha) * factorial(n)  # t_n - alpha/(n+1)
            term = (mpf(c.numerator) / c.denominator) * power / mpmath.factorial(n)
            total += term
            abs_total += abs(term)
        err = tail(N) + abs_total * (N + 10) * mpf(2) ** (-mpmath.mp.prec)
    return PrecisionReal(total, err, req.working_digits)


def eval_F(alpha, t, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """F_alpha(t) = e^{-t} + int_0^1 e^{-ts} tau0(s) ds - alpha((1-e^{-t})/t - e^{-t})."""
    alpha = as_rational(alpha)
    t = _positive(t, "t")
    with mpmath.workdps(req.working_digits):
        T = mpf(t.numerator) / t.denominator
        a = mpf(alpha.numerator) / alpha.denominator
    integral = _tau0_weighted(lambda s, u: mpmath.exp(-T * s), 1, req)
    with mpmath.workdps(req.working_digits + 10):
        e = mpmath.exp(-T)
        rest = e - a * (-mpmath.expm1(-T) / T - e)
        rest_err = (abs(e) + abs(a)) * mpf(10) ** (-(req.working_digits + 5))
    return integral + PrecisionReal(rest, rest_err, req.working_digits)


def eval_F_scaled(alpha, t, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """e^t F_alpha(t) = 1 + alpha + int_0^1 e^{ts} tau0(1-s) ds - alpha (e^t - 1)/t."""
    alpha = as_rational(alpha)
    t = _positive(t, "t")
    with mpmath.workdps(req.working_digits):
        T = mpf(t.numerator) / t.denominator
        a = mpf(alpha.numerator) / alpha.denominator
    integral = _tau0_weighted(lambda s, u: mpmath.exp(T * u), mpmath.exp(T), req)
    with mpmath.workdps(req.working_digits + 10):
        rest = 1 + a - a * mpmath.expm1(T) / T
        rest_err = (1 + abs(a)) * mpmath.exp(T) * mpf(10) ** (-(req.working_digits + 5))
    return integral + PrecisionReal(rest, rest_err, req.working_digits)


def eval_M(x, req: EvalRequest = _DEFAULT) -> PrecisionReal:
    """M(x) = (2 + sum t_n x^n/n!) / sum x^n/(n+1)!; its minimum over x > 0 is beta*."""
    x = _positive(x, "x")
    inner = EvalRequest(req.precision_digits + 5, req.max_terms, req.quadrature_level)
    dps = inner.working_digits + int(float(x) / math.log(10)) + 5
    with mpmath.workdps(dps):
        X = mpf(x.numerator) / x.denominator

        def both_tails(N):
            return max(_exp_tail(N, X), _exp_tail(N, X, shift=1) * 10 ** 8)

        N = _series_terms_for(x, inner, both_tails)
        t = t_moments(N)
        num = mpf(2)
        den = mpf(0)
        power = mpf(1)
        for n in range(1, N + 1):
            power = power * X / n  # x^n / n!
            num += (mpf(t[n].numerator) / t[n].denominator) * power
            den += power / (n + 1)
        eps = (N + 10) * mpf(2) ** (-mpmath.mp.prec)
        numerator = PrecisionReal(num, _exp_tail(N, X) + abs(num) * eps, inner.working_digits)
        denominator = PrecisionReal(den, _exp_tail(N, X, shift=1) + abs(den) * eps, inner.working_digits)
        ratio = numerator / denominator
    return PrecisionReal(ratio.value, ratio.abs_error, req.working_digits)


# -- Bernstein / Laplace representation checks ------------------------------------------


class _PhiIntegralRule:
    """phi_alpha(s) from the integral formula, with the kernel tabulated once.

    With x = 1/(1 + exp(-pi sinh w)) one has log(x/(1-x)) = pi sinh w exactly,
    and the integrand decays double exponentially at both ends, so the
    trapezoidal rule in w converges geometrically. The kernel values do not
    depend on s, which makes many evaluations at different s cheap. Every
    term is positive (0 < alpha <= 1), so relative errors are meaningful.
    """

    def __init__(self, alpha: Fraction, dps: int, s_max):
        self.dps = dps
        with mpmath.workdps(dps):
            self.a = mpf(alpha.numerator) / alpha.denominator
            rate = 1 - self.a if self.a < 1 else mpf(1)
            target = (dps + 5) * mpmath.ln10
            # right end: terms ~ exp(-rate u); left end: x must drop well below 1/s_max
            u_max = max(target / rate, target / 2 + mpmath.log(mpf(s_max)) + 10)
            self.n0 = int(mpmath.asinh(u_max / mpmath.pi)) + 1
        self._levels: list[list[tuple[mpf, mpf]]] = []  # new nodes per level

    def _nodes(self, level: int) -> list[tuple[mpf, mpf]]:
        """(x, f) at w = k h with h = 2^-level, only the nodes new at this level."""
        while len(self._levels) <= level:
            L = len(self._levels)
            h = mpf(2) ** (-L)
            n = self.n0 * 2**L
            ks = range(-n, n + 1) if L == 0 else range(1 - n, n, 2)
            nodes = []
            with mpmath.workdps(self.dps):
                for k in ks:
                    w = k * h
                    u = mpmath.pi * mpmath.sinh(w)
                    x = 1 / (1 + mpmath.exp(-u))
                    one_minus_x = 1 / (1 + mpmath.exp(u))
                    f = mpmath.exp(self.a * x * u) * mpmath.sin(self.a * mpmath.pi * x) * x * one_minus_x * mpmath.cosh(w)
                    nodes.append((x, f))
            self._levels.append(nodes)
        return self._levels[level]

    def value(self, s, rtol, max_level: int = 12) -> tuple[mpf, mpf]:
        """(phi, relative error estimate) with the level raised until the estimate meets rtol."""
        with mpmath.workdps(self.dps):
            partial = mpf(0)  # sum of f e^{-sx} over all nodes up to the current level
            prev = None
            for L in range(max_level + 1):
                partial += mpmath.fsum(f * mpmath.exp(-s * x) for x, f in self._nodes(L))
                T = partial * mpf(2) ** (-L)
                if prev is not None and T > 0:
                    rel = abs(T - prev) / T
                    if rel <= rtol:
                        break
                prev = T
            else:
                raise PrecisionError(f"phi integral rule did not converge at s={mpmath.nstr(s, 5)}")
            if self.a == 1:
                T += mpmath.exp(-s)
            return T, rel


def _outer_laplace(weight: Callable, alpha: Fraction, req: EvalRequest) -> PrecisionReal:
    """int_0^inf weight(s) phi_alpha(s) ds with s = e^v, phi from the integral formula.

    The integrand is positive, so a relative error r on every phi value adds
    at most r times the integral.
    """
    dps = req.working_digits
    with mpmath.workdps(dps):
        # integrand is O(e^{v}) as v -> -inf and O(e^{-v}) as v -> inf
        V = (req.precision_digits + 5) * mpmath.ln10 + 5
        rule = _PhiIntegralRule(alpha, dps, mpmath.exp(V))
        rtol = req.tolerance / 100
        worst = [mpf(0)]

        def integrand(v):
            s = mpmath.exp(v)
            p, rel = rule.value(s, rtol)
            worst[0] = max(worst[0], rel)
            return weight(s) * s * p

        ends = abs(integrand(-V)) + abs(integrand(V))
        out = _quad(integrand, mpmath.linspace(-V, V, 9), req, dps, QUAD_SAFETY * ends)
        inner_total = QUAD_SAFETY * worst[0] * (abs(out.value) + out.abs_error)
    return PrecisionReal(out.value, out.abs_error + inner_total, dps)


def check_bernstein_representation(alpha, x, req: EvalRequest = EvalRequest(10)) -> PrecisionReal:
    """|h_alpha(x) - 1 - int_0^inf (1 - e^{-sx}) phi_alpha(s) ds| with its error bound.

    The residual's ``value`` should not exceed its ``abs_error`` when the
    representation holds.
    """
    alpha = as_rational(alpha)
    x = _positive(x, "x")
    if not 0 <= alpha <= 1:
        raise DomainError(f"Bernstein check uses the integral formula, needs 0 <= alpha <= 1, got {alpha}")
    if alpha == 0:
        return PrecisionReal(0, 0, req.working_digits)
    with mpmath.workdps(req.working_digits):
        X = mpf(x.numerator) / x.denominator
    integral = _outer_laplace(lambda s: -mpmath.expm1(-s * X), alpha, req)
    diff = eval_h(alpha, x, req) - 1 - integral
    return PrecisionReal(abs(diff.value), diff.abs_error, req.working_digits)


def check_laplace_representation(alpha, x, req: EvalRequest = EvalRequest(10)) -> PrecisionReal:
    """|e^alpha - h_alpha(x) - int_0^inf e^{-sx} phi_alpha(s) ds| with its error bound."""
    alpha = as_rational(alpha)
    x = _positive(x, "x")
    if not 0 < alpha <= 1:
        raise DomainError(f"Laplace check uses the integral formula, needs 0 < alpha <= 1, got {alpha}")
    with mpmath.workdps(req.working_digits):
        X = mpf(x.numerator) / x.denominator
        a = mpf(alpha.numerator) / alpha.denominator
        ea = PrecisionReal(mpmath.exp(a), mpmath.exp(a) * mpf(10) ** (-(req.working_digits - 2)), req.working_digits)
    integral = _outer_laplace(lambda s: mpmath.exp(-s * X), alpha, req)
    diff = ea - eval_h(alpha, x, req) - integral
    return PrecisionReal(abs(diff.value), diff.abs_error, req.working_digits)
