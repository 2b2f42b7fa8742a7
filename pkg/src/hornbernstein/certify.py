"""Certificates for the Horn-Bernstein threshold beta*.

The argument has three layers:

* the moments t_n exceed c/(n+1) for every n >= 5 -- a finite exact range
  check plus an analytic tail bound valid from some threshold on;
* hence every omitted coefficient of the truncation P_N is positive, so
  P_N(x, alpha) > 0 on (0, inf) (decided exactly by Sturm sequences) proves
  alpha <= beta*;
* G_alpha - P_N < R_N(x) = sum_{n>N} x^n/n!, so P_N(x0) + R_N(x0) < 0 at a
  rational point x0 proves beta* < alpha.

Everything in the last two layers is exact rational arithmetic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

import mpmath
from mpmath import iv, mpf

from .exactcore import (
    RationalPolynomial,
    as_rational,
    count_roots,
    isolate_positive_roots,
    poly_derivative,
    poly_eval,
    refine_root,
    squarefree_part,
)
from .functions import PhiSeries, _bounds, _iv, _iv_dps, eval_tau0
from .moments import G_coefficient, t_moments
from .precision import DomainError, EvalRequest, PrecisionError, PrecisionReal

log = logging.getLogger(__name__)

__all__ = [
    "TailCertificate",
    "RangeCertificate",
    "PositivityReport",
    "BetaBracket",
    "HausdorffReport",
    "CertificationError",
    "tail_threshold",
    "verify_moment_bound",
    "build_PN",
    "certify_PN_positive",
    "minimize_PN",
    "remainder_bound",
    "remainder_upper_bound",
    "Refutation",
    "refutation",
    "refute_alpha",
    "bracket_beta_star",
    "phi_minimum",
    "estimate_alpha_star",
    "hausdorff_check",
]

_DEFAULT = EvalRequest()


class CertificationError(RuntimeError):
    """A certificate required by the procedure could not be established."""


# -- moment bounds ------------------------------------------------------------


@dataclass(frozen=True)
class TailCertificate:
    c: Fraction
    sigma: Fraction
    tau0_value: PrecisionReal
    n_threshold: Optional[int]
    valid: bool


@dataclass(frozen=True)
class RangeCertificate:
    c: Fraction
    n_from: int
    n_to: int
    failures: tuple[int, ...]
    all_pass: bool


def _threshold_interval(tau: PrecisionReal, c: Fraction, sigma: Fraction, dps: int):
    """Enclosure of log((tau - c)/tau) / log(sigma)."""
    with _iv_dps(dps):
        with mpmath.workdps(dps + 10):
            T = iv.mpf([tau.lower, tau.upper])
        ratio = (T - _iv(c)) / T
        return _bounds(iv.log(ratio) / iv.log(_iv(sigma)))


def tail_threshold(c, sigma, req: EvalRequest = _DEFAULT) -> TailCertificate:
    """Least n such that t_n > c/(n+1) for every index >= n, via tau0(1-sigma).

    For n+1 >= log((tau - c)/tau)/log(sigma), with tau = tau0(1 - sigma),
    t_n > tau (1 - sigma^(n+1))/(n+1) >= c/(n+1). The quotient is enclosed
    in interval arithmetic and rounded up.
    """
    c = as_rational(c)
    sigma = as_rational(sigma)
    if not Fraction(1, 2) < sigma < 1:
        raise DomainError(f"sigma must lie in (1/2, 1), got {sigma}")
    if c <= 0:
        raise DomainError(f"c must be positive, got {c}")
    tau = eval_tau0(1 - sigma, req)
    if as_rational(tau.lower) <= c:
        return TailCertificate(c, sigma, tau, None, False)
    _, upper = _threshold_interval(tau, c, sigma, req.working_digits)
    n = max(0, math.ceil(upper) - 1)
    return TailCertificate(c, sigma, tau, n, True)


def verify_moment_bound(c, n_from: int, n_to: int) -> RangeCertificate:
    """Exact check of t_n > c/(n+1) for n_from <= n <= n_to."""
    c = as_rational(c)
    if not 0 <= n_from <= n_to:
        raise ValueError(f"need 0 <= n_from <= n_to, got {n_from}, {n_to}")
    t = t_moments(n_to)
    failures = tuple(n for n in range(n_from, n_to + 1) if t[n] <= c / (n + 1))
    return RangeCertificate(c, n_from, n_to, failures, not failures)


# -- P_N positivity and refutation ------------------------------------------------------


@dataclass(frozen=True)
class PositivityReport:
    N: int
    alpha: Fraction
    positive_on_half_line: bool
    witness: Optional[tuple[PrecisionReal, PrecisionReal]] = None


def build_PN(N: int, alpha) -> RationalPolynomial:
    """P_N(x, alpha) = 2 + sum_{n=1}^N x^n/n! (t_n - alpha/(n+1))."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    alpha = as_rational(alpha)
    return RationalPolynomial([2] + [G_coefficient(n, alpha) for n in range(1, N + 1)], "x")


@dataclass(frozen=True)
class _ExactMinimum:
    x_lo: Fraction
    x_hi: Fraction
    x0: Fraction
    p: Fraction
    p_err: Fraction  # P(x*) lies in [p - p_err, p]


def _abs_derivative_bound(P: RationalPolynomial, X: Fraction) -> Fraction:
    return sum((k * abs(c) * X ** (k - 1) for k, c in enumerate(P.coefficients) if k), Fraction(0))


def _exact_minimum(P: RationalPolynomial, width: Fraction) -> _ExactMinimum:
    if P.leading <= 0 and P.degree >= 1:
        raise ValueError("P_N has a nonpositive leading coefficient; it has no minimum on [0, inf)")
    best = _ExactMinimum(Fraction(0), Fraction(0), Fraction(0), poly_eval(P, 0), Fraction(0))
    dP = poly_derivative(P)
    if dP.is_zero():
        return best
    sf = squarefree_part(dP)
    for lo, hi in isolate_positive_roots(dP):
        lo, hi = refine_root(sf, lo, hi, width)
        x0 = (lo + hi) / 2
        p = poly_eval(P, x0)
        if p < best.p:
            err = (hi - lo) / 2 * _abs_derivative_bound(P, hi)
            best = _ExactMinimum(lo, hi, x0, p, err)
    return best


def _to_precision_real(x: Fraction, err: Fraction, digits: int) -> PrecisionReal:
    base = PrecisionReal.exact(x, digits)
    with mpmath.workdps(digits + 5):
        extra = mpf(err.numerator) / err.denominator
    return PrecisionReal(base.value, base.abs_error + extra * (1 + mpf(10) ** (-digits)), digits)


def minimize_PN(N: int, alpha, req: EvalRequest = _DEFAULT) -> tuple[PrecisionReal, PrecisionReal]:
    """Global minimum (x0, P_N(x0)) of P_N(., alpha) over [0, inf).

    Critical points are isolated exactly on P_N' and refined by bisection;
    the leading coefficient must be positive (true for alpha < 2.3, N >= 5).
    """
    P = build_PN(N, alpha)
    m = _exact_minimum(P, Fraction(1, 10 ** (req.precision_digits + 2)))
    x0 = _to_precision_real(m.x0, (m.x_hi - m.x_lo) / 2, req.working_digits)
    p = _to_precision_real(m.p, m.p_err, req.working_digits)
    return x0, p


def certify_PN_positive(N: int, alpha, req: EvalRequest = _DEFAULT) -> PositivityReport:
    """P_N(x, alpha) > 0 on (0, inf) iff P_N(0) > 0 and Sturm finds no positive root."""
    alpha = as_rational(alpha)
    P = build_PN(N, alpha)
    positive = poly_eval(P, 0) > 0 and count_roots(P, 0, None) == 0
    if positive:
        return PositivityReport(N, alpha, True, None)
    try:
        witness = minimize_PN(N, alpha, req)
    except ValueError:
        witness = None
    return PositivityReport(N, alpha, False, witness)


def remainder_bound(N: int, x) -> Fraction:
    """Exact upper bound x^{N+1}/(N+1)! / (1 - x/(N+2)) on R_N(x), for 0 <= x < N+2."""
    x = as_rational(x)
    if x < 0:
        raise DomainError(f"remainder bound needs x >= 0, got {x}")
    if x >= N + 2:
        raise DomainError(f"geometric majorant needs x < N+2 = {N + 2}, got {x}")
    if x == 0:
        return Fraction(0)
    return x ** (N + 1) / factorial(N + 1) / (1 - x / (N + 2))


def remainder_upper_bound(N: int, x) -> PrecisionReal:
    """Certified upper bound on R_N(x) = sum_{n>N} x^n/n!.

    ``x`` may be exact or a PrecisionReal (its upper end is used). The returned
    ``value`` is itself rounded up, so it is an upper bound on R_N(x).
    """
    if isinstance(x, PrecisionReal):
        with mpmath.workdps(x.working_digits + 10):
            X = as_rational(x.value) + as_rational(x.abs_error * (1 + mpf(10) ** (-x.working_digits)))
        digits = x.working_digits
    else:
        X = as_rational(x)
        digits = 30
    bound = remainder_bound(N, X)
    if bound == 0:
        return PrecisionReal(0, 0, digits)
    with mpmath.workdps(digits):
        value = mpmath.fdiv(bound.numerator, bound.denominator, rounding="u")
    return PrecisionReal(value, 0, digits)


@dataclass(frozen=True)
class Refutation:
    N: int
    alpha: Fraction
    x0: Fraction
    p: Fraction
    remainder: Fraction
    refuted: bool


def _approximate_minimizer(P: RationalPolynomial, N: int) -> Optional[Fraction]:
    """Cheap floating-point guess of the global minimizer on (0, N+2), as a short rational."""
    with mpmath.workdps(40):
        coeffs = [mpf(c.numerator) / c.denominator for c in reversed(P.coefficients)]
        grid = [mpf(k) / 20 for k in range(1, 20 * (N + 2))]
        values = [mpmath.polyval(coeffs, x) for x in grid]
        best = None
        for i in range(1, len(grid) - 1):
            if not values[i - 1] >= values[i] <= values[i + 1]:
                continue
            try:
                x = mpmath.findroot(lambda y: mpmath.polyval(coeffs, y, derivative=True)[1], grid[i])
            except (ValueError, ZeroDivisionError):
                x = grid[i]
            if not grid[i - 1] < x < grid[i + 1]:
                x = grid[i]
            v = mpmath.polyval(coeffs, x)
            if best is None or v < best[0]:
                best = (v, x)
        if best is None or best[0] >= 0:
            return None
        return Fraction(mpmath.nstr(best[1], 30))


def _quick_refutation(N: int, alpha: Fraction, P: RationalPolynomial) -> Optional[Refutation]:
    if alpha <= 0:
        return None
    x0 = _approximate_minimizer(P, N)
    if x0 is None:
        return None
    p, R = poly_eval(P, x0), remainder_bound(N, x0)
    return Refutation(N, alpha, x0, p, R, True) if p + R < 0 else None


def refutation(N: int, alpha, req: EvalRequest = _DEFAULT) -> Refutation:
    """Exact data behind :func:`refute_alpha`.

    Any rational x0 with P_N(x0) + R_N(x0) < 0 is a certificate, so a point
    found in floating point is tried first; exact minimization is the fallback.
    """
    alpha = as_rational(alpha)
    P = build_PN(N, alpha)
    quick = _quick_refutation(N, alpha, P)
    if quick is not None:
        return quick
    try:
        m = _exact_minimum(P, Fraction(1, 10 ** (req.precision_digits + 2)))
    except ValueError:
        return Refutation(N, alpha, Fraction(0), poly_eval(P, 0), Fraction(0), False)
    if m.p >= 0 or m.x0 >= N + 2:
        return Refutation(N, alpha, m.x0, m.p, Fraction(0), False)
    R = remainder_bound(N, m.x0)
    # G(x0) < P_N(x0) + R_N(x0) since every omitted coefficient is below 1
    return Refutation(N, alpha, m.x0, m.p, R, alpha > 0 and m.p + R < 0)


def refute_alpha(N: int, alpha, req: EvalRequest = _DEFAULT) -> bool:
    """True certifies beta* < alpha: P_N(x0) + R_N(x0) < 0 at the rational minimizer x0."""
    return refutation(N, alpha, req).refuted


# -- beta* -----------------------------------------------------------------------


@dataclass(frozen=True)
class BetaBracket:
    lower: Fraction
    upper: Fraction
    N_used: int
    precision_digits: int
    n_insufficient: bool = False

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower


_ALPHA_CAP = Fraction(23, 10)
_SIGMA_CAP = Fraction(989, 1000)


def _tail_positivity(req: EvalRequest) -> None:
    """Certify t_n > 2.3/(n+1) for all n >= 5, so omitted P_N terms are positive."""
    tail = tail_threshold(_ALPHA_CAP, _SIGMA_CAP, req)
    if not tail.valid:
        raise CertificationError("tail bound for c = 2.3 failed")
    rng = verify_moment_bound(_ALPHA_CAP, 5, max(5, tail.n_threshold - 1))
    if not rng.all_pass:
        raise CertificationError(f"t_n > 2.3/(n+1) fails for n in {rng.failures}")


def _decimal_mid(lo: Fraction, hi: Fraction, digits: int) -> Fraction:
    scale = 10**digits
    mid = Fraction(round((lo + hi) / 2 * scale), scale)
    if not lo < mid < hi:
        mid = (lo + hi) / 2
    return mid


def bracket_beta_star(
    N: int = 20,
    target_digits: int = 5,
    req: EvalRequest = _DEFAULT,
    auto_escalate: bool = True,
    max_N: int = 200,
    step: int = 10,
) -> BetaBracket:
    """Bisection on alpha between a positivity certificate and a refutation.

    When neither certificate is obtainable at the midpoint, N is raised by
    ``step`` (up to ``max_N``); without escalation the bracket reached so far
    is returned with ``n_insufficient`` set.
    """
    if N < 5:
        raise ValueError(f"N must be >= 5, got {N}")
    if target_digits < 1:
        raise ValueError(f"target_digits must be >= 1, got {target_digits}")
    _tail_positivity(req)
    lower, upper = Fraction(2), _ALPHA_CAP
    if not certify_PN_positive(N, lower, req).positive_on_half_line:
        raise CertificationError(f"P_{N}(x, 2) is not positive; lower seed fails")
    if not refute_alpha(N, upper, req):
        raise CertificationError(f"alpha = 2.3 cannot be refuted at N = {N}")
    width = Fraction(1, 10**target_digits)
    insufficient = False
    while upper - lower >= width:
        mid = _decimal_mid(lower, upper, target_digits + 3)
        if _quick_refutation(N, mid, build_PN(N, mid)) is not None:
            upper = mid
        elif certify_PN_positive(N, mid, req).positive_on_half_line:
            lower = mid
        elif refute_alpha(N, mid, req):
            upper = mid
        elif auto_escalate and N + step <= max_N:
            N += step
            log.info("no certificate at alpha=%s, raising N to %d", mid, N)
        else:
            insufficient = True
            break
    return BetaBracket(lower, upper, N, target_digits, insufficient)


# -- alpha* ------------------------------------------------------------------------


def _phi_grid(s_max: float) -> list[mpf]:
    # fine steps where the interior minimum lives, geometric beyond
    grid = []
    s = 0.05
    while s < s_max:
        grid.append(mpf(s))
        s = s + 0.05 if s < 10 else s * 1.03
    grid.append(mpf(s_max))
    return grid


_NEAR = 20  # below this s a cheaper, lower-precision series suffices


def phi_minimum(alpha, s_max=200, req: EvalRequest = _DEFAULT) -> tuple[mpf, PrecisionReal]:
    """Heuristic minimum of phi_alpha on (0, s_max]: derivative-sign scan, then bisection.

    Not certified: the scan can miss a minimum narrower than its step.
    """
    s_max = float(s_max)
    wd = req.working_digits
    near = PhiSeries(alpha, wd + int(_NEAR / math.log(10)) + 10)
    far = PhiSeries(alpha, wd + int(max(s_max, _NEAR) / math.log(10)) + 10)
    tol = mpf(10) ** (-wd)

    def series(s):
        return near if s <= _NEAR else far

    def slope(s):
        return series(s).derivative(s, tol)[0]

    with mpmath.workdps(far.dps):
        grid = _phi_grid(s_max)
        slopes = [slope(s) for s in grid]
        candidates = [grid[-1]]
        for i in range(len(grid) - 1):
            if slopes[i] < 0 <= slopes[i + 1]:
                lo, hi = grid[i], grid[i + 1]
                while hi - lo > mpf(10) ** (-(req.precision_digits // 2 + 4)):
                    mid = (lo + hi) / 2
                    if slope(mid) < 0:
                        lo = mid
                    else:
                        hi = mid
                candidates.append((lo + hi) / 2)
        best_s, best = None, None
        for s in candidates:
            v, e = series(s).value(s, tol)
            if best is None or v < best[0]:
                best_s, best = s, (v, e)
    return best_s, PrecisionReal(best[0], best[1], wd)


def estimate_alpha_star(
    req: EvalRequest = EvalRequest(8),
    lower="2.25",
    upper="2.35",
    s_max=200,
) -> PrecisionReal:
    """Non-certified estimate of alpha*: bisection on the sign of min phi_alpha.

    ``abs_error`` is the half-width of the final bracket; it does not cover a
    minimum missed by the scan in :func:`phi_minimum`.
    """
    lo, hi = as_rational(lower), as_rational(upper)

    def sign(alpha) -> int:
        _, m = phi_minimum(alpha, s_max, req)
        if m.is_positive():
            return 1
        if m.is_negative():
            return -1
        raise PrecisionError(f"cannot resolve the sign of min phi at alpha={alpha}")

    if sign(lo) < 0 or sign(hi) > 0:
        raise PrecisionError("alpha* is not bracketed by the seed interval")
    width = Fraction(1, 10 ** (req.precision_digits + 1))
    while hi - lo > width:
        mid = (lo + hi) / 2
        if sign(mid) > 0:
            lo = mid
        else:
            hi = mid
    center = (lo + hi) / 2
    return _to_precision_real(center, (hi - lo) / 2, req.working_digits)


# -- Hausdorff finite differences ----------------------------------------------------------


@dataclass(frozen=True)
class HausdorffReport:
    K: int
    min_value: Fraction
    location: tuple[int, int]  # (n, k) of the minimal (-1)^k Delta^k mu_n
    all_nonneg: bool
    negatives: tuple[tuple[int, int], ...] = field(default=())


def hausdorff_check(seq: Sequence, K: int) -> HausdorffReport:
    """All (-1)^k Delta^k mu_n with n + k <= K, exactly.

    Nonnegativity of every such difference (for all K) characterizes Hausdorff
    moment sequences; a finite K is evidence only.
    """
    if K < 0:
        raise ValueError(f"K must be >= 0, got {K}")
    if len(seq) < K + 1:
        raise ValueError(f"need at least K+1 = {K + 1} terms, got {len(seq)}")
    row = [as_rational(v) for v in seq[: K + 1]]
    best = (row[0], (0, 0))
    negatives = []
    k = 0
    while True:
        for n, v in enumerate(row):
            if v < best[0]:
                best = (v, (n, k))
            if v < 0:
                negatives.append((n, k))
        if len(row) == 1:
            break
        row = [row[n] - row[n + 1] for n in range(len(row) - 1)]
        k += 1
    return HausdorffReport(K, best[0], best[1], not negatives, tuple(negatives))
