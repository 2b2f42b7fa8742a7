"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (shown in the terminal summary) and then
asserts, so a failing criterion is visible both ways.
"""

import random
import time
from fractions import Fraction
from math import comb

import mpmath
from click.testing import CliRunner
from mpmath import mpf

from conftest import ACCEPTANCE_LINES
from hornbernstein.cli import main
from hornbernstein.certify import (
    bracket_beta_star,
    certify_PN_positive,
    estimate_alpha_star,
    hausdorff_check,
    minimize_PN,
    refute_alpha,
    remainder_upper_bound,
    tail_threshold,
    verify_moment_bound,
)
from hornbernstein.functions import (
    check_bernstein_representation,
    eval_g,
    eval_G,
    eval_h,
    eval_phi_integral,
    eval_phi_series,
    eval_rho,
    g_stieltjes,
    moment_oracle,
    rho_laplace,
    tau0_min,
)
from hornbernstein.moments import a_sequence, binomial_transform, s_moments, t_moments
from hornbernstein.precision import EvalRequest

BETA_STAR_10 = Fraction("2.1885863446")
ALPHA_STAR_10 = mpf("2.2996564432")


def record(number: int, title: str, ok: bool, detail: str, seconds: float) -> None:
    line = f"AC{number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail} ({seconds:.1f} s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def to_mpf(x: Fraction) -> mpf:
    return mpf(x.numerator) / x.denominator


def test_ac01_exact_moments():
    start = time.perf_counter()
    expected = [1, Fraction(2, 3), Fraction(5, 9), Fraction(67, 135), Fraction(371, 810), Fraction(1465, 3402)]
    got = t_moments(5)
    elapsed = time.perf_counter() - start
    ok = got == expected and elapsed < 1
    record(1, "exact moments t0..t5", ok, ", ".join(map(str, got)), elapsed)


def test_ac02_range_certification():
    start = time.perf_counter()
    a = verify_moment_bound(2, 4, 56)
    b = verify_moment_bound(Fraction(23, 10), 5, 70)
    elapsed = time.perf_counter() - start
    ok = a.all_pass and b.all_pass and elapsed < 5
    record(2, "range certification", ok, f"c=2 on 4..56: {a.all_pass}, c=2.3 on 5..70: {b.all_pass}", elapsed)


def test_ac03_tail_thresholds():
    start = time.perf_counter()
    a = tail_threshold(2, Fraction(985, 1000))
    b = tail_threshold(Fraction(23, 10), Fraction(989, 1000))
    elapsed = time.perf_counter() - start
    ok = a.valid and b.valid and a.n_threshold == 57 and b.n_threshold == 71 and elapsed < 1
    record(3, "tail thresholds", ok, f"{a.n_threshold} and {b.n_threshold}", elapsed)


def test_ac04_P20_split_point():
    start = time.perf_counter()
    positive = certify_PN_positive(20, Fraction("2.188585")).positive_on_half_line
    x0, p = minimize_PN(20, Fraction("2.188590"))
    R = remainder_upper_bound(20, x0)
    elapsed = time.perf_counter() - start
    ok = (
        positive
        and abs(x0.value - mpf("3.365577")) <= mpf("1e-4")
        and abs(p.value - mpf("-0.0000267")) <= mpf("2e-6")
        and R.value <= mpf("5e-9")
        and mpf("2.7e-9") / 3 <= R.value <= 3 * mpf("2.7e-9")
        and elapsed < 30
    )
    detail = f"positive at 2.188585: {positive}; x0={mpmath.nstr(x0.value, 8)}, p={mpmath.nstr(p.value, 4)}, R<={mpmath.nstr(R.value, 3)}"
    record(4, "P_20 split point", ok, detail, elapsed)


def test_ac05_beta_star():
    start = time.perf_counter()
    b = bracket_beta_star(20, 10, auto_escalate=True)
    elapsed = time.perf_counter() - start
    sound = certify_PN_positive(b.N_used, b.lower).positive_on_half_line and refute_alpha(b.N_used, b.upper)
    ok = b.lower <= BETA_STAR_10 <= b.upper and b.width <= Fraction(1, 10**10) and sound and elapsed < 600
    detail = f"[{mpmath.nstr(to_mpf(b.lower), 14)}, {mpmath.nstr(to_mpf(b.upper), 14)}], N={b.N_used}"
    record(5, "beta* bracket", ok, detail, elapsed)


def test_ac06_alpha_star():
    start = time.perf_counter()
    est = estimate_alpha_star(EvalRequest(7))
    elapsed = time.perf_counter() - start
    ok = abs(est.value - ALPHA_STAR_10) < mpf("5e-6") and elapsed < 600
    record(6, "alpha* estimate (non-certified)", ok, f"{mpmath.nstr(est.value, 10)} +/- {est.error_string()}", elapsed)


def test_ac07_tau0_characteristics():
    start = time.perf_counter()
    t_star, m = tau0_min()
    t = t_moments(20)
    worst = mpf(0)
    for n in range(21):
        q = moment_oracle(n)
        with mpmath.workdps(50):
            worst = max(worst, abs(q.value - to_mpf(t[n])))
    elapsed = time.perf_counter() - start
    ok = (
        abs(t_star.value - mpf("0.592")) <= mpf("0.002")
        and abs(m.value - mpf("0.569")) <= mpf("0.002")
        and worst <= mpf("1e-8")
        and elapsed < 60
    )
    detail = f"t*={mpmath.nstr(t_star.value, 6)}, m={mpmath.nstr(m.value, 6)}, max|oracle - t_n|={mpmath.nstr(worst, 3)}"
    record(7, "tau0 characteristics", ok, detail, elapsed)


def test_ac08_representation_cross_checks():
    start = time.perf_counter()
    stieltjes = all(eval_g(x).overlaps(g_stieltjes(x)) for x in ("0.1", "1", "10", "100"))
    laplace = eval_rho(2).overlaps(rho_laplace(2))
    xg = eval_g(10**8) * 10**8
    limit = abs(xg.value - 2) <= mpf("1e-6")
    bern = check_bernstein_representation(1, 1)
    bern_ok = bern.value <= bern.abs_error
    phi_ok = all(eval_phi_series("0.5", s).overlaps(eval_phi_integral("0.5", s)) for s in (1, 2))
    elapsed = time.perf_counter() - start
    ok = stieltjes and laplace and limit and bern_ok and phi_ok and elapsed < 120
    detail = (
        f"g Stieltjes {stieltjes}, rho Laplace {laplace}, x g(x) at 1e8 ok {limit}, "
        f"Bernstein residual {mpmath.nstr(bern.value, 3)} <= {bern.error_string()}, phi series=integral {phi_ok}"
    )
    record(8, "representation cross-checks", ok, detail, elapsed)


def test_ac09_derivative_identities():
    start = time.perf_counter()
    digits = 30
    req = EvalRequest(digits)
    step = Fraction(1, 10 ** (digits // 3))
    worst = mpf(0)
    for alpha in ("0.5", "1", "2"):
        for x in ("0.5", "1", "3"):
            xs = Fraction(x)
            with mpmath.workdps(digits + 15):
                hm, h0, hp = (eval_h(alpha, xs + k * step, req).value for k in (-1, 0, 1))
                d1 = (hp - hm) / (2 * to_mpf(step))
                d2 = (hp - 2 * h0 + hm) / to_mpf(step) ** 2
                a = mpf(alpha)
                rho, g = eval_rho(x, req).value, eval_g(x, req).value
                worst = max(worst, abs(d1 / (a * h0 * rho) - 1), abs((-d2 / d1) / (g - a * rho) - 1))
    elapsed = time.perf_counter() - start
    ok = worst <= mpf("1e-6") and elapsed < 60
    record(9, "derivative identities", ok, f"max relative discrepancy {mpmath.nstr(worst, 3)} over 9 points", elapsed)


def test_ac10_hausdorff_experiment():
    start = time.perf_counter()
    t_report = hausdorff_check(t_moments(40), 40)
    a = a_sequence(40)
    a_report = hausdorff_check(a, 40)
    # independent recomputation of the reported minimum
    brute = min(
        sum((-1) ** j * comb(k, j) * a[n + j] for j in range(k + 1)) for n in range(41) for k in range(41 - n)
    )
    labeled = "experimental evidence, not a proof" in CliRunner().invoke(main, ["hausdorff", "--seq", "a", "--K", "40"]).output
    elapsed = time.perf_counter() - start
    ok = labeled and t_report.all_nonneg and isinstance(a_report.min_value, Fraction) and a_report.min_value == brute and elapsed < 60
    n, k = a_report.location
    detail = (
        f"(t_n) all nonnegative: {t_report.all_nonneg}; (a_n) experimental evidence, not a proof: "
        f"min {mpmath.nstr(to_mpf(a_report.min_value), 6)} at n={n}, k={k}, all nonnegative: {a_report.all_nonneg}"
    )
    record(10, "Hausdorff experiment", ok, detail, elapsed)


def test_ac11_property_suites():
    start = time.perf_counter()
    s = s_moments(200)
    involution = binomial_transform(binomial_transform(s)) == s and binomial_transform(s) == t_moments(200)

    rng = random.Random(11)
    consistent = 0
    for i in range(100):
        kind = i % 4
        req = EvalRequest(12)
        if kind == 0:
            args, fn = (Fraction(rng.randint(0, 30), 10), Fraction(rng.randint(1, 300), 30)), eval_h
        elif kind == 1:
            args, fn = (Fraction(rng.randint(1, 500), 25),), eval_rho
        elif kind == 2:
            args, fn = (Fraction(rng.randint(1, 500), 25),), eval_g
        else:
            args, fn = (Fraction(rng.randint(0, 25), 10), Fraction(rng.randint(0, 80), 10)), eval_G
        low, high = fn(*args, req), fn(*args, req.doubled())
        with mpmath.workdps(60):
            if abs(low.value - high.value) <= low.abs_error + high.abs_error and low.abs_error <= req.tolerance:
                consistent += 1

    decreasing = True
    for x in (Fraction(1, 2), Fraction(2), Fraction(7)):
        values = [eval_G(Fraction(k, 4), x) for k in range(0, 12)]
        decreasing &= all(u.lower > v.upper for u, v in zip(values, values[1:]))
    elapsed = time.perf_counter() - start
    ok = involution and consistent == 100 and decreasing and elapsed < 120
    detail = f"involution N<=200 {involution}; doubled precision {consistent}/100; G decreasing in alpha {decreasing}"
    record(11, "property suites", ok, detail, elapsed)
