import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from hornbernstein.certify import build_PN
from hornbernstein.functions import (
    PhiSeries,
    check_bernstein_representation,
    check_laplace_representation,
    eval_d,
    eval_F,
    eval_F_scaled,
    eval_g,
    eval_G,
    eval_h,
    eval_M,
    eval_phi_integral,
    eval_phi_series,
    eval_rho,
    eval_tau0,
    g_stieltjes,
    integral_of_d,
    moment_oracle,
    rho_laplace,
    rho_stieltjes2,
    tau0_min,
    tau0_moment_oracle,
)
from hornbernstein.moments import s_moments, t_moments
from hornbernstein.precision import DomainError, EvalRequest, PrecisionError, PrecisionReal

def to_mpf(x):
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpmath.mpmathify(x)


def near(x: PrecisionReal, target, slack=0):
    with mpmath.workdps(x.working_digits + 10):
        return abs(x.value - to_mpf(target)) <= x.abs_error + slack


def agree(a: PrecisionReal, b: PrecisionReal) -> bool:
    return a.overlaps(b)


# -- closed forms -------------------------------------------------------------------


def test_h_examples():
    assert near(eval_h(0, 5), 1)
    assert near(eval_h(2, 1), 4)
    with mpmath.workdps(40):
        assert abs(eval_h(1, 10**6).value - mpmath.e) < mpf("1e-5")
    with pytest.raises(DomainError):
        eval_h(1, 0)


def test_rho_examples():
    with mpmath.workdps(50):
        assert near(eval_rho(1), mpmath.log(2) - mpf(1) / 2)
    r = eval_rho(10**6)
    assert abs(r.value / (mpf(1) / (2 * mpf(10) ** 12)) - 1) < mpf("0.1")
    with pytest.raises(DomainError):
        eval_rho(-1)


def test_g_examples():
    with mpmath.workdps(50):
        assert near(eval_g(1, EvalRequest(15)), 1 / (2 * (2 * mpmath.log(2) - 1)))
    xg = eval_g(10**8) * 10**8
    assert abs(xg.value - 2) < mpf("1e-6")


def test_tau0_examples():
    with mpmath.workdps(50):
        assert near(eval_tau0(Fraction(1, 2)), 8 / (4 + mpmath.pi**2))
    assert abs(eval_tau0("0.999").value - 1) < mpf("0.05")
    assert abs(eval_tau0("0.015").value - mpf("3.45")) < mpf("0.01")
    for bad in (0, 1, "1.5"):
        with pytest.raises(DomainError):
            eval_tau0(bad)


def test_tau0_minimum_and_shape():
    t_star, m = tau0_min()
    assert abs(t_star.value - mpf("0.592")) < mpf("0.002")
    assert abs(m.value - mpf("0.569")) < mpf("0.002")
    for dt in ("0.05", "-0.05"):
        assert eval_tau0(as_fraction(t_star.value) + Fraction(dt)).value > m.value
    # monotone on each side, nonnegative second differences on a grid
    grid = [Fraction(k, 100) for k in range(2, 99)]
    vals = [eval_tau0(t, EvalRequest(15)).value for t in grid]
    split = next(i for i, t in enumerate(grid) if t > as_fraction(t_star.value))
    assert all(a > b for a, b in zip(vals[:split], vals[1:split]))
    assert all(a < b for a, b in zip(vals[split:], vals[split + 1 :]))
    assert all(vals[i - 1] - 2 * vals[i] + vals[i + 1] >= 0 for i in range(1, len(vals) - 1))


def as_fraction(x) -> Fraction:
    return Fraction(mpmath.nstr(x, 20))


def test_d_examples():
    with mpmath.workdps(50):
        assert near(eval_d(mpmath.log(2)), 4 / (4 + mpmath.pi**2))
        d10 = eval_d(10)
        assert abs(d10.value / mpmath.exp(-10) - 1) < mpf("0.01")
    assert near(integral_of_d(EvalRequest(12)), 1)
    with pytest.raises(DomainError):
        eval_d(0)


# -- quadrature oracles ----------------------------------------------------------------


@pytest.mark.parametrize("n", [0, 1, 2, 5, 12, 20])
def test_moment_oracle_matches_exact(n):
    t = t_moments(20)[n]
    assert near(moment_oracle(n), t)


def test_tau0_moment_oracle_matches_s():
    s = s_moments(6)
    for n in (0, 3, 6):
        assert near(tau0_moment_oracle(n), s[n])


@pytest.mark.parametrize("x", ["0.1", "1", "3", "10", "100"])
def test_g_stieltjes_form(x):
    assert agree(eval_g(x), g_stieltjes(x))


def test_rho_representations():
    assert agree(eval_rho(2), rho_laplace(2))
    for x in ("0.5", "2"):
        assert agree(eval_rho(x), rho_stieltjes2(x))


# -- phi ---------------------------------------------------------------------------


def test_phi_series_examples():
    with mpmath.workdps(40):
        assert near(eval_phi_series(2, 0), mpmath.e**2)
    assert eval_phi_series(0, 3).value == 0
    with pytest.raises(PrecisionError):
        eval_phi_series(2, 40, EvalRequest(20, max_terms=10))


@pytest.mark.parametrize("s", ["1", "2"])
def test_phi_series_matches_integral(s):
    assert agree(eval_phi_series("0.5", s), eval_phi_integral("0.5", s))


def test_phi_integral_examples():
    with mpmath.workdps(40):
        one = eval_phi_integral(1, 0)
        assert near(one, mpmath.e / 2)
    far = eval_phi_integral("0.5", 10)
    assert 0 < far.value < eval_phi_integral("0.5", 0).value
    with pytest.raises(DomainError):
        eval_phi_integral("1.5", 1)


def test_phi_series_derivative_matches_difference():
    series = PhiSeries(Fraction(9, 4), 50)
    with mpmath.workdps(50):
        s, h, tol = mpf(5), mpf("1e-12"), mpf("1e-40")
        fd = (series.value(s + h, tol)[0] - series.value(s - h, tol)[0]) / (2 * h)
        assert abs(fd - series.derivative(s, tol)[0]) < mpf("1e-20")


def test_bernstein_and_laplace_representations():
    assert check_bernstein_representation(0, 3).value == 0
    r = check_bernstein_representation(1, 1)
    assert r.value <= r.abs_error
    r = check_laplace_representation(1, 1)
    assert r.value <= r.abs_error
    with pytest.raises(DomainError):
        check_bernstein_representation(2, 1)


# -- G, F, M ------------------------------------------------------------------------


def test_G_examples():
    assert near(eval_G(2, 0), 2)
    assert eval_G(2, 3).is_positive()
    P4 = build_PN(4, 2)
    for x in (1, 5, 10):
        G = eval_G(2, x)
        assert G.lower >= to_mpf(P4(Fraction(x)))


@pytest.mark.parametrize("x", [Fraction(1, 2), Fraction(3), Fraction(17, 2)])
def test_G_strictly_decreasing_in_alpha(x):
    alphas = [Fraction(k, 10) for k in range(0, 30, 3)]
    values = [eval_G(a, x) for a in alphas]
    for a, b in zip(values, values[1:]):
        assert a.lower > b.upper


def test_F_examples():
    for t in ("0.1", "1", "5", "20"):
        assert eval_F(2, t).lower >= 0
    with mpmath.workdps(50):
        e = PrecisionReal.exact(+mpmath.e, 45)
    assert agree(eval_F_scaled(2, 1), eval_F(2, 1) * e)
    assert eval_F(0, 1).is_positive()
    with pytest.raises(DomainError):
        eval_F(2, 0)


def test_M_examples():
    assert eval_M("0.01").value > 100
    assert abs(eval_M("3.37").value - mpf("2.18859")) < mpf("1e-3")
    lower = Fraction(2188586344, 10**9)
    for k in range(1, 60):
        x = Fraction(k, 6)
        assert eval_M(x, EvalRequest(15)).upper >= to_mpf(lower)


# -- derivative identities -----------------------------------------------------------------

POINTS = [(a, x) for a in ("0.5", "1", "2") for x in ("0.5", "1", "3")]


@pytest.mark.parametrize("alpha, x", POINTS)
def test_derivative_identities(alpha, x):
    digits = 30
    req = EvalRequest(digits)
    with mpmath.workdps(digits + 15):
        step = Fraction(1, 10 ** (digits // 3))
        xs = Fraction(x)
        hm, h0, hp = (eval_h(alpha, xs + k * step, req).value for k in (-1, 0, 1))
        d1 = (hp - hm) / (2 * to_mpf(step))
        d2 = (hp - 2 * h0 + hm) / to_mpf(step) ** 2
        rho, g = eval_rho(x, req).value, eval_g(x, req).value
        a = mpf(alpha)
        expected1 = a * h0 * rho
        assert abs(d1 / expected1 - 1) <= mpf("1e-6")
        expected2 = g - a * rho
        assert abs((-d2 / d1) / expected2 - 1) <= mpf("1e-6")


# -- precision self-consistency ----------------------------------------------------------


def _random_cases(count, seed=20241018):
    rng = random.Random(seed)
    makers = [
        lambda: (eval_h, (Fraction(rng.randint(0, 30), 10), Fraction(rng.randint(1, 400), 40))),
        lambda: (eval_rho, (Fraction(rng.randint(1, 1000), 50),)),
        lambda: (eval_g, (Fraction(rng.randint(1, 1000), 50),)),
        lambda: (eval_tau0, (Fraction(rng.randint(1, 999), 1000),)),
        lambda: (eval_d, (Fraction(rng.randint(1, 400), 40),)),
        lambda: (eval_G, (Fraction(rng.randint(0, 25), 10), Fraction(rng.randint(0, 100), 10))),
        lambda: (eval_M, (Fraction(rng.randint(1, 100), 10),)),
        lambda: (eval_phi_series, (Fraction(rng.randint(0, 25), 10), Fraction(rng.randint(0, 50), 5))),
    ]
    return [makers[i % len(makers)]() for i in range(count)]


def test_doubled_precision_self_consistency():
    for fn, args in _random_cases(100):
        req = EvalRequest(12)
        low = fn(*args, req)
        high = fn(*args, req.doubled())
        assert low.abs_error <= req.tolerance
        with mpmath.workdps(60):
            assert abs(low.value - high.value) <= low.abs_error + high.abs_error, (fn.__name__, args)
