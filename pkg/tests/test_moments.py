from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hornbernstein.moments import (
    G_coefficient,
    a_sequence,
    binomial_transform,
    moment_table,
    p_polynomials,
    rho_coeffs,
    s_moments,
    t_moments,
)

T_FIRST = [Fraction(1), Fraction(2, 3), Fraction(5, 9), Fraction(67, 135), Fraction(371, 810), Fraction(1465, 3402)]


def reference_t(N):
    """t_n from scratch: invert the power series by solving a triangular system."""
    phi = [Fraction(2 * (-1) ** n, (n + 1) * (n + 2)) for n in range(N + 1)]
    inv = [Fraction(0)] * (N + 1)
    inv[0] = 1 / phi[0]
    for n in range(1, N + 1):
        inv[n] = -sum(phi[k] * inv[n - k] for k in range(1, n + 1)) / phi[0]
    rho = inv
    s = [1 + 2 * sum((-1) ** k * rho[k] for k in range(1, n + 1)) for n in range(N + 1)]
    return [sum((-1) ** k * comb(n, k) * s[k] for k in range(n + 1)) for n in range(N + 1)]


def test_first_moments():
    assert t_moments(5) == T_FIRST


def test_first_rho_and_s():
    assert rho_coeffs(3) == [1, Fraction(1, 3), Fraction(-1, 18), Fraction(7, 270)]
    assert s_moments(2) == [1, Fraction(1, 3), Fraction(2, 9)]


def test_against_independent_derivation():
    assert t_moments(20) == reference_t(20)


def test_involution_up_to_200():
    s = s_moments(200)
    t = binomial_transform(s)
    assert t == t_moments(200)
    assert binomial_transform(t) == s


def test_moment_bounds_and_monotonicity():
    t = t_moments(80)
    assert all(0 < b < a for a, b in zip(t, t[1:]))


def test_a_sequence_reconstructs_t():
    t = t_moments(60)
    a = a_sequence(60)
    assert a[0] == 1
    running = Fraction(0)
    for n in range(61):
        running += a[n]
        assert t[n] * running == 1


def test_p_polynomials():
    p = p_polynomials(6)
    assert p[0].coefficients == (1,)
    assert p[1].coefficients == (0, Fraction(1, 2))
    assert p[2].coefficients == (0, Fraction(1, 3), Fraction(1, 8))
    for n in range(7):
        assert p[n].degree == n
        assert p[n].leading == Fraction(1, 2**n * factorial(n))


def test_G_coefficient():
    assert G_coefficient(1, 2) == Fraction(2, 3) - 1
    assert G_coefficient(4, 2) == Fraction(47, 19440)
    with pytest.raises(ValueError):
        G_coefficient(0, 1)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(min_value=1, max_value=40),
    st.fractions(min_value=0, max_value=3, max_denominator=1000),
    st.fractions(min_value=Fraction(1, 1000), max_value=1, max_denominator=1000),
)
def test_G_coefficient_decreases_in_alpha(n, alpha, delta):
    assert G_coefficient(n, alpha + delta) < G_coefficient(n, alpha)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(max_denominator=10**6), min_size=0, max_size=30))
def test_binomial_transform_is_involution(seq):
    assert binomial_transform(binomial_transform(seq)) == seq


def test_moment_table_rows():
    table = moment_table(5)
    rows = list(table.rows())
    assert len(rows) == 6
    assert rows[0] == (0, 1, 1, 1, 1)
    assert rows[5][3] == Fraction(1465, 3402)
    with pytest.raises(ValueError):
        moment_table(-1)
