"""Exact coefficient and moment sequences.

``rho`` are the Taylor coefficients of the reciprocal of
``sum (-1)^n 2 u^n / ((n+1)(n+2))``; from them come the moments ``s_n`` of the
density tau0(t) and, by a binomial transform, the moments ``t_n`` of
tau0(1-s).  All values are exact Fractions.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .exactcore import RationalPolynomial, as_rational

__all__ = [
    "MomentTable",
    "rho_coeffs",
    "s_moments",
    "t_moments",
    "binomial_transform",
    "a_sequence",
    "p_polynomials",
    "G_coefficient",
    "moment_table",
]


class _Prefix:
    """Thread-safe memoized prefix of a sequence defined by a recurrence."""

    def __init__(self, extend):
        self._values: list = []
        self._extend = extend
        self._lock = threading.Lock()

    def get(self, N: int) -> list:
        if N < 0:
            raise ValueError(f"index must be nonnegative, got {N}")
        with self._lock:
            while len(self._values) <= N:
                self._values.append(self._extend(self._values))
            return self._values[: N + 1]


def _next_rho(rho: list[Fraction]) -> Fraction:
    n = len(rho)
    if n == 0:
        return Fraction(1)
    acc = Fraction(0)
    for k in range(n):
        m = n - k
        term = rho[k] * Fraction(2, (m + 1) * (m + 2))
        acc += term if (m - 1) % 2 == 0 else -term
    return acc


_RHO = _Prefix(_next_rho)


def _next_s(s: list[Fraction]) -> Fraction:
    n = len(s)
    if n == 0:
        return Fraction(1)
    r = _RHO.get(n)[n]
    return s[-1] + (2 * r if n % 2 == 0 else -2 * r)


_S = _Prefix(_next_s)


def _next_t(t: list[Fraction]) -> Fraction:
    n = len(t)
    s = _S.get(n)
    return _binomial_term(s, n)


_T = _Prefix(_next_t)


def _binomial_term(seq: Sequence[Fraction], n: int) -> Fraction:
    acc = Fraction(0)
    for k in range(n + 1):
        c = comb(n, k)
        acc += c * seq[k] if k % 2 == 0 else -c * seq[k]
    return acc


def rho_coeffs(N: int) -> list[Fraction]:
    """rho_0 .. rho_N, with rho_0 = 1."""
    return _RHO.get(N)


def s_moments(N: int) -> list[Fraction]:
    """Moments of tau0: s_n = 1 + 2 sum_{k=1}^n (-1)^k rho_k."""
    return _S.get(N)


def t_moments(N: int) -> list[Fraction]:
    """Moments of tau0(1-s): the binomial transform of (s_n)."""
    return _T.get(N)


def binomial_transform(seq: Sequence) -> list[Fraction]:
    """result[n] = sum_k (-1)^k C(n,k) seq[k].  The map is an involution."""
    vals = [as_rational(v) for v in seq]
    return [_binomial_term(vals, n) for n in range(len(vals))]


def a_sequence(N: int) -> list[Fraction]:
    """a_0 = 1, a_n = 1/t_n - 1/t_{n-1}; partial sums reconstruct 1/t_n."""
    t = t_moments(N)
    return [Fraction(1)] + [1 / t[n] - 1 / t[n - 1] for n in range(1, N + 1)]


def p_polynomials(N: int) -> list[RationalPolynomial]:
    """p_0 .. p_N in the variable alpha.

    p_{n+1}(a) = a/(n+1) * sum_{k=0}^n (k+1)/(k+2) p_{n-k}(a).
    """
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    polys = [RationalPolynomial([1], "alpha")]
    for n in range(N):
        acc: list[Fraction] = []
        for k in range(n + 1):
            w = Fraction(k + 1, k + 2)
            for j, c in enumerate(polys[n - k].coefficients):
                if j >= len(acc):
                    acc.append(Fraction(0))
                acc[j] += w * c
        # multiply by alpha/(n+1): shift up one degree
        polys.append(RationalPolynomial([0] + [c / (n + 1) for c in acc], "alpha"))
    return polys


def G_coefficient(n: int, alpha) -> Fraction:
    """Coefficient of x^n in G_alpha: (t_n - alpha/(n+1)) / n!."""
    if n < 1:
        raise ValueError(f"G_coefficient needs n >= 1, got {n}")
    alpha = as_rational(alpha)
    return (t_moments(n)[n] - alpha / (n + 1)) / factorial(n)


@dataclass(frozen=True)
class MomentTable:
    N: int
    rho: tuple[Fraction, ...]
    s: tuple[Fraction, ...]
    t: tuple[Fraction, ...]
    a: tuple[Fraction, ...]

    def rows(self):
        for n in range(self.N + 1):
            yield n, self.rho[n], self.s[n], self.t[n], self.a[n]


def moment_table(N: int) -> MomentTable:
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    return MomentTable(
        N=N,
        rho=tuple(rho_coeffs(N)),
        s=tuple(s_moments(N)),
        t=tuple(t_moments(N)),
        a=tuple(a_sequence(N)),
    )
