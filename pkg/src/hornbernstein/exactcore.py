"""Exact rational arithmetic, dense rational polynomials and Sturm root isolation.

Rationals are plain :class:`fractions.Fraction` values. Everything here is exact;
no floating point value is ever consulted when deciding a sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import mpmath

BigRational = Fraction

__all__ = [
    "BigRational",
    "RationalPolynomial",
    "as_rational",
    "format_rational",
    "parse_rational",
    "poly_eval",
    "poly_derivative",
    "sturm_sequence",
    "count_roots",
    "squarefree_part",
    "isolate_positive_roots",
    "refine_root",
]


def as_rational(x) -> Fraction:
    """Convert ``x`` to an exact Fraction.

    Floats go through their shortest repr, so ``0.985`` becomes ``197/200``
    rather than the binary double closest to it. mpmath numbers are converted
    exactly from their binary representation.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(x))
    if isinstance(x, Decimal):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        if exp is None:  # pragma: no cover - mpmath special values
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(man) * Fraction(2) ** exp
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, ``"0.985"`` or ``"1e-5"`` exactly."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def format_rational(x: Fraction) -> str:
    """Canonical ``"numerator/denominator"`` string (denominator always shown)."""
    return f"{x.numerator}/{x.denominator}"


def _trim(coeffs: Iterable) -> tuple[Fraction, ...]:
    c = [as_rational(v) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class RationalPolynomial:
    """Dense polynomial; ``coefficients[k]`` multiplies ``var**k``.

    Trailing zeros are stripped on construction, so the zero polynomial has an
    empty coefficient tuple and ``degree == -1``.
    """

    coefficients: tuple[Fraction, ...]
    variable_name: str = "x"

    def __init__(self, coefficients: Iterable = (), variable_name: str = "x"):
        object.__setattr__(self, "coefficients", _trim(coefficients))
        object.__setattr__(self, "variable_name", variable_name)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> Fraction:
        return self.coefficients[-1] if self.coefficients else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coefficients

    def __call__(self, x) -> Fraction:
        return poly_eval(self, as_rational(x))

    def __len__(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coefficients):
            return self.coefficients[k]
        return Fraction(0)

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        n = max(len(self), len(other))
        return RationalPolynomial((self[k] + other[k] for k in range(n)), self.variable_name)

    def __sub__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        n = max(len(self), len(other))
        return RationalPolynomial((self[k] - other[k] for k in range(n)), self.variable_name)

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial((-c for c in self.coefficients), self.variable_name)

    def __mul__(self, other) -> "RationalPolynomial":
        if not isinstance(other, RationalPolynomial):
            k = as_rational(other)
            return RationalPolynomial((k * c for c in self.coefficients), self.variable_name)
        if self.is_zero() or other.is_zero():
            return RationalPolynomial((), self.variable_name)
        out = [Fraction(0)] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coefficients):
            if a:
                for j, b in enumerate(other.coefficients):
                    out[i + j] += a * b
        return RationalPolynomial(out, self.variable_name)

    __rmul__ = __mul__

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        v = self.variable_name
        parts = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            mono = "" if k == 0 else (v if k == 1 else f"{v}^{k}")
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def poly_eval(p: RationalPolynomial, x: Fraction) -> Fraction:
    """Exact Horner evaluation."""
    x = as_rational(x)
    acc = Fraction(0)
    for c in reversed(p.coefficients):
        acc = acc * x + c
    return acc


def poly_derivative(p: RationalPolynomial) -> RationalPolynomial:
    return RationalPolynomial(
        (k * c for k, c in enumerate(p.coefficients) if k), p.variable_name
    )


# -- integer polynomial kernel ---------------------------------------------
#
# Sturm sequences over Q explode in denominator size.  Internally every
# polynomial is scaled by a positive constant to a primitive integer
# polynomial; positive scaling never changes a sign, so the counts are exact.


def _primitive(coeffs: Sequence[int]) -> list[int]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    g = 0
    for v in c:
        g = math.gcd(g, v)
        if g == 1:
            return c
    if g > 1:
        c = [v // g for v in c]
    return c


def _to_primitive_int(p: RationalPolynomial) -> list[int]:
    lcm = 1
    for c in p.coefficients:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    return _primitive([int(c * lcm) for c in p.coefficients])


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Remainder of ``|lc(b)|**k * a`` divided by ``b`` (positive multiplier)."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    sb = 1 if lb > 0 else -1
    alb = abs(lb)
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        lr = r[-1]
        # r <- |lb| r - sign(lb) lr x^shift b
        r = [alb * v for v in r]
        f = sb * lr
        for i, bv in enumerate(b):
            r[i + shift] -= f * bv
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return r


def _int_derivative(a: list[int]) -> list[int]:
    return [k * a[k] for k in range(1, len(a))]


def _int_sturm(a: list[int]) -> list[list[int]]:
    seq = [a]
    d = _int_derivative(a)
    if not _primitive(d):
        return seq
    seq.append(_primitive(d))
    while True:
        r = _prem(seq[-2], seq[-1])
        if not r:
            break
        seq.append(_primitive([-v for v in r]))
    return seq


def _int_gcd(a: list[int], b: list[int]) -> list[int]:
    a, b = _primitive(a), _primitive(b)
    while b:
        a, b = b, _primitive(_prem(a, b))
    if a and a[-1] < 0:
        a = [-v for v in a]
    return a


def _int_exact_div(a: list[int], b: list[int]) -> list[Fraction]:
    r = [Fraction(v) for v in a]
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    for k in range(len(q) - 1, -1, -1):
        f = r[k + len(b) - 1] / b[-1]
        q[k] = f
        for i, bv in enumerate(b):
            r[k + i] -= f * bv
    if any(r):  # pragma: no cover - guarded by construction
        raise ArithmeticError("inexact polynomial division")
    return q


def _int_eval_sign(a: list[int], x: Fraction) -> int:
    num, den = x.numerator, x.denominator
    # den**n * a(num/den), an integer with the same sign as a(x)
    acc = 0
    dpow = 1
    for c in reversed(a):
        acc = acc * num + c * dpow
        dpow *= den
    return (acc > 0) - (acc < 0)


def _sign_changes(signs: Iterable[int]) -> int:
    last = 0
    changes = 0
    for s in signs:
        if s == 0:
            continue
        if last and s != last:
            changes += 1
        last = s
    return changes


def _variations_at(seq: list[list[int]], x: Fraction | None) -> int:
    if x is None:  # +infinity
        return _sign_changes((1 if q[-1] > 0 else -1) for q in seq)
    return _sign_changes(_int_eval_sign(q, x) for q in seq)


def sturm_sequence(p: RationalPolynomial) -> list[RationalPolynomial]:
    """Sturm sequence of ``p``, each member rescaled by a positive constant."""
    if p.is_zero():
        raise ValueError("Sturm sequence of the zero polynomial")
    return [RationalPolynomial(q, p.variable_name) for q in _int_sturm(_to_primitive_int(p))]


def squarefree_part(p: RationalPolynomial) -> RationalPolynomial:
    """``p / gcd(p, p')`` up to a positive constant factor."""
    if p.is_zero():
        raise ValueError("square-free part of the zero polynomial")
    a = _to_primitive_int(p)
    if len(a) <= 2:
        return RationalPolynomial(a, p.variable_name)
    g = _int_gcd(a, _int_derivative(a))
    if len(g) == 1:
        return RationalPolynomial(a, p.variable_name)
    q = _int_exact_div(a, g)
    return RationalPolynomial(q, p.variable_name)


def count_roots(p: RationalPolynomial, a: Fraction, b: Fraction | None = None) -> int:
    """Number of distinct real roots of ``p`` in ``(a, b]`` (``b=None`` is +inf)."""
    seq = _int_sturm(_to_primitive_int(p))
    return _variations_at(seq, as_rational(a)) - _variations_at(seq, None if b is None else as_rational(b))


def _root_bound(a: list[int]) -> Fraction:
    """Smallest power of two B with sum_{k<n} |a_k| B^k < |a_n| B^n."""
    lead = abs(a[-1])
    n = len(a) - 1
    b = Fraction(1)
    while sum(abs(c) * b**k for k, c in enumerate(a[:-1])) >= lead * b**n:
        b *= 2
    return b


def _strip_zero_roots(a: list[int]) -> list[int]:
    k = 0
    while k < len(a) - 1 and a[k] == 0:
        k += 1
    return a[k:]


def isolate_positive_roots(p: RationalPolynomial) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals, one per distinct positive real root of ``p``.

    Each interval ``(lo, hi)`` contains exactly one root. A degenerate interval
    ``(r, r)`` means the root ``r`` itself was hit exactly. Intervals are
    isolating for the square-free part of ``p``, whose values at the two
    endpoints of a non-degenerate interval have opposite signs.
    """
    if p.is_zero():
        raise ValueError("isolate_positive_roots: zero polynomial")
    sf = _strip_zero_roots(_to_primitive_int(squarefree_part(p)))
    if len(sf) <= 1:
        return []
    seq = _int_sturm(sf)
    v0 = _variations_at(seq, Fraction(0))
    vinf = _variations_at(seq, None)
    if v0 == vinf:
        return []
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(Fraction(0), _root_bound(sf), v0)]
    while stack:
        lo, hi, vlo = stack.pop()
        vhi = _variations_at(seq, hi)
        n = vlo - vhi
        if n == 0:
            continue
        if n == 1:
            if _int_eval_sign(sf, hi) == 0:
                out.append((hi, hi))
            else:
                out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        vmid = _variations_at(seq, mid)
        stack.append((mid, hi, vmid))
        stack.append((lo, mid, vlo))
    out.sort()
    return out


def refine_root(
    p: RationalPolynomial, lo: Fraction, hi: Fraction, width: Fraction
) -> tuple[Fraction, Fraction]:
    """Shrink an isolating interval of a simple root of ``p`` below ``width``.

    ``p`` should be square-free on ``[lo, hi]`` (as returned by
    :func:`isolate_positive_roots` applied to :func:`squarefree_part`).
    """
    lo, hi, width = as_rational(lo), as_rational(hi), as_rational(width)
    a = _to_primitive_int(p)
    slo = _int_eval_sign(a, lo)
    if slo == 0:
        return lo, lo
    if _int_eval_sign(a, hi) == 0:
        return hi, hi
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = _int_eval_sign(a, mid)
        if sm == 0:
            return mid, mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi
