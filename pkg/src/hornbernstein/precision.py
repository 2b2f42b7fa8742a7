"""Arbitrary-precision reals carrying an absolute error bound."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import mpmath
from mpmath import mpf

from .exactcore import as_rational

__all__ = [
    "DomainError",
    "PrecisionError",
    "EvalRequest",
    "PrecisionReal",
    "default_digits",
]


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class PrecisionError(ArithmeticError):
    """The requested accuracy could not be reached within the given budget."""


def default_digits() -> int:
    raw = os.environ.get("HB_PRECISION_DEFAULT")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            value = 0
        if value >= 1:
            return value
    return 20


@dataclass(frozen=True)
class EvalRequest:
    precision_digits: int = 20
    max_terms: Optional[int] = None
    quadrature_level: Optional[int] = None

    def __post_init__(self):
        if self.precision_digits < 1:
            raise ValueError("precision_digits must be >= 1")
        if self.max_terms is not None and self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if self.quadrature_level is not None and self.quadrature_level < 1:
            raise ValueError("quadrature_level must be >= 1")

    @property
    def working_digits(self) -> int:
        # 15 guard digits on top of the request
        return self.precision_digits + 15

    @property
    def tolerance(self) -> mpf:
        return mpf(10) ** (-self.precision_digits)

    def doubled(self) -> "EvalRequest":
        return EvalRequest(2 * self.precision_digits, self.max_terms, self.quadrature_level)


def _up(x) -> mpf:
    # one extra ulp of slack: error bounds are rounded outward
    x = mpf(x)
    return abs(x) * (1 + mpf(2) ** (4 - mpmath.mp.prec))


@dataclass(frozen=True)
class PrecisionReal:
    """``value`` with ``|value - true| <= abs_error``."""

    value: mpf
    abs_error: mpf
    working_digits: int

    def __post_init__(self):
        # never re-round an mpf to the ambient precision
        with mpmath.workdps(max(self.working_digits, mpmath.mp.dps)):
            value = self.value if isinstance(self.value, mpf) else mpmath.mpmathify(self.value)
            err = self.abs_error if isinstance(self.abs_error, mpf) else mpmath.mpmathify(self.abs_error)
        object.__setattr__(self, "value", value)
        if not mpmath.isfinite(err) or err < 0:
            raise ValueError(f"abs_error must be finite and nonnegative, got {err}")
        object.__setattr__(self, "abs_error", err)

    @classmethod
    def exact(cls, x, working_digits: int = 30) -> "PrecisionReal":
        """Round a rational (or mpf) to ``working_digits`` with its rounding error."""
        with mpmath.workdps(working_digits):
            if isinstance(x, mpf):
                return cls(+x, abs(x - +x), working_digits)
            x = as_rational(x)
            v = mpf(x.numerator) / x.denominator
            err = mpf(0) if as_rational(v) == x else abs(v) * mpf(2) ** (1 - mpmath.mp.prec)
        return cls(v, err, working_digits)

    @property
    def lower(self) -> mpf:
        return mpmath.fsub(self.value, self.abs_error, dps=self.working_digits + 5, rounding="d")

    @property
    def upper(self) -> mpf:
        return mpmath.fadd(self.value, self.abs_error, dps=self.working_digits + 5, rounding="u")

    def contains(self, x) -> bool:
        with mpmath.workdps(self.working_digits + 5):
            x = mpmath.mpmathify(x)
        return self.lower <= x <= self.upper

    def overlaps(self, other: "PrecisionReal") -> bool:
        gap = abs(mpmath.fsub(self.value, other.value, exact=True))
        return gap <= mpmath.fadd(self.abs_error, other.abs_error, exact=True)

    def is_positive(self) -> bool:
        return self.lower > 0

    def is_negative(self) -> bool:
        return self.upper < 0

    def _digits(self, other) -> int:
        if isinstance(other, PrecisionReal):
            return min(self.working_digits, other.working_digits)
        return self.working_digits

    def _coerce(self, other) -> "PrecisionReal":
        # plain numbers take this operand's precision rather than the ambient one
        if isinstance(other, PrecisionReal):
            return other
        return PrecisionReal.exact(other, self.working_digits)

    def __neg__(self) -> "PrecisionReal":
        return PrecisionReal(mpmath.fneg(self.value, exact=True), self.abs_error, self.working_digits)

    def __add__(self, other) -> "PrecisionReal":
        o = self._coerce(other)
        d = self._digits(other)
        with mpmath.workdps(d):
            v = self.value + o.value
            err = self.abs_error + o.abs_error + _up(v) * mpf(2) ** (1 - mpmath.mp.prec)
        return PrecisionReal(v, err, d)

    __radd__ = __add__

    def __sub__(self, other) -> "PrecisionReal":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PrecisionReal":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "PrecisionReal":
        o = self._coerce(other)
        d = self._digits(other)
        with mpmath.workdps(d):
            v = self.value * o.value
            err = (
                abs(self.value) * o.abs_error
                + abs(o.value) * self.abs_error
                + self.abs_error * o.abs_error
                + _up(v) * mpf(2) ** (1 - mpmath.mp.prec)
            )
        return PrecisionReal(v, err, d)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PrecisionReal":
        o = self._coerce(other)
        d = self._digits(other)
        if abs(o.value) <= o.abs_error:
            raise ZeroDivisionError("divisor interval contains zero")
        with mpmath.workdps(d):
            v = self.value / o.value
            # |a/b - A/B| <= (|a-A| + |A/B| |b-B|) / (|B| - |b-B|)
            err = (self.abs_error + abs(v) * o.abs_error) / (abs(o.value) - o.abs_error)
            err += _up(v) * mpf(2) ** (1 - mpmath.mp.prec)
        return PrecisionReal(v, err, d)

    def __rtruediv__(self, other) -> "PrecisionReal":
        return self._coerce(other) / self

    def __float__(self) -> float:
        return float(self.value)

    def to_string(self, digits: Optional[int] = None) -> str:
        digits = digits or self.working_digits
        return mpmath.nstr(self.value, digits, strip_zeros=False)

    def error_string(self) -> str:
        return mpmath.nstr(self.abs_error, 3)

    def __str__(self) -> str:
        return f"{self.to_string()} +/- {self.error_string()}"
