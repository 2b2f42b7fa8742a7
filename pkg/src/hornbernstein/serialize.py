"""Canonical JSON output.

Rationals are written as "n/d" strings and reals as decimal strings with an
``abs_error`` next to them, so no value ever passes through a binary float
and re-serializing a parsed document reproduces it byte for byte.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import mpmath
from mpmath import mpf

from .exactcore import RationalPolynomial, format_rational
from .precision import PrecisionReal

__all__ = ["OutputEnvelope", "REFERENCE_VALUES", "to_jsonable", "dumps"]

# published reference values, reported next to computed results
REFERENCE_VALUES = {
    "beta_star": "2.18858634466175709765",
    "alpha_star": "2.29965644325346130332",
}


def _real(x: PrecisionReal) -> dict:
    return {
        "value": mpmath.nstr(x.value, x.working_digits, strip_zeros=False),
        "abs_error": mpmath.nstr(x.abs_error, 6),
        "working_digits": x.working_digits,
    }


def to_jsonable(obj: Any) -> Any:
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, PrecisionReal):
        return _real(obj)
    if isinstance(obj, mpf):
        return mpmath.nstr(obj, mpmath.mp.dps, strip_zeros=False)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, RationalPolynomial):
        return [format_rational(c) for c in obj.coefficients]
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class OutputEnvelope:
    command: str
    parameters: dict
    results: Any
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return dumps(self)
