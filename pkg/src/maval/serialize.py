"""JSON helpers: exact rationals as "p/q" strings, floats as shortest round-trip repr."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .exact_poly import Gaussian, coeff_str, parse_coeff


def rat(x) -> str:
    if isinstance(x, Gaussian):
        return coeff_str(x)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        v = parse_coeff(s)
        if isinstance(v, Gaussian):
            raise ValueError(f"expected a real rational, got {s!r}")
        return v
    raise ValueError(f"expected a rational string, got {s!r}")


def num(x):
    """JSON-ready scalar: exact values as strings, floats as floats, complex as [re, im]."""
    if isinstance(x, (Fraction, int, Gaussian)) and not isinstance(x, bool):
        return rat(x)
    if isinstance(x, complex):
        return [float(x.real), float(x.imag)]
    return float(x)


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def spec_hash(obj) -> str:
    return hashlib.sha256(canonical_dumps(obj).encode()).hexdigest()
