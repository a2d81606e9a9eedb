"""Certified real arithmetic on interval enclosures.

HighReal values are mpmath interval numbers (outward-rounded endpoints) at a
working precision of 120 bits, comfortably past 30 significant digits. Every
comparison that decides a check goes through the three-way helpers here and
returns "pass", "fail", or "indeterminate"; a straddling enclosure is never
silently coerced to a boolean. Width is always available for reporting.
"""

from fractions import Fraction

import mpmath
from mpmath import iv

PREC_BITS = 120
iv.prec = PREC_BITS

# The interval number type, used in annotations elsewhere.
HighReal = type(iv.mpf(0))

PASS = "pass"
FAIL = "fail"
INDETERMINATE = "indeterminate"


def enc(x) -> HighReal:
    """Enclose x. Ints are exact up to 1 ulp outward; Fractions via num/den."""
    if isinstance(x, HighReal):
        return x
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / iv.mpf(x.denominator)
    return iv.mpf(x)


def lower(x) -> mpmath.mpf:
    return mpmath.mpf(enc(x).a)


def upper(x) -> mpmath.mpf:
    return mpmath.mpf(enc(x).b)


def midpoint(x) -> mpmath.mpf:
    return mpmath.mpf(enc(x).mid)


def width(x) -> mpmath.mpf:
    return mpmath.mpf(enc(x).delta)


def contains(x, value) -> bool:
    """True when the enclosure of x contains the exact rational `value`."""
    x = enc(x)
    if isinstance(value, Fraction):
        lo = mpmath.mpf(x.a) * value.denominator
        hi = mpmath.mpf(x.b) * value.denominator
        return lo <= value.numerator <= hi
    return mpmath.mpf(x.a) <= value <= mpmath.mpf(x.b)


def log(x) -> HighReal:
    return iv.log(enc(x))


def exp(x) -> HighReal:
    return iv.exp(enc(x))


def sqrt(x) -> HighReal:
    return iv.sqrt(enc(x))


def root(x, k: int) -> HighReal:
    """k-th root of a positive enclosure via exp(log(x)/k); exact-int k."""
    return iv.exp(iv.log(enc(x)) / k)


def log2() -> HighReal:
    return iv.log(iv.mpf(2))


def le_status(lhs, rhs) -> str:
    """Certify lhs <= rhs: pass/fail only when every point pair agrees."""
    lhs, rhs = enc(lhs), enc(rhs)
    if mpmath.mpf(lhs.b) <= mpmath.mpf(rhs.a):
        return PASS
    if mpmath.mpf(lhs.a) > mpmath.mpf(rhs.b):
        return FAIL
    return INDETERMINATE


def lt_status(lhs, rhs) -> str:
    """Certify lhs < rhs strictly."""
    lhs, rhs = enc(lhs), enc(rhs)
    if mpmath.mpf(lhs.b) < mpmath.mpf(rhs.a):
        return PASS
    if mpmath.mpf(lhs.a) >= mpmath.mpf(rhs.b):
        return FAIL
    return INDETERMINATE


def ge_status(lhs, rhs) -> str:
    return le_status(rhs, lhs)


def gt_status(lhs, rhs) -> str:
    return lt_status(rhs, lhs)


def is_positive(x) -> str:
    return gt_status(x, iv.mpf(0))


def floor_exact(x) -> int:
    """Floor of an enclosure, when unambiguous."""
    x = enc(x)
    lo = int(mpmath.floor(mpmath.mpf(x.a)))
    hi = int(mpmath.floor(mpmath.mpf(x.b)))
    if lo != hi:
        raise IndeterminateFloor(x)
    return lo


def ceil_exact(x) -> int:
    """Ceiling of an enclosure, when unambiguous."""
    x = enc(x)
    lo = int(mpmath.ceil(mpmath.mpf(x.a)))
    hi = int(mpmath.ceil(mpmath.mpf(x.b)))
    if lo != hi:
        raise IndeterminateFloor(x)
    return lo


class IndeterminateFloor(Exception):
    """Enclosure straddles an integer; retry at higher precision."""


def resolve_int(compute, rounder, max_prec: int = 640) -> int:
    """Evaluate rounder(compute()) with escalating precision until unambiguous.

    `compute` must rebuild its enclosure from exact inputs each call so the
    tighter precision actually helps.
    """
    from .errors import IndeterminateError

    saved = iv.prec
    try:
        prec = saved
        while prec <= max_prec:
            iv.prec = prec
            try:
                return rounder(compute())
            except IndeterminateFloor:
                prec *= 2
        raise IndeterminateError(
            "enclosure still straddles an integer at %d bits" % max_prec)
    finally:
        iv.prec = saved


def fmt(x, digits: int = 24) -> str:
    """Decimal string of the midpoint, for serialization."""
    return mpmath.nstr(midpoint(x), digits)


def fmt_width(x) -> str:
    return mpmath.nstr(width(x), 6)
