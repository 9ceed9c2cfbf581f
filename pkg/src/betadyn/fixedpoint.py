"""Binary fixed-point arithmetic on Python integers.

A real number ``v`` is held as the integer ``round(v * 2**bits)``.  The
iterated maps only ever multiply by beta and subtract 1/2, so the only
rounding is a single truncation per multiplication; with ``bits`` large
enough every orbit point is exact to the last few units.

Floats are converted through their shortest decimal representation, so
``1.8`` means 9/5 rather than the nearest binary double.  This matches the
way parameter values are written down in tables.
"""

from fractions import Fraction
import math

DEFAULT_BITS = 128


def as_fraction(v):
    """Exact rational for ``v``; floats are read via ``repr``."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(repr(float(v)))


def to_fixed(v, bits=DEFAULT_BITS):
    f = as_fraction(v) * (1 << bits)
    return f.numerator // f.denominator


def to_float(X, bits=DEFAULT_BITS):
    return float(Fraction(X, 1 << bits))


def bits_for_orbit(beta, n, floor=DEFAULT_BITS, guard=64):
    """Precision that keeps an ``n``-step orbit of slope ``beta`` exact."""
    need = guard + int(math.ceil(n * math.log2(max(float(beta), 1.0 + 1e-12))))
    return max(floor, need)


def shift_orbit(beta, x, n, bits=DEFAULT_BITS, rule="strict_less"):
    """Integer orbit x, T(x), ..., T^n(x) of the beta shift.

    ``rule`` selects the boundary convention at 1/2 (see ``core_maps``).
    """
    B = to_fixed(beta, bits)
    H = 1 << (bits - 1)
    X = to_fixed(x, bits)
    out = [X]
    for _ in range(n):
        if X < H or (rule == "less_equal" and X == H):
            X = (B * X) >> bits
        else:
            X = (B * (X - H)) >> bits
        out.append(X)
    return out
