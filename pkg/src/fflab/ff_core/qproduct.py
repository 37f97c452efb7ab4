"""q-Pochhammer products, exact for finite length and certified when infinite."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from decimal import Decimal, localcontext


@dataclass(frozen=True)
class BoundedValue:
    """An exact rational approximation together with a rigorous error bound."""

    value: Fraction
    error: Fraction

    def __post_init__(self):
        object.__setattr__(self, "error", round_up(self.error))

    def __float__(self):
        return float(self.value)

    def contains(self, x) -> bool:
        return abs(Fraction(x) - self.value) <= self.error

    @property
    def interval(self):
        return self.value - self.error, self.value + self.error

    def decimal(self, digits: int = 30) -> str:
        return fraction_to_decimal(self.value, digits)


def round_up(x) -> Fraction:
    """A short dyadic rational >= x (used to keep error bounds readable)."""
    x = Fraction(x)
    if x <= 0:
        return Fraction(0)
    f = float(x)
    if Fraction(f) < x:
        f = math.nextafter(f, math.inf)
    return Fraction(f)


def fraction_to_decimal(x: Fraction, digits: int = 30) -> str:
    x = Fraction(x)
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(x.numerator) / Decimal(x.denominator))


def terms_for_tolerance(x: Fraction, tol: float) -> int:
    """Smallest K with x^(K+1)/(1-x) <= tol, the tail bound after K factors."""
    x = Fraction(x)
    tol = Fraction(tol)
    k = 0
    while x ** (k + 1) / (1 - x) > tol:
        k += 1
    return k


def q_pochhammer(x, m=None, tol: float = 1e-12):
    """prod_{i=1}^m (1 - x^i).

    With finite m the product is returned as an exact Fraction.  With
    m=None (or math.inf) the infinite product for 0 <= x < 1 is returned as a
    BoundedValue: the truncation after K factors, with error at most
    P_K * x^(K+1)/(1-x) since prod_{i>K}(1-x^i) >= 1 - sum_{i>K} x^i.
    """
    x = Fraction(x)
    if m is not None and m != math.inf:
        if m < 0:
            raise ValueError("length must be non-negative")
        out = Fraction(1)
        xi = Fraction(1)
        for _ in range(int(m)):
            xi *= x
            out *= 1 - xi
        return out
    if not 0 <= x < 1:
        raise ValueError("infinite product needs 0 <= x < 1")
    if x == 0:
        return BoundedValue(Fraction(1), Fraction(0))
    k = terms_for_tolerance(x, tol)
    head = q_pochhammer(x, k)
    return BoundedValue(head, head * x ** (k + 1) / (1 - x))
