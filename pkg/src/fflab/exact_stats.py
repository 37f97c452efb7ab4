"""Closed-form laws for random matrices over finite fields, in exact arithmetic.

Infinite products are returned as BoundedValue (exact truncation plus a
certified tail bound); everything else is an exact Fraction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ff_core import (BoundedValue, Partition, irreducible_count, partitions_of, prime_factors,
                      q_pochhammer)
from .ff_core.qproduct import terms_for_tolerance

DEFAULT_TOL = 1e-12
DEFAULT_SERIES_ORDER = 20


def _check_q(q):
    if not isinstance(q, int) or q < 2 or len(set(prime_factors(q))) != 1:
        raise ValueError("q must be a prime power")


def gl_order(n: int, q: int) -> int:
    """|GL(n, q)| = prod_{k=0}^{n-1} (q^n - q^k)."""
    _check_q(q)
    out = 1
    for k in range(n):
        out *= q**n - q**k
    return out


def uniform_rank_prob(n: int, q: int, k: int) -> Fraction:
    """P(rank = n - k) for a uniformly random n x n matrix over F_q."""
    _check_q(q)
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    x = Fraction(1, q)
    num = q_pochhammer(x, n) ** 2 / q_pochhammer(x, k)
    den = q ** (k * k) * q_pochhammer(x, k) * q_pochhammer(x, n - k)
    return num / den


def universal_corank_prob(p: int, d: int, tol: float = DEFAULT_TOL) -> BoundedValue:
    """Limiting probability of corank d: p^{-d^2} prod_{i>d}(1-p^-i) / prod_{i<=d}(1-p^-i)."""
    _check_q(p)
    if d < 0:
        raise ValueError("corank must be non-negative")
    x = Fraction(1, p)
    head = q_pochhammer(x, d)
    scale = 1 / (p ** (d * d) * head * head)
    inf = q_pochhammer(x, tol=tol / scale)
    return BoundedValue(inf.value * scale, inf.error * scale)


def cycle_index_weight(q: int, lam: Partition) -> Fraction:
    """c_lambda(q) = q^{sum_i (lambda'_i)^2} prod_i (1/q)_{m_i(lambda)}."""
    _check_q(q)
    if not lam.size:
        raise ValueError("the weight is defined for non-empty partitions")
    x = Fraction(1, q)
    out = Fraction(q ** lam.dual_square_sum())
    for m in lam.multiplicities().values():
        out *= q_pochhammer(x, m)
    return out


def cohen_lenstra_measure(q: int, lam: Partition, tol: float = DEFAULT_TOL) -> BoundedValue:
    """prod_{r>=1}(1 - q^-r) / c_lambda(q)."""
    c = cycle_index_weight(q, lam) if lam.size else Fraction(1)
    inf = q_pochhammer(Fraction(1, q), tol=tol * float(c))
    return BoundedValue(inf.value / c, inf.error / c)


def divisibility_limit(q: int, d: int, tol: float = DEFAULT_TOL) -> BoundedValue:
    """Limiting probability that a fixed degree-d irreducible divides the char. poly:
    1 - prod_{i>=1}(1 - q^{-i d})."""
    _check_q(q)
    if d < 1:
        raise ValueError("degree must be positive")
    inf = q_pochhammer(Fraction(1, q**d), tol=tol)
    return BoundedValue(1 - inf.value, inf.error)


@dataclass(frozen=True)
class RankLaw:
    """Corank distribution; exact for finite n, BoundedValue entries in the limit."""

    q: int
    n: int | None
    probs: dict = field(default_factory=dict)

    @property
    def mode(self):
        return "exact" if self.n is not None else "limit"


def rank_law(n: int, q: int) -> RankLaw:
    return RankLaw(q, n, {k: uniform_rank_prob(n, q, k) for k in range(n + 1)})


def universal_rank_law(p: int, max_corank: int = 5, tol: float = DEFAULT_TOL) -> RankLaw:
    return RankLaw(p, None, {d: universal_corank_prob(p, d, tol) for d in range(max_corank + 1)})


# ---------------------------------------------------------------- power series

class PowerSeries:
    """Truncated power series with Fraction coefficients, kept to degree ``order``."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order: int):
        c = [Fraction(x) for x in list(coeffs)[:order + 1]]
        c += [Fraction(0)] * (order + 1 - len(c))
        self.coeffs = c
        self.order = order

    @classmethod
    def one(cls, order):
        return cls([1], order)

    @classmethod
    def geometric(cls, order):
        """1/(1-u)."""
        return cls([1] * (order + 1), order)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __eq__(self, other):
        return isinstance(other, PowerSeries) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"PowerSeries({[str(c) for c in self.coeffs]})"

    def __add__(self, other):
        return PowerSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __sub__(self, other):
        return PowerSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries([c * other for c in self.coeffs], self.order)
        N = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (N + 1)
        for i in range(N + 1):
            if a[i]:
                for j in range(N + 1 - i):
                    if b[j]:
                        out[i + j] += a[i] * b[j]
        return PowerSeries(out, N)

    def reciprocal(self):
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("constant term is zero")
        N = self.order
        b = [Fraction(0)] * (N + 1)
        b[0] = 1 / a[0]
        for n in range(1, N + 1):
            s = sum((a[k] * b[n - k] for k in range(1, n + 1) if a[k]), Fraction(0))
            b[n] = -s / a[0]
        return PowerSeries(b, N)

    def __pow__(self, e: int):
        if e < 0:
            return self.reciprocal() ** (-e)
        result = PowerSeries.one(self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result


def unipotent_series(q: int, order: int, degree: int = 1) -> PowerSeries:
    """F_d(u) = 1 + sum_lambda u^{|lambda| d} / c_lambda(q^d), truncated at u^order."""
    c = [Fraction(0)] * (order + 1)
    c[0] = Fraction(1)
    qq = q**degree
    for size in range(1, order // degree + 1):
        c[size * degree] = sum((1 / cycle_index_weight(qq, lam) for lam in partitions_of(size)),
                               Fraction(0))
    return PowerSeries(c, order)


def cycle_index_product(q: int, N: int, include_x: bool = False) -> PowerSeries:
    """prod over monic irreducible phi of F_{deg phi}(u), truncated at u^N.

    With include_x False the factor for phi = x is left out (invertible matrices).
    """
    _check_q(q)
    out = PowerSeries.one(N)
    for d in range(1, N + 1):
        e = irreducible_count(q, d) - (1 if d == 1 and not include_x else 0)
        out = out * unipotent_series(q, N, d) ** e
    return out


def count_all_identity_check(q: int, N: int = DEFAULT_SERIES_ORDER, include_x: bool = False):
    """Compare the cycle-index product with its closed form.

    Without the phi = x factor the product must be 1/(1-u); with it the
    coefficient of u^n must be q^{n^2} / |GL(n, q)|.  Returns (ok, residual).
    """
    lhs = cycle_index_product(q, N, include_x)
    if include_x:
        rhs = PowerSeries([Fraction(q ** (n * n), gl_order(n, q)) for n in range(N + 1)], N)
    else:
        rhs = PowerSeries.geometric(N)
    resid = lhs - rhs
    return all(c == 0 for c in resid.coeffs), resid


def derangement_series(q: int, N: int = DEFAULT_SERIES_ORDER) -> PowerSeries:
    """Coefficient n is the fraction of GL(n, q) with no eigenvalue in F_q:
    F_1(u)^{1-q} / (1-u)."""
    _check_q(q)
    F1 = unipotent_series(q, N)
    return (F1.reciprocal() ** (q - 1)) * PowerSeries.geometric(N)


def fine_herstein_limit(q: int, tol: float = DEFAULT_TOL) -> BoundedValue:
    """(1 + sum_{i>=1} q^{i(i-1)} / |GL(i,q)|)^{1-q} with a certified tail."""
    _check_q(q)
    s = Fraction(0)
    i = 0
    while True:
        i += 1
        term = Fraction(q ** (i * (i - 1)), gl_order(i, q))
        s += term
        # later term ratios are at most q^i / (q^{i+1} - 1) < 1
        r = Fraction(q**i, q ** (i + 1) - 1)
        tail = term * r / (1 - r)
        if tail <= Fraction(tol) / (q * q):
            break
    hi = (1 + s) ** (1 - q)
    lo = (1 + s + tail) ** (1 - q)
    return BoundedValue(hi, hi - lo)


def unipotent_count_closed(q: int, i: int) -> Fraction:
    """q^{i(i-1)} / |GL(i,q)|, the u^i coefficient of F_1 in closed form."""
    return Fraction(q ** (i * (i - 1)), gl_order(i, q))
