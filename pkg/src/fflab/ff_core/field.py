"""Prime moduli and scalar field elements."""
from __future__ import annotations

from dataclasses import dataclass, field

# Deterministic Miller-Rabin witness set, valid for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

MAX_PRIME = 2**61


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n by trial division (n is small here)."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def mobius(n: int) -> int:
    res = 1
    f = 2
    while f * f <= n:
        if n % f == 0:
            n //= f
            if n % f == 0:
                return 0
            res = -res
        f += 1
    if n > 1:
        res = -res
    return res


@dataclass(frozen=True)
class PrimeModulus:
    """A prime p with cached constants for vectorised reduction.

    ``lazy_terms`` is how many products of two residues can be summed in a
    signed 64-bit accumulator before a reduction is required; numpy kernels
    use it to postpone ``% p``.  Primes of 2**31 and above fall back to
    Python integers (object arrays), so nothing overflows silently.
    """

    p: int
    lazy_terms: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p = self.p
        if not isinstance(p, int) or isinstance(p, bool):
            raise TypeError("modulus must be an int")
        if p > MAX_PRIME or not is_prime(p):
            raise ValueError(f"{p} is not a prime below 2**61")
        sq = (p - 1) ** 2 or 1
        object.__setattr__(self, "lazy_terms", (2**63 - 1 - p) // sq)

    @property
    def native(self) -> bool:
        """True when residues and their pairwise products fit in int64."""
        return self.p < 2**31

    @property
    def dtype(self):
        import numpy as np
        return np.int64 if self.native else object

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    def __int__(self):
        return self.p

    def __str__(self):
        return str(self.p)


class FieldElement:
    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: PrimeModulus | int):
        if not isinstance(modulus, PrimeModulus):
            modulus = PrimeModulus(modulus)
        self.modulus = modulus
        self.value = int(value) % modulus.p

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.modulus.p != self.modulus.p:
                raise ValueError("elements of different fields")
            return other.value
        if isinstance(other, int):
            return other % self.modulus.p
        return NotImplemented

    def _new(self, v):
        return FieldElement(v, self.modulus)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def inv(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self._new(pow(self.value, -1, self.modulus.p))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * self._new(o).inv()

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return self._new(pow(self.value, e, self.modulus.p))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.modulus.p == other.modulus.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.modulus.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FieldElement({self.value}, {self.modulus.p})"

    def __str__(self):
        return str(self.value)
