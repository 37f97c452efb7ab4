"""Univariate polynomials over F_p and the fields F_p[x]/(phi)."""
from __future__ import annotations

from .field import FieldElement, PrimeModulus, mobius, prime_factors


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class PolyOverFp:
    """Immutable polynomial, coefficients stored lowest degree first.

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs, modulus: PrimeModulus | int):
        if not isinstance(modulus, PrimeModulus):
            modulus = PrimeModulus(modulus)
        p = modulus.p
        self.modulus = modulus
        self.coeffs = _trim(int(c) % p for c in coeffs)

    # constructors
    @classmethod
    def x(cls, modulus):
        return cls([0, 1], modulus)

    @classmethod
    def constant(cls, c, modulus):
        return cls([c], modulus)

    @classmethod
    def from_string(cls, s: str, modulus):
        """Parse the comma separated lowest-first form, e.g. ``"1,0,1"``."""
        s = s.strip()
        if not s:
            return cls([], modulus)
        return cls([int(t) for t in s.split(",")], modulus)

    def __str__(self):
        return ",".join(str(c) for c in self.coeffs) if self.coeffs else "0"

    def __repr__(self):
        return f"PolyOverFp([{str(self)}], p={self.modulus.p})"

    @property
    def p(self):
        return self.modulus.p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def coefficients(self) -> list[FieldElement]:
        return [FieldElement(c, self.modulus) for c in self.coeffs]

    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self):
        return not self.coeffs

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def monic(self) -> "PolyOverFp":
        if not self.coeffs:
            raise ZeroDivisionError("zero polynomial has no monic form")
        inv = pow(self.coeffs[-1], -1, self.p)
        return PolyOverFp([c * inv for c in self.coeffs], self.modulus)

    def _same(self, other):
        if isinstance(other, int):
            return PolyOverFp([other], self.modulus)
        if not isinstance(other, PolyOverFp):
            return None
        if other.modulus.p != self.modulus.p:
            raise ValueError("polynomials over different fields")
        return other

    def __eq__(self, other):
        o = self._same(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.p))

    def __add__(self, other):
        o = self._same(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        n = max(len(a), len(b))
        return PolyOverFp([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                           for i in range(n)], self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return PolyOverFp([-c for c in self.coeffs], self.modulus)

    def __sub__(self, other):
        o = self._same(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._same(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return PolyOverFp([], self.modulus)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return PolyOverFp(out, self.modulus)

    __rmul__ = __mul__

    def __divmod__(self, other):
        o = self._same(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.coeffs)
        db = o.degree
        inv = pow(o.coeffs[-1], -1, p)
        q = [0] * max(len(r) - db, 0)
        for k in range(len(r) - 1 - db, -1, -1):
            c = r[k + db] * inv % p
            q[k] = c
            if c:
                for j, bj in enumerate(o.coeffs):
                    r[k + j] = (r[k + j] - c * bj) % p
        return PolyOverFp(q, self.modulus), PolyOverFp(r[:db], self.modulus)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __call__(self, x):
        """Evaluate at an int or FieldElement (Horner)."""
        p = self.p
        v = int(x) % p
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * v + c) % p
        return FieldElement(acc, self.modulus)

    def powmod(self, e: int, f: "PolyOverFp") -> "PolyOverFp":
        result = PolyOverFp([1], self.modulus) % f
        base = self % f
        while e:
            if e & 1:
                result = (result * base) % f
            e >>= 1
            if e:
                base = (base * base) % f
        return result

    def gcd(self, other: "PolyOverFp") -> "PolyOverFp":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def xgcd(self, other):
        """Return (g, s, t) with s*self + t*other = g, g monic."""
        r0, r1 = self, other
        s0, s1 = PolyOverFp([1], self.modulus), PolyOverFp([], self.modulus)
        t0, t1 = s1, s0
        while not r1.is_zero():
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0.is_zero():
            return r0, s0, t0
        inv = pow(r0.lead(), -1, self.p)
        return r0 * inv, s0 * inv, t0 * inv


def is_irreducible(f: PolyOverFp) -> bool:
    """Rabin's test; f must be monic."""
    if not f.is_monic():
        raise ValueError("irreducibility test expects a monic polynomial")
    d = f.degree
    if d < 1:
        return False
    if d == 1:
        return True
    p = f.p
    x = PolyOverFp.x(f.modulus)
    # frob[k] = x^(p^k) mod f
    frob = [x % f]
    for _ in range(d):
        frob.append(frob[-1].powmod(p, f))
    if frob[d] != x % f:
        return False
    for ell in prime_factors(d):
        g = (frob[d // ell] - x).gcd(f)
        if g.degree != 0:
            return False
    return True


def irreducible_count(q: int, d: int) -> int:
    """Number of monic irreducible polynomials of degree d over F_q."""
    if d < 1:
        raise ValueError("degree must be positive")
    total = sum(mobius(e) * q ** (d // e) for e in range(1, d + 1) if d % e == 0)
    return total // d


def monic_irreducibles(modulus, d: int):
    """All monic irreducible polynomials of degree d (brute force, small p^d)."""
    if not isinstance(modulus, PrimeModulus):
        modulus = PrimeModulus(modulus)
    p = modulus.p
    out = []
    for idx in range(p**d):
        c = []
        for _ in range(d):
            c.append(idx % p)
            idx //= p
        f = PolyOverFp(c + [1], modulus)
        if is_irreducible(f):
            out.append(f)
    return out


class ExtensionField:
    """F_q = F_p[x]/(phi) with phi monic irreducible; elements are reduced polys."""

    def __init__(self, phi: PolyOverFp):
        if not phi.is_monic() or not is_irreducible(phi):
            raise ValueError(f"{phi} is not monic irreducible over F_{phi.p}")
        self.phi = phi
        self.modulus = phi.modulus
        self.p = phi.p
        self.degree = phi.degree
        self.q = self.p**self.degree

    def __repr__(self):
        return f"ExtensionField(p={self.p}, phi=[{self.phi}])"

    def __eq__(self, other):
        return isinstance(other, ExtensionField) and self.phi == other.phi

    def __hash__(self):
        return hash(self.phi)

    def element(self, c) -> PolyOverFp:
        if isinstance(c, int):
            c = [c]
        return PolyOverFp(c, self.modulus) % self.phi

    def generator(self) -> PolyOverFp:
        """The class of x, a root of phi in F_q."""
        return PolyOverFp.x(self.modulus) % self.phi

    def add(self, a, b):
        return (a + b) % self.phi

    def sub(self, a, b):
        return (a - b) % self.phi

    def mul(self, a, b):
        return (a * b) % self.phi

    def inv(self, a: PolyOverFp) -> PolyOverFp:
        if (a % self.phi).is_zero():
            raise ZeroDivisionError("zero has no inverse")
        g, s, _ = a.xgcd(self.phi)
        return s % self.phi

    def vector(self, a: PolyOverFp) -> list[int]:
        """Fixed-length coefficient vector of a reduced element."""
        c = list((a % self.phi).coeffs)
        return c + [0] * (self.degree - len(c))
