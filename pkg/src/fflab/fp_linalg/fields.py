"""Vectorised scalar operations used by the elimination kernels.

Both classes expose the same small surface (reduce, nonzero, inv, scale,
axpy) so that one elimination routine serves F_p and F_q.  Prime-field
arrays are int64 and updates are left unreduced for ``headroom`` steps.
"""
from __future__ import annotations

import numpy as np

from ..ff_core import ExtensionField, PolyOverFp, PrimeModulus


class PrimeOps:
    elem_ndim = 0

    def __init__(self, modulus: PrimeModulus | int):
        if not isinstance(modulus, PrimeModulus):
            modulus = PrimeModulus(modulus)
        self.modulus = modulus
        self.p = modulus.p
        self.dtype = modulus.dtype
        # each axpy step adds less than (p-1)^2 to any entry
        self.headroom = modulus.lazy_terms if modulus.native else 1

    def asarray(self, a):
        return np.array(a, dtype=self.dtype) % self.p

    def reduce(self, a):
        return a % self.p

    def nonzero(self, a):
        return a != 0

    def inv(self, s):
        return pow(int(s), -1, self.p)

    def scale(self, v, s):
        return v * s % self.p

    def axpy(self, block, f, row):
        block -= f[:, None] * row


class ExtensionOps:
    """Elements of F_p[x]/(phi) as int64 arrays with a trailing axis of length deg phi."""

    elem_ndim = 1

    def __init__(self, field: ExtensionField):
        if not field.modulus.native or field.p > 2**24:
            raise ValueError("extension arithmetic needs a small base prime")
        self.field = field
        self.p = field.p
        self.d = field.degree
        self.dtype = np.int64
        self.low = np.array(field.phi.coeffs[:-1], dtype=np.int64)
        self.headroom = 1

    def reduce(self, a):
        return a % self.p

    def nonzero(self, a):
        return (a != 0).any(-1)

    def mul(self, a, b):
        d, p = self.d, self.p
        a, b = np.broadcast_arrays(a, b)
        c = np.zeros(a.shape[:-1] + (2 * d - 1,), dtype=np.int64)
        for i in range(d):
            c[..., i:i + d] += a[..., i:i + 1] * b
        c %= p
        for k in range(2 * d - 2, d - 1, -1):
            c[..., k - d:k] -= c[..., k:k + 1] * self.low
            c[..., k - d:k] %= p
        return c[..., :d] % p

    def inv(self, s):
        poly = PolyOverFp([int(x) for x in s], self.field.modulus)
        inv = self.field.inv(poly)
        return np.array(self.field.vector(inv), dtype=np.int64)

    def scale(self, v, s):
        return self.mul(v, s)

    def axpy(self, block, f, row):
        block -= self.mul(f[:, None, :], row[None, :, :])
        block %= self.p
