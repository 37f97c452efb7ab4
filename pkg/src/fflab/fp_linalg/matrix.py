from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..ff_core import ExtensionField, Partition, PolyOverFp, PrimeModulus, is_irreducible
from .charpoly import charpoly_poly, matmul_mod, poly_at_matrix
from .elimination import nullspace, row_echelon
from .fields import ExtensionOps, PrimeOps
from .gf2 import batch_rank_gf2


def _as_modulus(p):
    return p if isinstance(p, PrimeModulus) else PrimeModulus(p)


class MatrixOverFp:
    """Dense matrix with entries in [0, p-1]; the backing array is read-only."""

    __slots__ = ("entries", "modulus")

    def __init__(self, entries, modulus):
        modulus = _as_modulus(modulus)
        arr = np.array(entries, dtype=modulus.dtype) % modulus.p
        if arr.ndim != 2:
            raise ValueError("matrix entries must be two dimensional")
        arr.flags.writeable = False
        self.entries = arr
        self.modulus = modulus

    @classmethod
    def identity(cls, n, modulus):
        return cls(np.eye(n, dtype=np.int64), modulus)

    @classmethod
    def companion(cls, phi: PolyOverFp):
        """Companion matrix: ones on the superdiagonal, last row -a_0, ..., -a_{d-1}."""
        if not phi.is_monic():
            raise ValueError("companion matrix needs a monic polynomial")
        d = phi.degree
        C = np.zeros((d, d), dtype=np.int64)
        for i in range(d - 1):
            C[i, i + 1] = 1
        C[d - 1, :] = [-c for c in phi.coeffs[:d]]
        return cls(C, phi.modulus)

    @property
    def p(self):
        return self.modulus.p

    @property
    def shape(self):
        return self.entries.shape

    @property
    def rows(self):
        return self.entries.shape[0]

    @property
    def cols(self):
        return self.entries.shape[1]

    def __eq__(self, other):
        return (isinstance(other, MatrixOverFp) and other.p == self.p
                and other.shape == self.shape and bool((other.entries == self.entries).all()))

    def __hash__(self):
        return hash((self.p, self.shape, self.entries.tobytes()))

    def __repr__(self):
        return f"MatrixOverFp({self.rows}x{self.cols}, p={self.p})"

    def _check(self, other):
        if not isinstance(other, MatrixOverFp) or other.p != self.p:
            raise ValueError("matrices over different fields")

    def __add__(self, other):
        self._check(other)
        return MatrixOverFp(self.entries + other.entries, self.modulus)

    def __sub__(self, other):
        self._check(other)
        return MatrixOverFp(self.entries - other.entries, self.modulus)

    def __matmul__(self, other):
        self._check(other)
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        return MatrixOverFp(matmul_mod(self.entries, other.entries, self.p), self.modulus)

    def scale(self, c: int):
        return MatrixOverFp(self.entries * (int(c) % self.p), self.modulus)

    def transpose(self):
        return MatrixOverFp(self.entries.T, self.modulus)

    T = property(transpose)

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols} {self.p}"]
        lines += [" ".join(str(int(x)) for x in row) for row in self.entries]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str):
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        n, m, p = (int(t) for t in lines[0].split())
        rows = [[int(t) for t in ln.split()] for ln in lines[1:1 + n]]
        if len(rows) != n or any(len(r) != m for r in rows):
            raise ValueError("matrix text does not match its header")
        return cls(np.array(rows, dtype=object).reshape(n, m), p)

    # linear algebra
    def rank(self) -> int:
        return rank(self)

    def charpoly(self) -> PolyOverFp:
        return charpoly(self)


@dataclass(frozen=True)
class KernelBasis:
    vectors: np.ndarray
    modulus: PrimeModulus
    reduced_echelon: bool = True

    @property
    def dimension(self) -> int:
        return len(self.vectors)


def rank(M: MatrixOverFp, packed: bool | None = None) -> int:
    """Rank over F_p; the packed XOR kernel is used for p = 2 unless packed=False."""
    A = M.entries
    if A.size == 0:
        return 0
    if M.p == 2 and packed is not False:
        return int(batch_rank_gf2(A.astype(np.uint8)[None])[0])
    return len(row_echelon(A, PrimeOps(M.modulus))[1])


def rank_array(A, p: int) -> int:
    """Rank of a plain integer array, dispatching like ``rank``."""
    if p == 2:
        return int(batch_rank_gf2((np.asarray(A) & 1).astype(np.uint8)[None])[0])
    return len(row_echelon(A, PrimeOps(p))[1])


def left_kernel(M: MatrixOverFp) -> KernelBasis:
    """Basis of {w : w^T M = 0} in reduced echelon form (length-n vectors)."""
    return KernelBasis(nullspace(M.entries.T, PrimeOps(M.modulus)), M.modulus)


def canonical_normal_vector(M: MatrixOverFp):
    """Spanning vector of the left kernel of an n x (n-1) matrix, first nonzero entry 1.

    Returns None when rank M < n - 1.
    """
    n, m = M.shape
    if m != n - 1:
        raise ValueError("normal vector needs an n x (n-1) matrix")
    K = left_kernel(M)
    if K.dimension != 1:
        return None
    w = K.vectors[0]
    lead = w[np.flatnonzero(w)[0]]
    return w * pow(int(lead), -1, M.p) % M.p


def charpoly(M: MatrixOverFp) -> PolyOverFp:
    """Monic det(xI - M)."""
    return charpoly_poly(M.entries, M.modulus)


def is_eigenvalue_free(M: MatrixOverFp) -> bool:
    cp = charpoly(M)
    x = PolyOverFp.x(M.modulus)
    g = cp.gcd(x.powmod(M.p, cp) - x)
    return g.degree == 0


def kernel_filtration(M: MatrixOverFp, phi: PolyOverFp) -> list[int]:
    """d_j = dim ker phi(M)^j for j = 0, 1, ... until the sequence stabilises."""
    if not phi.is_monic() or not is_irreducible(phi):
        raise ValueError("phi must be monic irreducible")
    n = M.rows
    p = M.p
    N = poly_at_matrix(phi, M.entries, p)
    d = [0]
    P = N
    for _ in range(n):
        dj = n - rank_array(P, p)
        if dj == d[-1]:
            break
        d.append(dj)
        if dj == n:
            break
        P = matmul_mod(P, N, p)
    return d


def lambda_phi(M: MatrixOverFp, phi: PolyOverFp) -> Partition:
    """Partition describing the phi-primary part of M (via kernel dimensions of powers)."""
    d = kernel_filtration(M, phi)
    deg = phi.degree
    steps = []
    for a, b in zip(d, d[1:]):
        if (b - a) % deg:
            raise ArithmeticError("kernel jumps not divisible by deg phi")
        steps.append((b - a) // deg)
    return Partition(tuple(steps)).dual()


class MatrixOverFq:
    """Matrix over F_p[x]/(phi); entries are (rows, cols, deg phi) coefficient arrays."""

    def __init__(self, entries, field: ExtensionField):
        arr = np.array(entries, dtype=np.int64) % field.p
        if arr.ndim != 3 or arr.shape[2] != field.degree:
            raise ValueError("entries must have shape (rows, cols, deg phi)")
        self.entries = arr
        self.field = field

    @classmethod
    def lift(cls, M: MatrixOverFp, field: ExtensionField):
        if M.p != field.p:
            raise ValueError("base fields differ")
        arr = np.zeros(M.shape + (field.degree,), dtype=np.int64)
        arr[..., 0] = M.entries
        return cls(arr, field)

    def minus_scalar_identity(self, c: PolyOverFp):
        vec = np.array(self.field.vector(c), dtype=np.int64)
        arr = self.entries.copy()
        n = min(arr.shape[0], arr.shape[1])
        arr[np.arange(n), np.arange(n)] -= vec
        return MatrixOverFq(arr, self.field)

    def rank(self) -> int:
        return len(row_echelon(self.entries, ExtensionOps(self.field))[1])


def rank_minus_root(M: MatrixOverFp, phi: PolyOverFp) -> int:
    """Rank over F_q of M - alpha I, alpha the class of x in F_p[x]/(phi)."""
    field = ExtensionField(phi)
    return MatrixOverFq.lift(M, field).minus_scalar_identity(field.generator()).rank()
