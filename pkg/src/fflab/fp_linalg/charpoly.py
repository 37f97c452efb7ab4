"""Characteristic polynomials via Hessenberg reduction, and polynomial evaluation at matrices."""
from __future__ import annotations

import numpy as np

from ..ff_core import PolyOverFp, PrimeModulus


def matmul_mod(A, B, p: int):
    """A @ B mod p without overflow: float BLAS when exact, else int64, else Python ints."""
    k = A.shape[-1]
    bound = k * (p - 1) ** 2
    if bound < 2**53:
        C = np.rint(A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64)
        return C % p
    if bound < 2**63 and A.dtype != object and B.dtype != object:
        return (A.astype(np.int64) @ B.astype(np.int64)) % p
    return (A.astype(object) @ B.astype(object)) % p


def _plan(n: int, p: int) -> str:
    if p < 2**31 and (n + 2) ** 2 * (p - 1) ** 3 < 2**61:
        return "lazy"
    if p < 2**31 and (n + 1) * (p - 1) ** 2 < 2**62:
        return "eager"
    return "object"


def hessenberg(A, p: int):
    """Upper Hessenberg matrix similar to A over F_p (elimination with row/column pivoting)."""
    n = A.shape[0]
    plan = _plan(n, p)
    H = np.array(A, dtype=object if plan == "object" else np.int64) % p
    for k in range(n - 2):
        col = H[k + 1:, k] % p
        H[k + 1:, k] = col
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        i = k + 1 + int(nz[0])
        if i != k + 1:
            H[[k + 1, i], :] = H[[i, k + 1], :]
            H[:, [k + 1, i]] = H[:, [i, k + 1]]
        H[k + 1, k:] %= p
        inv = pow(int(H[k + 1, k]), -1, p)
        u = H[k + 2:, k] * inv % p
        if not u.any():
            continue
        H[k + 2:, k:] -= u[:, None] * H[k + 1, k:]
        H[k + 2:, k] = 0
        # inverse similarity: column k+1 absorbs the combination of later columns
        H[:, k + 1] += H[:, k + 2:] @ u
        if plan != "lazy":
            H %= p
    return H % p


def hessenberg_charpoly_coeffs(H, p: int):
    """Coefficients (lowest first) of det(xI - H) for upper Hessenberg H."""
    n = H.shape[0]
    P = np.zeros((n + 1, n + 1), dtype=H.dtype)
    P[0, 0] = 1
    T = np.zeros(n, dtype=H.dtype)
    for k in range(1, n + 1):
        if k >= 2:
            s = H[k - 1, k - 2]
            T[:k - 2] = T[:k - 2] * s % p
            T[k - 2] = s
        prev = P[k - 1]
        new = np.zeros(n + 1, dtype=H.dtype)
        new[1:] = prev[:-1]
        new -= H[k - 1, k - 1] * prev
        if k >= 2:
            c = H[:k - 1, k - 1] * T[:k - 1] % p
            new[:k] -= c @ P[:k - 1, :k]
        P[k] = new % p
    return P[n]


def charpoly_coeffs(A, p: int):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("characteristic polynomial needs a square matrix")
    if A.shape[0] == 0:
        return np.array([1], dtype=np.int64)
    return hessenberg_charpoly_coeffs(hessenberg(A, p), p)


def eval_poly_all(coeffs, p: int):
    """Values of the polynomial at every a in F_p (vectorised Horner), small p only."""
    if p > 2**22:
        raise ValueError("exhaustive evaluation needs p <= 2**22")
    a = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in np.asarray(coeffs, dtype=np.int64)[::-1]:
        acc = (acc * a + int(c)) % p
    return acc


def roots_in_prime_field(coeffs, p: int):
    return np.flatnonzero(eval_poly_all(coeffs, p) == 0)


def poly_at_matrix(phi: PolyOverFp, A, p: int):
    """phi(A) mod p by Horner."""
    A = np.asarray(A)
    n = A.shape[0]
    dtype = np.int64 if p < 2**31 else object
    eye = np.eye(n, dtype=np.int64).astype(dtype)
    acc = np.zeros((n, n), dtype=dtype)
    for c in reversed(phi.coeffs):
        acc = (matmul_mod(acc, A, p) + c * eye) % p
    return acc


def charpoly_poly(A, modulus: PrimeModulus) -> PolyOverFp:
    return PolyOverFp([int(c) for c in charpoly_coeffs(A, modulus.p)], modulus)
