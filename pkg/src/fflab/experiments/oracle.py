"""Exhaustive enumeration of all n x n matrices over F_p (ground truth for small sizes)."""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

import numpy as np

from ..anticonc import DistributionSpec
from ..ff_core import Partition, PolyOverFp
from ..fp_linalg import batch_rank

ORACLE_BUDGET = 10**6
ORACLE_STATISTICS = ("rank", "corank", "eigfree", "gl_eigfree", "eigencount", "divisibility",
                     "partition")


def all_matrices(n: int, values) -> np.ndarray:
    """Every matrix with entries from ``values`` (index digits, entry (0,0) fastest)."""
    k = len(values)
    total = k ** (n * n)
    idx = np.arange(total, dtype=np.int64)
    digits = np.empty((total, n * n), dtype=np.int64)
    for e in range(n * n):
        digits[:, e] = idx % k
        idx //= k
    return digits.reshape(total, n, n)


def _batch_matmul(A, B, p):
    return np.einsum("bij,bjk->bik", A, B) % p


def _batch_poly(phi: PolyOverFp, A, p):
    n = A.shape[1]
    eye = np.broadcast_to(np.eye(n, dtype=np.int64), A.shape)
    acc = np.zeros_like(A)
    for c in reversed(phi.coeffs):
        acc = (_batch_matmul(acc, A, p) + c * eye) % p
    return acc


def _singular_at(A, p):
    n = A.shape[1]
    eye = np.eye(n, dtype=np.int64)
    return np.stack([batch_rank((A - a * eye) % p, p) < n for a in range(p)], axis=1)


def enumerate_oracle(n: int, p: int, statistic: str, mu: DistributionSpec | None = None,
                     phi: PolyOverFp | None = None) -> dict:
    """Exact distribution of a matrix statistic.

    Uniform weighting by default; with ``mu`` every matrix is weighted by the
    product of its entry probabilities.
    """
    if statistic not in ORACLE_STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}")
    if mu is None:
        values = list(range(p))
        nums = [1] * p
        den = p
    else:
        law = mu.mod(p)
        values = list(law)
        den = 1
        for q in law.values():
            den = den * q.denominator // np.gcd(den, q.denominator)
        nums = [int(law[v] * den) for v in values]
    if len(values) ** (n * n) > ORACLE_BUDGET:
        raise ValueError(f"enumeration budget exceeded: {len(values)}^{n * n} > 1e6")
    digits = all_matrices(n, values)
    A = np.asarray(values, dtype=np.int64)[digits]
    if mu is None:
        weights = None
    else:
        w = np.ones(len(A), dtype=object)
        numarr = np.asarray(nums, dtype=object)
        for e in range(n * n):
            w = w * numarr[digits.reshape(len(A), -1)[:, e]]
        weights = w

    if statistic in ("rank", "corank"):
        r = batch_rank(A, p)
        keys = r if statistic == "rank" else n - r
        keys = [int(k) for k in keys]
    elif statistic in ("eigfree", "gl_eigfree", "eigencount"):
        sing = _singular_at(A, p)
        if statistic == "eigencount":
            keys = [int(k) for k in sing.sum(1)]
        else:
            keys = [bool(k) for k in ~sing.any(1)]
            if statistic == "gl_eigfree":
                keep = ~sing[:, 0]
                keys = [k for k, ok in zip(keys, keep) if ok]
                A = A[keep]
                if weights is not None:
                    weights = weights[keep]
    elif statistic == "divisibility":
        phi = phi if phi is not None else PolyOverFp([0, 1], p)
        keys = [bool(k) for k in batch_rank(_batch_poly(phi, A, p), p) < n]
    else:  # partition of phi-primary part
        phi = phi if phi is not None else PolyOverFp([-1, 1], p)
        N = _batch_poly(phi, A, p)
        P = N.copy()
        dims = [np.zeros(len(A), dtype=np.int64)]
        for _ in range(n):
            dims.append(n - batch_rank(P, p))
            P = _batch_matmul(P, N, p)
        D = np.stack(dims, axis=1)
        uniq, inv = np.unique(D, axis=0, return_inverse=True)
        labels = []
        for row in uniq:
            steps = [int(b - a) // phi.degree for a, b in zip(row, row[1:]) if b > a]
            labels.append(str(Partition(tuple(steps)).dual()))
        keys = [labels[i] for i in np.asarray(inv).ravel()]

    acc = defaultdict(int)
    if weights is None:
        for k in keys:
            acc[k] += 1
        total = len(keys)
    else:
        for k, w in zip(keys, weights):
            acc[k] += int(w)
        total = sum(int(w) for w in weights)
    return {k: Fraction(acc[k], total) for k in sorted(acc)}
