from __future__ import annotations

import numpy as np


def row_echelon(A, ops, reduced: bool = False):
    """Gaussian elimination with first-nonzero pivoting.

    Returns (R, pivot_columns).  Pivots are scaled to 1.  With ``reduced``
    entries above the pivots are cleared as well, giving the RREF.
    """
    A = np.array(A, dtype=ops.dtype, copy=True)
    nr, nc = A.shape[0], A.shape[1]
    pivots = []
    r = 0
    steps = 0
    for c in range(nc):
        if r == nr:
            break
        col = ops.reduce(A[r:, c])
        A[r:, c] = col
        nz = np.flatnonzero(ops.nonzero(col))
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        prow = ops.scale(ops.reduce(A[r, c:]), ops.inv(A[r, c]))
        A[r, c:] = prow
        below = A[r + 1:, c].copy()
        if ops.nonzero(below).any():
            ops.axpy(A[r + 1:, c:], below, prow)
        if reduced and r:
            above = ops.reduce(A[:r, c])
            if ops.nonzero(above).any():
                ops.axpy(A[:r, c:], above, prow)
        pivots.append(c)
        r += 1
        steps += 1
        if steps >= ops.headroom:
            A %= ops.p
            steps = 0
    A %= ops.p
    return A, pivots


def nullspace(A, ops):
    """Basis of {v : A v = 0} as rows, itself in reduced echelon form."""
    R, piv = row_echelon(A, ops, reduced=True)
    ncols = A.shape[1]
    free = [c for c in range(ncols) if c not in set(piv)]
    shape = (len(free), ncols) + A.shape[2:]
    basis = np.zeros(shape, dtype=ops.dtype)
    one = np.zeros(A.shape[2:], dtype=ops.dtype)
    if ops.elem_ndim:
        one[0] = 1
    else:
        one = 1
    for k, f in enumerate(free):
        basis[k, f] = one
        for i, c in enumerate(piv):
            basis[k, c] = -R[i, f]
    basis %= ops.p
    if len(free) > 1:
        basis, _ = row_echelon(basis, ops, reduced=True)
    return basis


def batch_rank(A, p: int):
    """Ranks of a stack of small matrices (B, n, m) over F_p, p < 2**20."""
    A = np.array(A, dtype=np.int64) % p
    B, n, m = A.shape
    inv = np.array([0] + [pow(x, -1, p) for x in range(1, p)], dtype=np.int64)
    used = np.zeros((B, n), dtype=bool)
    rank = np.zeros(B, dtype=np.int64)
    ar = np.arange(B)
    for c in range(m):
        col = A[:, :, c]
        cand = (col != 0) & ~used
        has = cand.any(1)
        if not has.any():
            continue
        piv = cand.argmax(1)
        prow = A[ar, piv]
        prow = prow * inv[prow[:, c]][:, None] % p
        f = np.where(cand, col, 0)
        f[ar, piv] = 0
        A = (A - f[:, :, None] * prow[:, None, :]) % p
        used[ar[has], piv[has]] = True
        rank += has
    return rank
