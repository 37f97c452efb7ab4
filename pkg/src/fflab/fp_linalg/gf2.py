"""Rank over F_2 with rows packed 64 columns per uint64 word."""
import numpy as np


def pack_rows(bits):
    """(..., n, m) array of 0/1 -> (..., n, W) uint64, column c in word c//64 bit c%64."""
    bits = np.asarray(bits, dtype=np.uint8) & 1
    m = bits.shape[-1]
    W = (m + 63) // 64
    pad = W * 64 - m
    if pad:
        bits = np.concatenate([bits, np.zeros(bits.shape[:-1] + (pad,), np.uint8)], axis=-1)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def batch_rank_gf2(bits):
    """Ranks of a stack (B, n, m) of 0/1 matrices using word-wise XOR elimination."""
    bits = np.asarray(bits)
    B, n, m = bits.shape
    A = pack_rows(bits)
    used = np.zeros((B, n), dtype=bool)
    rank = np.zeros(B, dtype=np.int64)
    ar = np.arange(B)
    zero = np.uint64(0)
    for c in range(m):
        w, b = divmod(c, 64)
        colbits = ((A[:, :, w] >> np.uint64(b)) & np.uint64(1)).astype(bool)
        cand = colbits & ~used
        has = cand.any(1)
        if not has.any():
            continue
        piv = cand.argmax(1)
        prow = A[ar, piv, w:]
        cand[ar, piv] = False
        A[:, :, w:] ^= np.where(cand[:, :, None], prow[:, None, :], zero)
        used[ar[has], piv[has]] = True
        rank += has
    return rank
