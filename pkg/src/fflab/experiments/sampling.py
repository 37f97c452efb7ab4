"""Per-trial random streams and exact atom sampling.

Trial t of a run with master seed s reads the Philox4x64 stream with
key (s, STREAM_TAG) and counter (0, 0, t, 0).  Entries are taken from that
stream in row-major order, so the matrix of a trial depends only on (s, t).
"""
from __future__ import annotations

import numpy as np

from ..anticonc import DistributionSpec
from ..fp_linalg import MatrixOverFp

STREAM_TAG = 0x46464C4142  # fixed second key word
AUX_TAG = 0x4155585354


def trial_stream(master_seed: int, trial_index: int, tag: int = STREAM_TAG) -> np.random.Philox:
    if not 0 <= master_seed < 2**64:
        raise ValueError("master seed must be a 64-bit unsigned integer")
    return np.random.Philox(key=[master_seed, tag], counter=[0, 0, trial_index, 0])


class AtomSampler:
    """Maps uniform 64-bit words to atoms with exact probabilities.

    With common denominator D the word u is accepted when u < floor(2^64/D) D,
    and then u mod D is looked up in the cumulative numerators.
    """

    def __init__(self, mu: DistributionSpec, p: int):
        D = mu.common_denominator()
        if D >= 2**63:
            raise ValueError("probability denominators too large")
        self.D = D
        nums = [int(q * D) for _, q in mu.atoms]
        self.cum = np.cumsum(nums).astype(np.uint64)
        self.values = np.array([v % p for v, _ in mu.atoms], dtype=np.int64)
        self.limit = None if 2**64 % D == 0 else (2**64 // D) * D

    def draw(self, stream: np.random.Philox, count: int):
        u = stream.random_raw(count).astype(np.uint64)
        if self.limit is not None:
            lim = np.uint64(self.limit)
            bad = np.flatnonzero(u >= lim)
            while bad.size:
                extra = stream.random_raw(bad.size).astype(np.uint64)
                u[bad] = extra
                bad = bad[extra >= lim]
        r = u % np.uint64(self.D)
        return self.values[np.searchsorted(self.cum, r, side="right")]


def sample_entries(n: int, m: int, sampler: AtomSampler, stream) -> np.ndarray:
    return sampler.draw(stream, n * m).reshape(n, m)


def sample_matrix(n: int, m: int, mu: DistributionSpec, stream, p: int) -> MatrixOverFp:
    return MatrixOverFp(sample_entries(n, m, AtomSampler(mu, p), stream), p)
