"""Fast invariant checks bundled with the package (``fflab selftest``)."""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from . import anticonc as ac
from . import exact_stats as es
from .experiments import enumerate_oracle
from .ff_core import Partition, PolyOverFp, irreducible_count, monic_irreducibles, partitions_of
from .fp_linalg import (MatrixOverFp, batch_rank, canonical_normal_vector, charpoly, lambda_phi,
                        rank)


def _rank_law():
    for n, p in [(2, 2), (2, 3), (3, 2)]:
        law = enumerate_oracle(n, p, "corank")
        if any(law.get(k, 0) != es.uniform_rank_prob(n, p, k) for k in range(n + 1)):
            return False
    return True


def _necklace():
    return all(len(monic_irreducibles(p, d)) == irreducible_count(p, d)
               for p, d in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 2)])


def _dual_involution():
    return all(lam.dual().dual() == lam and lam.dual().size == lam.size
               for n in range(9) for lam in partitions_of(n))


def _identity():
    return all(es.count_all_identity_check(q, 5)[0] for q in (2, 3, 4))


def _derangement():
    return es.derangement_series(2, 2)[2] == Fraction(1, 3)


def _rank_paths():
    rng = np.random.default_rng(7)
    for _ in range(30):
        A = rng.integers(0, 2, (12, 15))
        M = MatrixOverFp(A, 2)
        if rank(M) != rank(M, packed=False):
            return False
    A = rng.integers(0, 5, (200, 4, 4))
    return all(int(r) == rank(MatrixOverFp(a, 5)) for r, a in zip(batch_rank(A, 5), A))


def _companion():
    f = PolyOverFp([1, 2, 0, 1], 3)
    return charpoly(MatrixOverFp.companion(f)) == f


def _normal_vector():
    rng = np.random.default_rng(3)
    for _ in range(10):
        A = rng.integers(0, 5, (9, 8))
        w = canonical_normal_vector(MatrixOverFp(A, 5))
        if w is not None and (w @ A % 5).any():
            return False
    return True


def _cl_mass():
    lam = lambda_phi(MatrixOverFp.identity(3, 3), PolyOverFp([-1, 1], 3))
    return lam == Partition((1, 1, 1))


def _rho_bruteforce():
    rng = np.random.default_rng(5)
    mu = ac.DistributionSpec.bernoulli()
    for _ in range(10):
        p = int(rng.choice([3, 5, 7]))
        w = rng.integers(0, p, int(rng.integers(1, 7)))
        counts = [0] * p
        for s in itertools.product((1, -1), repeat=len(w)):
            counts[int(np.dot(s, w)) % p] += 1
        brute = max(abs(Fraction(c, 2 ** len(w)) - Fraction(1, p)) for c in counts)
        if ac.rho_exact(w, mu, p).rho != brute:
            return False
    return True


def _fourier_bound():
    rng = np.random.default_rng(9)
    mu = ac.DistributionSpec.bernoulli()
    for _ in range(20):
        p = int(rng.choice([3, 5, 7, 11]))
        w = rng.integers(0, p, int(rng.integers(1, 12)))
        if ac.fourier_upper_bound(w, mu, p) < float(ac.rho_exact(w, mu, p).rho) - 1e-12:
            return False
    return True


def _ulcd_example():
    return ac.ulcd(ac.centered_lift([1, 1, 1, 1], 13), ac.ULCDParams(0.125, 1.0)) == 12


CHECKS = [
    ("rank law equals enumeration", _rank_law),
    ("irreducible count equals brute force", _necklace),
    ("partition dual is an involution", _dual_involution),
    ("cycle-index product equals 1/(1-u)", _identity),
    ("GL(2,2) derangement fraction is 1/3", _derangement),
    ("packed and generic rank agree", _rank_paths),
    ("companion matrix has phi as char. poly", _companion),
    ("normal vector is orthogonal", _normal_vector),
    ("identity has partition [1,1,1] at x-1", _cl_mass),
    ("rho equals sign enumeration", _rho_bruteforce),
    ("Fourier bound dominates rho", _fourier_bound),
    ("ULCD of all-ones mod 13 is 12", _ulcd_example),
]


def run(stream=None) -> bool:
    ok = True
    for name, fn in CHECKS:
        try:
            good = bool(fn())
        except Exception as exc:  # report and keep going
            good = False
            name = f"{name} ({exc!r})"
        ok &= good
        if stream is not None:
            print(f"{'PASS' if good else 'FAIL'}  {name}", file=stream)
    return ok
