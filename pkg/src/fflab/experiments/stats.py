from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

DEFAULT_Z = 4.0


def wilson_interval(count: int, trials: int, z: float = 1.96):
    if trials <= 0:
        return 0.0, 1.0
    ph = count / trials
    denom = 1 + z * z / trials
    centre = (ph + z * z / (2 * trials)) / denom
    half = z * math.sqrt(ph * (1 - ph) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class Verdict:
    z: float
    passed: bool


def statistical_verdict(count, trials: int, predicted, policy: float | str = DEFAULT_Z) -> Verdict:
    """z = (freq - pred) / sqrt(pred (1 - pred) / trials); pass iff |z| <= threshold.

    policy "exact" compares Fractions for equality (oracle mode); z is then 0 or inf.
    """
    if policy == "exact":
        ok = Fraction(count) / trials == Fraction(predicted) if trials else False
        return Verdict(0.0 if ok else math.inf, ok)
    pred = float(predicted)
    freq = count / trials
    se = math.sqrt(max(pred * (1 - pred), 0.0) / trials)
    if se == 0:
        z = 0.0 if freq == pred else math.inf
    else:
        z = (freq - pred) / se
    return Verdict(z, abs(z) <= float(policy))


def poisson_pmf(k: int, lam: float = 1.0) -> float:
    return math.exp(-lam) * lam**k / math.factorial(k)


def binomial_pmf(k: int, n: int, q: float) -> float:
    return math.comb(n, k) * q**k * (1 - q) ** (n - k)
