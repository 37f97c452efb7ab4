"""Anti-concentration diagnostics for random walks S = sum_i mu_i w_i over F_p."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import NamedTuple

import numpy as np

from .ff_core import PrimeModulus
from .ff_core.qproduct import fraction_to_decimal


# ----------------------------------------------------------------- distributions

@dataclass(frozen=True)
class DistributionSpec:
    """Finitely supported law on the integers, used through its reduction mod p."""

    atoms: tuple  # ((value, Fraction), ...)
    alpha: Fraction | None = None

    def __post_init__(self):
        atoms = tuple((int(v), Fraction(q)) for v, q in self.atoms)
        if len(atoms) < 2:
            raise ValueError("a distribution needs at least two atoms")
        if any(q <= 0 for _, q in atoms):
            raise ValueError("atom probabilities must be positive")
        if sum(q for _, q in atoms) != 1:
            raise ValueError("atom probabilities must sum to 1")
        if len({v for v, _ in atoms}) != len(atoms):
            raise ValueError("repeated atom value")
        object.__setattr__(self, "atoms", atoms)
        top = max(q for _, q in atoms)
        alpha = 1 - top if self.alpha is None else Fraction(self.alpha)
        if not 0 < alpha < 1 or top > 1 - alpha:
            raise ValueError("distribution is not alpha-balanced")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def bernoulli(cls):
        """Uniform on {-1, +1}."""
        return cls(((-1, Fraction(1, 2)), (1, Fraction(1, 2))))

    @classmethod
    def uniform(cls, p: int):
        return cls(tuple((v, Fraction(1, p)) for v in range(p)))

    @classmethod
    def from_dict(cls, d: dict, alpha=None):
        return cls(tuple(sorted((int(k), Fraction(v)) for k, v in d.items())), alpha)

    def mod(self, p: int) -> dict[int, Fraction]:
        """Law of the atom reduced mod p; must stay non-degenerate and alpha-balanced."""
        out: dict[int, Fraction] = {}
        for v, q in self.atoms:
            out[v % p] = out.get(v % p, Fraction(0)) + q
        if len(out) < 2:
            raise ValueError(f"distribution collapses to a point mass mod {p}")
        if max(out.values()) > 1 - self.alpha:
            raise ValueError(f"distribution is not alpha-balanced mod {p}")
        return dict(sorted(out.items()))

    def common_denominator(self) -> int:
        return reduce(math.lcm, (q.denominator for _, q in self.atoms), 1)

    def to_json(self):
        return {"atoms": [{"value": v, "num": q.numerator, "den": q.denominator}
                          for v, q in self.atoms],
                "alpha": str(self.alpha)}

    @classmethod
    def from_json(cls, obj):
        atoms = tuple((a["value"], Fraction(a["num"], a["den"])) for a in obj["atoms"])
        alpha = obj.get("alpha")
        return cls(atoms, Fraction(alpha) if alpha is not None else None)


def _residues(w, p):
    return np.array([int(x) % p for x in w], dtype=np.int64)


def support_size(w) -> int:
    return int(sum(1 for x in w if int(x) != 0))


# ---------------------------------------------------------------------- rho

class Concentration(NamedTuple):
    rho: Fraction | float
    distribution: list


def rho_exact(w, mu: DistributionSpec, p: int, mode: str = "exact") -> Concentration:
    """Law of S = sum mu_i w_i over F_p by successive cyclic convolution.

    mode "exact" works with integer counts over the common denominator and
    returns Fractions; mode "float" uses float64.
    """
    PrimeModulus(p)
    w = _residues(w, p)
    if len(w) < 1:
        raise ValueError("need at least one coordinate")
    law = mu.mod(p)
    if mode == "exact":
        D = reduce(math.lcm, (q.denominator for q in law.values()), 1)
        weights = [(v, int(q * D)) for v, q in law.items()]
        c = np.zeros(p, dtype=object)
        c[:] = 0
        c[0] = 1
        for wi in w:
            new = np.zeros(p, dtype=object)
            new[:] = 0
            for v, num in weights:
                new += num * np.roll(c, v * int(wi) % p)
            c = new
        total = D ** len(w)
        dist = [Fraction(int(x), total) for x in c]
        rho = max(abs(x - Fraction(1, p)) for x in dist)
        return Concentration(rho, dist)
    if mode != "float":
        raise ValueError(f"unknown mode {mode!r}")
    weights = [(v, float(q)) for v, q in law.items()]
    c = np.zeros(p)
    c[0] = 1.0
    for wi in w:
        new = np.zeros(p)
        for v, q in weights:
            new += q * np.roll(c, v * int(wi) % p)
        c = new
    return Concentration(float(np.max(np.abs(c - 1.0 / p))), c.tolist())


def argmax_atom(dist, p: int) -> int:
    dev = [abs(Fraction(x) - Fraction(1, p)) if isinstance(x, Fraction) else abs(x - 1 / p)
           for x in dist]
    return int(max(range(p), key=lambda a: (dev[a], -a)))


def rho_fourier(w, mu: DistributionSpec, p: int) -> float:
    """rho from the character sum P(S=a) = (1/p) sum_x prod_i E e_p(x mu w_i) e_p(-x a)."""
    w = _residues(w, p)
    law = mu.mod(p)
    x = np.arange(p, dtype=np.int64)
    F = np.ones(p, dtype=complex)
    for wi in w:
        phi = np.zeros(p, dtype=complex)
        for v, q in law.items():
            phase = (x * (v * int(wi) % p)) % p
            phi += float(q) * np.exp(2j * np.pi * phase / p)
        F *= phi
    a = np.arange(p, dtype=np.int64)
    E = np.exp(-2j * np.pi * (np.outer(x, a) % p) / p)
    P = (F @ E).real / p
    return float(np.max(np.abs(P - 1.0 / p)))


def lazy_symmetrized(mu: DistributionSpec, p: int):
    """(beta_0, [(t_j, beta_j)]) for psi' = half (mu - mu') plus half a point mass at 0.

    t_j runs over representatives of {t, -t}; beta_j = P(psi' in {t_j, -t_j}).
    """
    law = mu.mod(p)
    psi = [Fraction(0)] * p
    for a, qa in law.items():
        for b, qb in law.items():
            psi[(a - b) % p] += qa * qb
    lazy = [x / 2 for x in psi]
    lazy[0] += Fraction(1, 2)
    pairs = []
    for t in range(1, p // 2 + 1):
        beta = lazy[t] + (lazy[p - t] if p - t != t else 0)
        if beta:
            pairs.append((t, beta))
    return lazy[0], pairs


def _dist_sq(r, p):
    """Squared distance to the nearest integer of r/p, times p^2 (exact ints)."""
    r = r % p
    d = np.minimum(r, p - r)
    return d * d


def fourier_upper_bound(w, mu: DistributionSpec, p: int) -> float:
    """(1/p) sum_{x != 0} exp(-2 sum_i sum_j beta_j ||x t_j w_i / p||^2)."""
    w = _residues(w, p)
    _, pairs = lazy_symmetrized(mu, p)
    x = np.arange(1, p, dtype=np.int64)
    expo = np.zeros(p - 1)
    for t, beta in pairs:
        r = np.outer(x, (t * w) % p) % p
        expo += float(beta) * _dist_sq(r, p).sum(axis=1) / (p * p)
    return float(np.exp(-2 * expo).sum() / p)


# --------------------------------------------------------------- lifts and LCD

@dataclass(frozen=True)
class CenteredLift:
    p: int
    values: tuple  # Fractions w_i / p with centred numerators

    @property
    def numerators(self):
        return [int(v * self.p) for v in self.values]

    def residues(self):
        return [c % self.p for c in self.numerators]


def centered_lift(w, p: int) -> CenteredLift:
    PrimeModulus(p)
    out = []
    for x in w:
        r = int(x) % p
        c = r - p if r > (p - 1) // 2 and p != 2 else r
        out.append(Fraction(c, p))
    return CenteredLift(p, tuple(out))


@dataclass(frozen=True)
class ULCDParams:
    gamma: float = 0.125
    kappa: float | None = None

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.kappa is not None and self.kappa <= 0:
            raise ValueError("kappa must be positive")

    def resolved_kappa(self, n: int) -> float:
        return self.kappa if self.kappa is not None else n ** 0.125


def ulcd(lift: CenteredLift, params: ULCDParams | None = None) -> int:
    """Smallest L >= 1 with dist(L w', Z^n) <= min(gamma ||L w'||_2, kappa).

    All comparisons are done on integers (everything scaled by p^2).
    """
    params = params or ULCDParams()
    p = lift.p
    c = lift.numerators
    if not any(c):
        raise ValueError("ULCD of the zero vector is undefined")
    n = len(c)
    g = Fraction(params.gamma)
    k2p2 = math.floor(Fraction(params.resolved_kappa(n)) ** 2 * p * p)
    norm2 = sum(x * x for x in c)
    big = n * p**4 * max(g.numerator, g.denominator) ** 2 >= 2**62
    dtype = object if big else np.int64
    res = np.array([x % p for x in c], dtype=dtype)
    for start in range(1, p + 1, 4096):
        L = np.arange(start, min(start + 4096, p + 1), dtype=np.int64).astype(dtype)
        d2 = _dist_sq(np.outer(L, res) % p, p).sum(axis=1)
        ok = (d2 * g.denominator**2 <= g.numerator**2 * L * L * norm2) & (d2 <= k2p2)
        hit = np.flatnonzero(ok)
        if hit.size:
            return int(L[hit[0]])
    raise AssertionError("L = p always succeeds")


def min_dilation_norm(w, p: int) -> float:
    """min over t != 0 of ||(t w)'||_2, the largest kappa with no dilation below it."""
    w = _residues(w, p)
    t = np.arange(1, p, dtype=np.int64)
    d2 = _dist_sq(np.outer(t, w) % p, p).sum(axis=1)
    return math.sqrt(int(d2.min())) / p


def level_set(w, p: int, m, mu: DistributionSpec | None = None,
              include_zero: bool | None = None) -> set[int]:
    """Dilations t with small total squared distance.

    Uniform weights (mu None): {t : sum_l ||t w_l / p||^2 <= m}, 0 included.
    Weighted by the lazy symmetrization of mu: {x != 0 : sum_i sum_j beta_j
    ||x t_j w_i / p||^2 <= m}.
    """
    w = _residues(w, p)
    m = Fraction(m)
    if m < 0:
        raise ValueError("m must be non-negative")
    t = np.arange(p, dtype=np.int64)
    if mu is None:
        score = [Fraction(int(s)) for s in _dist_sq(np.outer(t, w) % p, p).sum(axis=1)]
        zero_default = True
    else:
        _, pairs = lazy_symmetrized(mu, p)
        score = [Fraction(0)] * p
        for tj, beta in pairs:
            s = _dist_sq(np.outer(t, (tj * w) % p) % p, p).sum(axis=1)
            score = [a + beta * int(b) for a, b in zip(score, s)]
        zero_default = False
    inc = zero_default if include_zero is None else include_zero
    bound = m * p * p
    return {int(x) for x in t if score[x] <= bound and (x != 0 or inc)}


# ---------------------------------------------------------------- Halasz counts

def _cyclic_conv(a, b, p):
    out = np.zeros(p, dtype=object)
    out[:] = 0
    for x in range(p):
        if a[x]:
            out += a[x] * np.roll(b, x)
    return out


def rk_count(w, p: int, k: int) -> int:
    """Number of ordered signed 2k-tuples with sum +-w_i1 +- ... +- w_i2k = 0 mod p."""
    if k < 1:
        raise ValueError("k must be positive")
    w = _residues(w, p)
    h = np.zeros(p, dtype=object)
    h[:] = 0
    for x in w:
        h[int(x)] += 1
        h[(-int(x)) % p] += 1
    result = None
    base = h
    e = 2 * k
    while e:
        if e & 1:
            result = base if result is None else _cyclic_conv(result, base, p)
        e >>= 1
        if e:
            base = _cyclic_conv(base, base, p)
    return int(result[0])


RK_DELTA_BUDGET = 10**8


def rk_delta_count(w, p: int, k: int, delta) -> int:
    """Solutions counted by rk_count that use at least (1+delta)k distinct indices."""
    w = _residues(w, p)
    n = len(w)
    if (2 * n) ** (2 * k) > RK_DELTA_BUDGET:
        raise ValueError("instance too large for brute force: need (2n)^(2k) <= 1e8")
    need = math.ceil((1 + Fraction(delta)) * k)
    signs = np.array(list(itertools.product((1, -1), repeat=2 * k)), dtype=np.int64)
    total = 0
    for idx in itertools.product(range(n), repeat=2 * k):
        if len(set(idx)) < need:
            continue
        vals = w[list(idx)]
        total += int(((signs @ vals) % p == 0).sum())
    return total


def fjls_correction(n: int, k: int, delta) -> float:
    """(40 k^{1-delta} n^{1+delta})^k."""
    d = float(delta)
    return (40 * k ** (1 - d) * n ** (1 + d)) ** k


def halasz_bound(w, p: int, k: int, f_value) -> float:
    """R_k / (2^{2k} n^{2k} sqrt f) + exp(-f/2) under f <= |supp|/100 and k <= n/f."""
    n = len(w)
    supp = support_size(_residues(w, p))
    f = float(f_value)
    if f <= 0 or f > supp / 100:
        raise ValueError("need 0 < f <= |supp(w)| / 100")
    if k > n / f:
        raise ValueError("need k <= n / f")
    ratio = Fraction(rk_count(w, p, k), (2 * n) ** (2 * k))
    return float(ratio) / math.sqrt(f) + math.exp(-f / 2)


# ----------------------------------------------------------------- rank-one GAP

@dataclass(frozen=True)
class RankOneGAP:
    p: int
    dilation: int
    radius: Fraction
    covered: tuple

    @property
    def size(self) -> int:
        return 2 * math.floor(self.radius * self.p) + 1

    def members(self):
        r = math.floor(self.radius * self.p)
        return sorted({x % self.p for x in range(-r, r + 1)})


def detect_rank_one_gap(w, p: int, n_prime: int, m_budget=None) -> RankOneGAP:
    """Dilation x making n - n' coordinates of x w / p closest to the integers."""
    w = _residues(w, p)
    n = len(w)
    if not 1 <= n_prime < n:
        raise ValueError("need 1 <= n' < n")
    if p > 10**6:
        raise ValueError("dilation scan limited to p <= 1e6")
    keep = n - n_prime
    best_x, best_r = None, None
    chunk = max(1, 2**22 // max(n, 1))
    for start in range(1, p, chunk):
        x = np.arange(start, min(start + chunk, p), dtype=np.int64)
        r = np.outer(x, w) % p
        d = np.minimum(r, p - r)
        kth = np.partition(d, keep - 1, axis=1)[:, keep - 1]
        i = int(np.argmin(kth))
        if best_r is None or kth[i] < best_r:
            best_x, best_r = int(x[i]), int(kth[i])
    r = (best_x * w) % p
    d = np.minimum(r, p - r)
    covered = tuple(int(i) for i in np.flatnonzero(d <= best_r))
    return RankOneGAP(p, best_x, Fraction(best_r, p), covered)


def verify_gap_containment(Q: RankOneGAP, w, n_prime: int) -> bool:
    w = _residues(w, Q.p)
    r = (Q.dilation * w) % Q.p
    d = np.minimum(r, Q.p - r)
    inside = sum(1 for x in d if Fraction(int(x), Q.p) <= Q.radius)
    return inside >= len(w) - n_prime


# --------------------------------------------------------------- real torus

class BallProbability(NamedTuple):
    value: float
    low: float
    high: float

    def __float__(self):
        return self.value


_TIE = 1e-12


def _sign_table(k):
    return np.array(list(itertools.product((1, -1), repeat=k)), dtype=float).reshape(2**k, k)


def small_ball_mod1(a, eps: float, mode: str = "exact", trials: int = 100000,
                    seed: int | None = None) -> BallProbability:
    """P(||sum_i xi_i a_i||_{R/Z} <= eps) for iid uniform signs xi_i."""
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    a = np.asarray(a, dtype=float)
    n = len(a)
    if mode == "exact":
        if n > 24:
            raise ValueError("exact enumeration limited to n <= 24")
        h = n // 2
        left = _sign_table(h) @ a[:h]
        right = _sign_table(n - h) @ a[h:]
        hits = 0
        for lo in range(0, len(left), 256):
            s = left[lo:lo + 256, None] + right[None, :]
            d = np.abs(s - np.rint(s))
            hits += int((d <= eps + _TIE).sum())
        v = hits / 2**n
        return BallProbability(v, v, v)
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    if seed is None:
        raise ValueError("Monte Carlo mode needs an explicit seed")
    rng = np.random.Generator(np.random.Philox(seed))
    hits = 0
    done = 0
    while done < trials:
        b = min(20000, trials - done)
        xi = rng.integers(0, 2, size=(b, n)) * 2 - 1
        s = xi @ a
        hits += int((np.abs(s - np.rint(s)) <= eps + _TIE).sum())
        done += b
    from .experiments.stats import wilson_interval
    lo, hi = wilson_interval(hits, trials)
    return BallProbability(hits / trials, lo, hi)


@dataclass(frozen=True)
class ErdosTuranTerms:
    term_eps: float
    term_inv_L0: float
    fourier_sum: float
    structured_term: float

    @property
    def total(self) -> float:
        """eps + 1/L0 + sum |mu_hat(k)|/k, the constant-free form."""
        return self.term_eps + self.term_inv_L0 + self.fourier_sum

    @property
    def classical_total(self) -> float:
        """2 eps + 1/(L0+1) + 3 sum |mu_hat(k)|/k, valid for any probability measure."""
        L0 = round(1 / self.term_inv_L0)
        return 2 * self.term_eps + 1 / (L0 + 1) + 3 * self.fourier_sum


def erdos_turan_rhs(a, eps: float, gamma: float = 0.125, kappa: float | None = None):
    """Ingredients eps, 1/L0, sum_{k<=L0} |mu_hat(k)|/k with L0 = floor(1/eps).

    ``structured_term`` is log(1/eps) (exp(-kappa^2) + exp(-4 gamma^2 sum a_i^2)),
    reported for comparison; it carries no constant.
    """
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    a = np.asarray(a, dtype=float)
    L0 = math.floor(1 / eps)
    k = np.arange(1, L0 + 1)
    mu_hat = np.prod(np.abs(np.cos(2 * np.pi * np.outer(k, a))), axis=1)
    kappa = len(a) ** 0.125 if kappa is None else kappa
    structured = math.log(1 / eps) * (math.exp(-kappa**2) + math.exp(-4 * gamma**2 * float(a @ a)))
    return ErdosTuranTerms(eps, 1 / L0, float((mu_hat / k).sum()), structured)


def smallp_bound_check(w, p: int):
    """exp(-m / 2p^2) with m = |supp w| (needs p < sqrt m), and whether rho obeys it."""
    m = support_size(_residues(w, p))
    if p * p >= m:
        raise ValueError("need p < sqrt(|supp w|)")
    bound = math.exp(-m / (2 * p * p))
    rho = rho_exact(w, DistributionSpec.bernoulli(), p).rho
    return bound, rho <= bound


# ----------------------------------------------------------------- report

@dataclass
class AntiConcReport:
    p: int
    n: int
    rho: Fraction | float
    argmax: int
    ulcd: int
    gamma: float
    kappa: float
    level_set_sizes: dict = field(default_factory=dict)
    rk: dict = field(default_factory=dict)
    support: int = 0
    gap: RankOneGAP | None = None
    n_prime: int | None = None

    def to_json(self):
        rho = fraction_to_decimal(Fraction(self.rho))
        out = {
            "n": self.n, "p": self.p, "rho": rho, "argmax_atom": self.argmax,
            "ulcd": self.ulcd, "gamma": self.gamma, "kappa": self.kappa,
            "level_set_sizes": {str(k): v for k, v in self.level_set_sizes.items()},
            "rk": {str(k): str(v) for k, v in self.rk.items()},
            "support": self.support, "gap": None,
        }
        if self.gap is not None:
            out["gap"] = {"dilation": self.gap.dilation, "radius": str(self.gap.radius),
                          "size": self.gap.size, "covered": len(self.gap.covered),
                          "n_prime": self.n_prime}
        return out


def anticonc_report(w, p: int, mu: DistributionSpec | None = None, gamma: float = 0.125,
                    kappa: float | None = None, ks=(1, 2), n_prime: int | None = None,
                    levels=(0.25, 0.5, 1, 2), mode: str = "exact") -> AntiConcReport:
    mu = mu or DistributionSpec.bernoulli()
    n = len(w)
    conc = rho_exact(w, mu, p, mode)
    params = ULCDParams(gamma, kappa)
    lift = centered_lift(w, p)
    rep = AntiConcReport(
        p=p, n=n, rho=conc.rho, argmax=argmax_atom(conc.distribution, p),
        ulcd=ulcd(lift, params), gamma=gamma, kappa=params.resolved_kappa(n),
        level_set_sizes={m: len(level_set(w, p, m)) for m in levels},
        rk={k: rk_count(w, p, k) for k in ks},
        support=support_size(_residues(w, p)),
    )
    if n_prime is not None:
        rep.gap = detect_rank_one_gap(w, p, n_prime)
        rep.n_prime = n_prime
    return rep
