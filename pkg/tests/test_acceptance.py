"""Acceptance criteria, each asserted at its stated tolerance.

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per criterion is
printed in the terminal summary.
"""
import itertools
import json
import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from fflab import exact_stats as es
from fflab.anticonc import (DistributionSpec, ULCDParams, centered_lift, erdos_turan_rhs,
                            fourier_upper_bound, halasz_bound, rho_exact, rho_fourier, rk_count,
                            small_ball_mod1, smallp_bound_check, support_size, ulcd)
from fflab.experiments import ExperimentConfig, enumerate_oracle, run_experiment
from fflab.experiments.stats import statistical_verdict
from fflab.ff_core import Partition, partitions_of
from fflab.fp_linalg import MatrixOverFp, rank

BERN = DistributionSpec.bernoulli()
Z = 4.0
ODD_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31]


def criterion(number, title):
    return pytest.mark.criterion(number, title)


def within(check, note):
    note(f"{check.name}: freq={check.freq:.5f} pred={check.pred:.6f} z={check.z:+.2f}")
    return abs(check.z) <= Z


# ------------------------------------------------------------------ exact laws

@criterion(1, "rank law equals enumeration for small (n, p), under 30 s")
def test_rank_law_vs_enumeration(measured):
    start = time.perf_counter()
    for n, p in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)]:
        law = enumerate_oracle(n, p, "rank")
        assert law == {n - k: es.uniform_rank_prob(n, p, k) for k in range(n + 1)}
    assert enumerate_oracle(2, 2, "rank") == {2: Fraction(6, 16), 1: Fraction(9, 16),
                                              0: Fraction(1, 16)}
    elapsed = time.perf_counter() - start
    measured(f"{elapsed:.2f} s")
    assert elapsed < 30


@criterion(2, "derangement coefficient a_2 = 1/3 equals GL(2,2) count, under 1 s")
def test_derangement_coefficient(measured):
    start = time.perf_counter()
    a2 = es.derangement_series(2, 2)[2]
    eye = np.eye(2, dtype=np.int64)
    free = invertible = 0
    for entries in itertools.product(range(2), repeat=4):
        A = np.array(entries).reshape(2, 2)
        if rank(MatrixOverFp(A, 2)) == 2:
            invertible += 1
            free += rank(MatrixOverFp((A - eye) % 2, 2)) == 2
    elapsed = time.perf_counter() - start
    measured(f"a_2={a2}, enumeration {free}/{invertible}, {elapsed:.3f} s")
    assert (free, invertible) == (2, 6)
    assert a2 == Fraction(1, 3) == Fraction(free, invertible)
    assert elapsed < 1


@criterion(3, "cycle-index identity exact for q in {2,3,4}, N <= 6, under 10 s")
def test_cycle_index_identity(measured):
    start = time.perf_counter()
    results = {(q, N): es.count_all_identity_check(q, N)[0] for q in (2, 3, 4) for N in range(7)}
    elapsed = time.perf_counter() - start
    measured(f"{sum(results.values())}/{len(results)} exact, {elapsed:.2f} s")
    assert all(results.values())
    assert elapsed < 10


# ------------------------------------------------------------ Monte Carlo laws

@criterion(4, "corank law on F_2 with P(1)=0.3, n=100, 1e4 trials, under 2 min")
def test_rank_universality(measured):
    cfg = ExperimentConfig.from_json({
        "n": 100, "p": 2, "trials": 10_000, "master_seed": 20240401, "statistic": "rank",
        "distribution": {"atoms": [{"value": 0, "num": 7, "den": 10},
                                   {"value": 1, "num": 3, "den": 10}]}})
    start = time.perf_counter()
    res = run_experiment(cfg)
    elapsed = time.perf_counter() - start
    c0, c1 = res.check("corank=0"), res.check("corank=1")
    assert round(c0.pred, 6) == 0.288788 and round(c1.pred, 6) == 0.577576
    ok = within(c0, measured) & within(c1, measured)
    measured(f"{elapsed:.1f} s")
    assert ok
    assert elapsed < 120


@criterion(5, "phi = x^2+1 divides charpoly over F_3, n=100, 1e4 trials, under 3 min")
def test_divisibility(measured):
    cfg = ExperimentConfig.from_json({
        "n": 100, "p": 3, "trials": 10_000, "master_seed": 77, "statistic": "divisibility",
        "extension": {"phi": "1,0,1", "degree": 2}, "options": {"cross_check": 100}})
    start = time.perf_counter()
    res = run_experiment(cfg)
    elapsed = time.perf_counter() - start
    main = res.check("P(phi | charpoly)")
    cross = res.check("F_q rank agrees with divisibility")
    assert round(main.pred, 5) == 0.12344
    ok = within(main, measured)
    measured(f"F_q-rank agreement {cross.count}/{cross.trials}; {elapsed:.1f} s")
    assert ok
    assert cross.trials == 100 and cross.count == 100
    assert elapsed < 180


@criterion(6, "Cohen-Lenstra law of lambda_{x-1}, p=3, n=80, 1e4 trials")
def test_cohen_lenstra(measured):
    cfg = ExperimentConfig.from_json({
        "n": 80, "p": 3, "trials": 10_000, "master_seed": 31337, "statistic": "partition",
        "extension": {"phi": "2,1", "degree": 1}})
    res = run_experiment(cfg)
    empty, one = res.check("lambda=[]"), res.check("lambda=[1]")
    assert round(empty.pred, 6) == 0.560126 and round(one.pred, 6) == 0.280063
    total = sum(float(es.cohen_lenstra_measure(3, lam).value)
                for s in range(21) for lam in partitions_of(s))
    measured(f"normalization error {abs(total - 1):.2e}")
    ok = within(empty, measured) & within(one, measured)
    assert ok
    assert abs(total - 1) < 1e-6


# ------------------------------------------------------------------ eigenvalues

def eig_config(p, n, trials, seed, **options):
    return ExperimentConfig.from_json({"n": n, "p": p, "trials": trials, "master_seed": seed,
                                       "statistic": "eigfree", "options": options})


@pytest.fixture(scope="module")
def joint_run():
    return run_experiment(eig_config(5, 60, 20_000, 5060, events=[0, 1]))


@pytest.fixture(scope="module")
def trend_runs():
    return {p: run_experiment(eig_config(p, 80, 20_000, 8000 + p, count_cells=[0, 1, 2]))
            for p in (5, 13, 31)}


@criterion(7, "P(0 is an eigenvalue) within 4 sigma of 1/5 (p=5, n=60, 2e4 trials)")
def test_single_eigenvalue(joint_run, measured):
    assert within(joint_run.check("P(E_0)"), measured)


@criterion(7, "P(0 and 1 are eigenvalues) within 4 sigma of 1/25 (p=5, n=60)")
def test_joint_eigenvalues(joint_run, measured):
    assert within(joint_run.check("P(E_{0,1})"), measured)


@criterion(7, "eigenvalue count within 4 sigma of Poisson(1) at cells 0,1,2 (p=13, n=80)")
def test_eigenvalue_count_poisson(trend_runs, measured):
    res = trend_runs[13]
    oks = [within(res.check(f"#eigenvalues={c}"), measured) for c in (0, 1, 2)]
    assert all(oks)


@criterion(7, "|freq_eigfree(p) - 1/e| decreasing over p = 5, 13, 31 at n=80")
def test_eigenvalue_free_trend(trend_runs, measured):
    gaps = [abs(trend_runs[p].extras["eigfree_freq"] - math.exp(-1)) for p in (5, 13, 31)]
    measured("gaps " + ", ".join(f"{g:.4f}" for g in gaps))
    assert gaps[0] > gaps[1] > gaps[2]


# --------------------------------------------------------------- normal vectors

@criterion(8, "normal vectors, +-1 entries, p=3, n=200, 2000 full-rank trials")
def test_normal_vectors(measured):
    cfg = ExperimentConfig.from_json({
        "n": 200, "p": 3, "trials": 4000, "master_seed": 200, "statistic": "normal_vector",
        "options": {"target_valid": 2000, "rho_threshold": 0.02, "deltas": [0.5]}})
    res = run_experiment(cfg)
    assert res.extras["full_rank"] == 2000
    ok = within(res.check("P(w[0] = 0)"), measured)
    rmax = res.extras["max_rho"]
    equi = res.extras["equidistribution_freq(delta=0.5)"]
    measured(f"max rho={rmax:.3g} (< 0.02); equidistribution freq={equi:.4f} (> 0.99)")
    assert ok
    assert rmax < 0.02
    assert equi > 0.99


# -------------------------------------------------------- anti-concentration

def sign_enumeration(w, p):
    law = [Fraction(0)] * p
    weight = Fraction(1, 2 ** len(w))
    for signs in itertools.product((1, -1), repeat=len(w)):
        law[sum(s * x for s, x in zip(signs, w)) % p] += weight
    return max(abs(x - Fraction(1, p)) for x in law)


def tuple_enumeration(w, p, k):
    count = 0
    for idx in itertools.product(range(len(w)), repeat=2 * k):
        for signs in itertools.product((1, -1), repeat=2 * k):
            count += sum(s * w[i] for s, i in zip(signs, idx)) % p == 0
    return count


@criterion(9, "rho_exact equals sign enumeration (n <= 8)")
def test_rho_vs_enumeration(measured):
    rng = np.random.default_rng(91)
    bad = 0
    for _ in range(100):
        p = int(rng.choice(ODD_PRIMES))
        w = rng.integers(0, p, size=int(rng.integers(1, 9))).tolist()
        bad += rho_exact(w, BERN, p).rho != sign_enumeration(w, p)
    measured(f"{bad} mismatches in 100")
    assert bad == 0


@criterion(9, "rk_count equals tuple enumeration (n <= 4, k <= 2)")
def test_rk_vs_enumeration(measured):
    rng = np.random.default_rng(92)
    bad = 0
    for _ in range(100):
        p = int(rng.choice([2] + ODD_PRIMES))
        k = int(rng.integers(1, 3))
        w = rng.integers(0, p, size=int(rng.integers(1, 5))).tolist()
        bad += rk_count(w, p, k) != tuple_enumeration(w, p, k)
    measured(f"{bad} mismatches in 100")
    assert bad == 0


@criterion(9, "rho_fourier equals rho_exact to 1e-9 on 100 cases")
def test_fourier_vs_convolution(measured):
    rng = np.random.default_rng(93)
    primes = [p for p in range(3, 98) if all(p % d for d in range(2, p))]
    worst = 0.0
    for _ in range(100):
        p = int(rng.choice(primes))
        w = rng.integers(0, p, size=int(rng.integers(1, 51)))
        worst = max(worst, abs(rho_fourier(w, BERN, p) - float(rho_exact(w, BERN, p).rho)))
    measured(f"max difference {worst:.2e}")
    assert worst < 1e-9


@criterion(9, "Halasz bound >= rho on 100+ instances")
def test_halasz_inequality(measured):
    rng = np.random.default_rng(94)
    violations = tried = 0
    while tried < 120:
        p = int(rng.choice(ODD_PRIMES))
        n = int(rng.integers(100, 250))
        w = rng.integers(0, p, size=n)
        supp = support_size(w % p)
        f = float(rng.uniform(0.2, 1.0)) * supp / 100
        k = int(rng.integers(1, 4))
        if k > n / f:
            continue
        tried += 1
        violations += halasz_bound(w, p, k, f) < float(rho_exact(w, BERN, p).rho)
    measured(f"{violations} violations in {tried}")
    assert violations == 0


@criterion(9, "Fourier-sum bound >= rho on 100+ instances")
def test_fourier_sum_inequality(measured):
    rng = np.random.default_rng(95)
    violations = 0
    for _ in range(200):
        p = int(rng.choice(ODD_PRIMES))
        w = rng.integers(0, p, size=int(rng.integers(1, 41)))
        violations += fourier_upper_bound(w, BERN, p) < float(rho_exact(w, BERN, p).rho) - 1e-12
    measured(f"{violations} violations in 200")
    assert violations == 0


@criterion(9, "small ball mod 1 <= eps + 1/L0 + sum |mu_hat(k)|/k on 100+ instances")
def test_erdos_turan_inequality(measured):
    rng = np.random.default_rng(96)
    violations = 0
    worst = -1.0
    for i in range(150):
        a = rng.uniform(0, 1, size=int(rng.integers(1, 17)))
        eps = (0.05, 0.1, 0.2)[i % 3]
        gap = small_ball_mod1(a, eps).value - erdos_turan_rhs(a, eps).total
        worst = max(worst, gap)
        violations += gap > 0
    measured(f"{violations} violations in 150, worst excess {worst:.2e}")
    assert violations == 0


@criterion(9, "rho <= exp(-m / 2p^2) when p < sqrt(m) on 100+ instances")
def test_small_p_inequality(measured):
    rng = np.random.default_rng(97)
    violations = 0
    for _ in range(120):
        p = int(rng.choice([3, 5, 7]))
        w = rng.integers(0, p, size=int(rng.integers(p * p + 10, 200)))
        if support_size(w % p) <= p * p:
            w[: p * p + 1] = 1
        violations += not smallp_bound_check(w, p)[1]
    measured(f"{violations} violations in 120")
    assert violations == 0


# ----------------------------------------------------------------------- ULCD

@criterion(10, "ULCD: worked example, small-entry lower bound, ULCD <= p")
def test_ulcd(measured):
    assert ulcd(centered_lift([1, 1, 1, 1], 13), ULCDParams(0.125, 1)) == 12
    rng = np.random.default_rng(100)
    lower_ok = 0
    for _ in range(50):
        p = int(rng.choice([101, 211, 401, 1009]))
        T = int(rng.integers(2, 10))
        cap = p // (2 * T)
        w = rng.integers(-cap, cap + 1, size=int(rng.integers(1, 20)))
        if not w.any():
            w[0] = 1
        lift = centered_lift(w, p)
        assert max(abs(v) for v in lift.values) <= Fraction(1, 2 * T)
        lower_ok += ulcd(lift, ULCDParams(0.125, float(rng.uniform(0.1, 4)))) >= T
    upper_ok = 0
    for _ in range(100):
        p = int(rng.choice(ODD_PRIMES + [101]))
        w = rng.integers(1, p, size=int(rng.integers(1, 30)))
        upper_ok += ulcd(centered_lift(w, p)) <= p
    measured(f"lower bound {lower_ok}/50, ULCD <= p {upper_ok}/100")
    assert lower_ok == 50 and upper_ok == 100


# ---------------------------------------------------------------- determinism

@criterion(11, "mc output is byte-identical at --workers 1 and --workers 8")
def test_determinism(tmp_path, measured):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 30, "p": 3, "trials": 2000, "master_seed": 11,
                               "statistic": "eigfree"}))

    def run(workers):
        proc = subprocess.run([sys.executable, "-m", "fflab", "mc", "--config", str(cfg),
                               "--workers", str(workers)], capture_output=True, check=True)
        return proc.stdout

    one, eight = run(1), run(8)
    measured(f"{len(one)} bytes each")
    assert one == eight
