import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fflab.anticonc import (DistributionSpec, RankOneGAP, ULCDParams, anticonc_report,
                            centered_lift, detect_rank_one_gap, erdos_turan_rhs, fjls_correction,
                            fourier_upper_bound, halasz_bound, level_set, min_dilation_norm,
                            rho_exact, rho_fourier, rk_count, rk_delta_count, small_ball_mod1,
                            smallp_bound_check, support_size, ulcd, verify_gap_containment)

BERN = DistributionSpec.bernoulli()
ODD_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31]


def brute_law(w, mu, p):
    """Law of sum mu_i w_i by enumerating every atom tuple."""
    law = [Fraction(0)] * p
    for combo in itertools.product(mu.atoms, repeat=len(w)):
        prob = math.prod(q for _, q in combo)
        law[sum(v * x for (v, _), x in zip(combo, w)) % p] += prob
    return law


def brute_rk(w, p, k):
    n = len(w)
    total = 0
    for idx in itertools.product(range(n), repeat=2 * k):
        for signs in itertools.product((1, -1), repeat=2 * k):
            total += sum(s * w[i] for s, i in zip(signs, idx)) % p == 0
    return total


def brute_ulcd(w, p, gamma, kappa):
    c = [x % p for x in w]
    c = [x - p if x > (p - 1) // 2 else x for x in c]
    wp = [x / p for x in c]
    norm = math.sqrt(sum(x * x for x in wp))
    for L in range(1, p + 1):
        dist = math.sqrt(sum((L * x - round(L * x)) ** 2 for x in wp))
        if dist <= min(gamma * L * norm, kappa) + 1e-12:
            return L
    raise AssertionError


def random_mu(rng, p):
    k = int(rng.integers(2, min(p, 4) + 1))
    values = rng.choice(p, size=k, replace=False)
    weights = rng.integers(1, 6, size=k)
    return DistributionSpec(tuple((int(v), Fraction(int(c), int(weights.sum())))
                                  for v, c in zip(values, weights)))


class TestDistribution:
    def test_validation(self):
        with pytest.raises(ValueError):
            DistributionSpec(((1, Fraction(1)),))
        with pytest.raises(ValueError):
            DistributionSpec(((0, Fraction(1, 2)), (1, Fraction(1, 3))))
        with pytest.raises(ValueError):
            DistributionSpec(((0, Fraction(3, 4)), (1, Fraction(1, 4))), alpha=Fraction(1, 2))

    def test_collapse_mod_two(self):
        with pytest.raises(ValueError):
            BERN.mod(2)
        assert BERN.mod(3) == {1: Fraction(1, 2), 2: Fraction(1, 2)}

    def test_json_roundtrip(self):
        mu = DistributionSpec.from_dict({0: Fraction(7, 10), 1: Fraction(3, 10)})
        assert DistributionSpec.from_json(mu.to_json()) == mu


class TestRho:
    def test_zero_vector(self):
        assert rho_exact([0, 0, 0], BERN, 7).rho == Fraction(6, 7)
        assert abs(rho_fourier([0, 0, 0], BERN, 7) - 6 / 7) < 1e-12

    def test_two_ones_mod_three(self):
        rho, dist = rho_exact([1, 1], BERN, 3)
        assert dist == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]
        assert rho == Fraction(1, 6)

    def test_fair_bit_mod_two(self):
        mu = DistributionSpec.uniform(2)
        assert rho_exact([1], mu, 2).rho == 0
        assert rho_fourier([1], mu, 2) < 1e-12

    @settings(max_examples=100, deadline=None)
    @given(st.sampled_from([2, 3, 5, 7, 11]), st.integers(1, 8), st.integers(0, 2**32))
    def test_matches_enumeration(self, p, n, seed):
        rng = np.random.default_rng(seed)
        mu = random_mu(rng, p) if p > 2 or rng.random() < 0.5 else DistributionSpec.uniform(2)
        if p > 2 and rng.random() < 0.5:
            mu = BERN
        w = rng.integers(0, p, size=n).tolist()
        law = brute_law(w, mu, p)
        got = rho_exact(w, mu, p)
        assert got.distribution == law
        assert got.rho == max(abs(x - Fraction(1, p)) for x in law)

    def test_fourier_matches_convolution(self):
        rng = np.random.default_rng(7)
        primes = [p for p in range(3, 98) if all(p % d for d in range(2, p))]
        for _ in range(100):
            p = int(rng.choice(primes))
            n = int(rng.integers(1, 51))
            mu = random_mu(rng, p)
            w = rng.integers(0, p, size=n)
            exact = rho_exact(w, mu, p, mode="float").rho
            assert abs(rho_fourier(w, mu, p) - exact) < 1e-9

    @settings(max_examples=80, deadline=None)
    @given(st.sampled_from(ODD_PRIMES), st.lists(st.integers(0, 100), min_size=1, max_size=20),
           st.randoms(use_true_random=False))
    def test_range_permutation_and_dilation(self, p, w, rnd):
        rho, dist = rho_exact(w, BERN, p)
        assert 0 <= rho <= 1 - Fraction(1, p)
        perm = list(w)
        rnd.shuffle(perm)
        assert rho_exact(perm, BERN, p).distribution == dist
        t = rnd.randrange(1, p)
        _, dil = rho_exact([t * x for x in w], BERN, p)
        assert all(dil[t * a % p] == dist[a] for a in range(p))

    @settings(max_examples=80, deadline=None)
    @given(st.sampled_from(ODD_PRIMES), st.lists(st.integers(0, 100), min_size=2, max_size=20),
           st.randoms(use_true_random=False))
    def test_restriction_increases_rho(self, p, w, rnd):
        I = sorted(rnd.sample(range(len(w)), rnd.randrange(1, len(w))))
        assert rho_exact([w[i] for i in I], BERN, p).rho >= rho_exact(w, BERN, p).rho

    def test_inverse_bound_without_small_dilations(self):
        rng = np.random.default_rng(11)
        checked = 0
        for _ in range(300):
            p = int(rng.choice(ODD_PRIMES))
            w = rng.integers(1, p, size=int(rng.integers(5, 40)))
            kappa = min_dilation_norm(w, p)
            rho = float(rho_exact(w, BERN, p).rho)
            assert rho <= math.exp(-kappa**2 / 2)
            checked += 1
        assert checked == 300

    def test_littlewood_offord_scale(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            p = int(rng.choice(ODD_PRIMES))
            n = int(rng.integers(4, 60))
            w = rng.integers(0, p, size=n)
            w[: (n + 1) // 2] = rng.integers(1, p, size=(n + 1) // 2)
            assert support_size(w % p) >= n / 2
            assert float(rho_exact(w, BERN, p).rho) <= 2 / math.sqrt(n)


class TestFourierBound:
    def test_zero_vector(self):
        assert fourier_upper_bound([0, 0], BERN, 5) == pytest.approx(4 / 5)

    def test_all_ones(self):
        w = [1] * 10
        assert fourier_upper_bound(w, BERN, 5) >= rho_exact(w, BERN, 5).rho

    def test_randomized(self):
        rng = np.random.default_rng(3)
        primes = [2] + ODD_PRIMES
        for _ in range(200):
            p = int(rng.choice(primes))
            mu = DistributionSpec.uniform(2) if p == 2 else random_mu(rng, p)
            w = rng.integers(0, p, size=int(rng.integers(1, 41)))
            assert fourier_upper_bound(w, mu, p) >= float(rho_exact(w, mu, p).rho) - 1e-12


class TestLift:
    def test_examples(self):
        assert centered_lift([3], 5).values == (Fraction(-2, 5),)
        assert centered_lift([2], 5).values == (Fraction(2, 5),)
        assert centered_lift([1, 2], 3).values == (Fraction(1, 3), Fraction(-1, 3))
        assert centered_lift([1], 2).values == (Fraction(1, 2),)

    @given(st.sampled_from(ODD_PRIMES), st.lists(st.integers(-500, 500), min_size=1, max_size=30))
    def test_roundtrip(self, p, w):
        lift = centered_lift(w, p)
        assert all(abs(v) <= Fraction(1, 2) for v in lift.values)
        assert lift.residues() == [x % p for x in w]


class TestULCD:
    def test_worked_example(self):
        assert ulcd(centered_lift([1, 1, 1, 1], 13), ULCDParams(0.125, 1)) == 12

    def test_zero_vector(self):
        with pytest.raises(ValueError):
            ulcd(centered_lift([0, 0], 7))

    def test_params(self):
        with pytest.raises(ValueError):
            ULCDParams(gamma=1.0)
        assert ULCDParams().resolved_kappa(256) == pytest.approx(2.0)

    @settings(max_examples=150, deadline=None)
    @given(st.sampled_from(ODD_PRIMES + [101, 257]),
           st.lists(st.integers(0, 300), min_size=1, max_size=12),
           st.sampled_from([0.125, 0.25, 0.5]), st.sampled_from([0.5, 1.0, 2.0, 5.0]))
    def test_matches_float_scan(self, p, w, gamma, kappa):
        assume(any(x % p for x in w))
        got = ulcd(centered_lift(w, p), ULCDParams(gamma, kappa))
        assert 1 <= got <= p
        assert got == brute_ulcd(w, p, gamma, kappa)

    def test_lower_bound_from_small_entries(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            p = int(rng.choice([101, 211, 307, 401]))
            T = int(rng.integers(2, 8))
            cap = math.floor(p / (2 * T))
            n = int(rng.integers(1, 12))
            w = rng.integers(-cap, cap + 1, size=n)
            if not w.any():
                w[0] = 1
            lift = centered_lift(w, p)
            assert max(abs(v) for v in lift.values) <= Fraction(1, 2 * T)
            assert ulcd(lift, ULCDParams(0.125, float(rng.uniform(0.1, 3)))) >= T

    def test_scan_order_does_not_matter(self):
        p, w = 31, [3, 7, 12, 30]
        lift = centered_lift(w, p)
        params = ULCDParams(0.25, 1.0)
        first = ulcd(lift, params)
        hits = [L for L in reversed(range(1, p + 1)) if brute_ulcd(w, p, 0.25, 1.0) <= L]
        assert min(hits) == first


class TestLevelSets:
    def test_example(self):
        assert level_set([1, 1], 5, 0.2) == {0, 1, 4}

    def test_large_m_is_everything(self):
        assert level_set([1, 2, 3], 7, 3 / 4) == set(range(7))

    def test_m_zero(self):
        assert level_set([1, 0, 2], 7, 0) == {0}

    def test_weighted_excludes_zero(self):
        assert 0 not in level_set([1, 2], 5, 10, mu=BERN)
        assert level_set([1, 2], 5, 10, mu=BERN) == {1, 2, 3, 4}

    def test_negative_m(self):
        with pytest.raises(ValueError):
            level_set([1], 5, -1)

    def test_cauchy_davenport_growth(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            p = int(rng.choice(ODD_PRIMES + [101]))
            w = rng.integers(0, p, size=int(rng.integers(1, 15)))
            m = float(rng.uniform(0, 1))
            T = len(level_set(w, p, m))
            for k in (2, 3):
                assert len(level_set(w, p, k * k * m)) >= min(p, k * T - (k - 1))


class TestHalasz:
    def test_examples(self):
        assert rk_count([1, 2], 5, 1) == 4
        assert rk_count([1], 3, 1) == 2
        assert rk_count([0, 0, 0], 7, 2) == 6**4

    @pytest.mark.parametrize("k", [1, 2])
    def test_matches_enumeration(self, k):
        rng = np.random.default_rng(k)
        for _ in range(25):
            p = int(rng.choice([2] + ODD_PRIMES))
            w = rng.integers(0, p, size=int(rng.integers(1, 5))).tolist()
            assert rk_count(w, p, k) == brute_rk(w, p, k)

    def test_all_ones_closed_form(self):
        for p in (3, 5, 7, 13):
            for n in (1, 4, 9):
                for k in (1, 2, 3):
                    signs = sum(math.comb(2 * k, j) for j in range(2 * k + 1)
                                if (2 * j - 2 * k) % p == 0)
                    assert rk_count([1] * n, p, k) == n ** (2 * k) * signs

    def test_character_sum_identity(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            p = int(rng.choice(ODD_PRIMES))
            w = rng.integers(0, p, size=int(rng.integers(1, 20)))
            k = int(rng.integers(1, 4))
            t = np.arange(p)[:, None]
            s = (2 * np.cos(2 * np.pi * t * w[None, :] / p).sum(axis=1)) ** (2 * k)
            assert math.isclose(s.sum() / p, rk_count(w, p, k), rel_tol=1e-6)

    def test_delta_examples(self):
        assert rk_delta_count([1, 2], 5, 1, Fraction(1, 2)) == 0
        independent = sum(1 for i, j in itertools.product(range(2), repeat=2) if i != j
                          for _ in itertools.product((1, -1), repeat=2))
        assert rk_delta_count([0, 0], 5, 1, Fraction(1, 2)) == independent

    def test_delta_budget(self):
        with pytest.raises(ValueError):
            rk_delta_count([1] * 30, 7, 3, 0.5)

    def test_delta_monotone_and_fjls(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            p = int(rng.choice(ODD_PRIMES))
            n = int(rng.integers(1, 6))
            w = rng.integers(0, p, size=n)
            for k in (1, 2):
                rk = rk_count(w, p, k)
                counts = [rk_delta_count(w, p, k, d) for d in (0.01, 0.25, 0.5, 1.0)]
                assert counts == sorted(counts, reverse=True)
                assert counts[0] <= rk
                for d in (0.25, 0.5, 1.0):
                    assert rk <= rk_delta_count(w, p, k, d) + fjls_correction(n, k, d)

    def test_side_conditions(self):
        with pytest.raises(ValueError):
            halasz_bound([1] * 50, 7, 1, 1.0)  # f > supp / 100
        with pytest.raises(ValueError):
            halasz_bound([1] * 200, 7, 300, 1.0)  # k > n / f

    def test_bound_holds(self):
        rng = np.random.default_rng(9)
        for i in range(120):
            p = int(rng.choice(ODD_PRIMES))
            n = int(rng.integers(5, 31)) if i % 2 else int(rng.integers(100, 220))
            w = rng.integers(0, p, size=n)
            supp = support_size(w % p)
            if supp == 0:
                continue
            f = supp / 100 * (1.0 if i % 2 else float(rng.uniform(0.5, 1)))
            k = int(rng.integers(1, 4))
            assert halasz_bound(w, p, k, f) >= float(rho_exact(w, BERN, p).rho)


class TestGAP:
    def test_constant_vector(self):
        p, c = 31, 7
        Q = detect_rank_one_gap([c] * 10, p, 3)
        assert Q.dilation * c % p in (1, p - 1)
        assert Q.radius == Fraction(1, p)
        assert Q.size == 3

    def test_random_vector_is_worse(self):
        rng = np.random.default_rng(0)
        w = rng.integers(0, 101, size=50)
        Q = detect_rank_one_gap(w, 101, 10)
        assert Q.radius >= Fraction(1, 101)
        assert verify_gap_containment(Q, w, 10)

    def test_sparse_zero_one(self):
        w = [0] * 12 + [1] * 3
        Q = detect_rank_one_gap(w, 13, 3)
        assert Q.radius == 0

    def test_containment(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            p = int(rng.choice(ODD_PRIMES))
            n = int(rng.integers(3, 20))
            w = rng.integers(0, p, size=n)
            n_prime = int(rng.integers(1, n))
            Q = detect_rank_one_gap(w, p, n_prime)
            assert verify_gap_containment(Q, w, n_prime)
            assert len(Q.covered) >= n - n_prime
            if Q.radius > 0:
                smaller = RankOneGAP(p, Q.dilation, Q.radius - Fraction(1, 2 * p), Q.covered)
                assert not verify_gap_containment(smaller, w, n_prime)
            assert verify_gap_containment(RankOneGAP(p, 1, Fraction(0), ()), w, n)

    def test_members(self):
        Q = RankOneGAP(11, 1, Fraction(2, 11), ())
        assert Q.members() == [0, 1, 2, 9, 10]
        assert Q.size == 5


class TestTorus:
    def test_halves(self):
        for n in range(1, 9):
            got = small_ball_mod1([0.5] * n, 0.1).value
            assert got == (1.0 if n % 2 == 0 else 0.0)

    def test_eps_half(self):
        assert small_ball_mod1([0.123, 0.456, 0.789], 0.5).value == 1.0

    def test_single(self):
        assert small_ball_mod1([0.3], 0.1).value == 0.0

    def test_exact_matches_loop(self):
        rng = np.random.default_rng(1)
        a = rng.uniform(0, 1, size=9)
        hits = 0
        for signs in itertools.product((1, -1), repeat=9):
            s = float(np.dot(signs, a))
            hits += abs(s - round(s)) <= 0.1
        assert small_ball_mod1(a, 0.1).value == hits / 2**9

    def test_monte_carlo(self):
        a = [0.31, 0.17, 0.05, 0.44, 0.23]
        exact = small_ball_mod1(a, 0.1).value
        mc = small_ball_mod1(a, 0.1, mode="monte_carlo", trials=20000, seed=3)
        assert mc.low - 0.01 <= exact <= mc.high + 0.01
        with pytest.raises(ValueError):
            small_ball_mod1(a, 0.1, mode="monte_carlo")

    def test_limits(self):
        with pytest.raises(ValueError):
            small_ball_mod1([0.1] * 25, 0.1)
        with pytest.raises(ValueError):
            small_ball_mod1([0.1], 0.6)

    def test_erdos_turan_classical_form(self):
        rng = np.random.default_rng(2)
        for i in range(300):
            a = rng.uniform(0, 1, size=int(rng.integers(1, 17)))
            eps = (0.05, 0.1, 0.2)[i % 3]
            rhs = erdos_turan_rhs(a, eps)
            assert small_ball_mod1(a, eps).value <= rhs.classical_total

    def test_constant_free_form_can_fail(self):
        # near-uniform sums put about 2 eps of mass on [-eps, eps]
        rng = np.random.default_rng(2)
        worst = 0.0
        for i in range(300):
            a = rng.uniform(0, 1, size=int(rng.integers(1, 17)))
            eps = (0.05, 0.1, 0.2)[i % 3]
            worst = max(worst, small_ball_mod1(a, eps).value - erdos_turan_rhs(a, eps).total)
        assert worst > 0

    def test_near_zero_is_vacuous(self):
        rhs = erdos_turan_rhs([1e-9] * 4, 0.1)
        assert rhs.fourier_sum == pytest.approx(sum(1 / k for k in range(1, 11)), rel=1e-6)
        assert rhs.total >= 1

    def test_cosine_bound_on_grid(self):
        theta = np.linspace(0, 1, 10001)
        two = 2 * theta
        dist = np.abs(two - np.rint(two))
        assert (np.abs(np.cos(2 * np.pi * theta)) <= np.exp(-2 * dist**2) + 1e-15).all()


class TestSmallP:
    def test_all_ones(self):
        bound, holds = smallp_bound_check([1] * 100, 3)
        assert bound == pytest.approx(math.exp(-100 / 18))
        assert holds

    def test_precondition(self):
        with pytest.raises(ValueError):
            smallp_bound_check([1] * 9, 3)

    def test_mod_two_signs_collapse(self):
        with pytest.raises(ValueError):
            smallp_bound_check([1] * 64, 2)

    def test_randomized(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            p = int(rng.choice([3, 5, 7]))
            m = int(rng.integers(p * p + 1, 150))
            w = rng.integers(1, p, size=m)
            assert smallp_bound_check(w, p)[1]


def test_support_size():
    assert support_size([0, 0, 0]) == 0
    assert support_size([1] * 5) == 5
    assert support_size([1, 0, 2, 0]) == 2


def test_report():
    rep = anticonc_report([1, 1, 1, 1], 13, gamma=0.125, kappa=1, ks=(1, 2), n_prime=1)
    assert rep.ulcd == 12
    assert rep.rk == {1: rk_count([1] * 4, 13, 1), 2: rk_count([1] * 4, 13, 2)}
    out = rep.to_json()
    assert out["gap"]["size"] == 3
    assert 0 <= rep.rho <= 1 - Fraction(1, 13)
