"""Monte Carlo runners.  Work is split into fixed chunks of trial indices, so the
per-trial records (and everything aggregated from them) do not depend on the
number of worker processes."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from ..anticonc import DistributionSpec, rho_exact
from ..exact_stats import cohen_lenstra_measure, divisibility_limit, universal_corank_prob
from ..ff_core import Partition, PolyOverFp, PrimeModulus, partitions_of
from ..fp_linalg import (MatrixOverFp, batch_rank, batch_rank_gf2, canonical_normal_vector,
                         charpoly_coeffs, lambda_phi, rank_array, rank_minus_root,
                         roots_in_prime_field)
from .config import ExperimentConfig
from .result import Check, ExperimentResult
from .sampling import AUX_TAG, AtomSampler, sample_entries, trial_stream
from .stats import binomial_pmf, poisson_pmf, wilson_interval

CHUNK = 200
PARTITION_CAP = 4


def _chunks(start, stop):
    return [(a, min(a + CHUNK, stop)) for a in range(start, stop, CHUNK)]


def _run(fn, cfg: ExperimentConfig, start: int, stop: int, workers: int | None = None):
    chunks = _chunks(start, stop)
    workers = cfg.workers if workers is None else workers
    if workers <= 1 or len(chunks) <= 1:
        parts = [fn(cfg, a, b) for a, b in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(fn, itertools.repeat(cfg), *zip(*chunks)))
    return [rec for part in parts for rec in part]


def _matrices(cfg, a, b, rows, cols):
    sampler = AtomSampler(cfg.distribution, cfg.p)
    return [sample_entries(rows, cols, sampler, trial_stream(cfg.master_seed, t))
            for t in range(a, b)]


def _echo(cfg):
    return cfg.to_json(include_workers=False)


# ---------------------------------------------------------------------- rank

def _rank_chunk(cfg, a, b):
    mats = np.stack(_matrices(cfg, a, b, cfg.n, cfg.n))
    if cfg.p == 2:
        ranks = batch_rank_gf2(mats.astype(np.uint8))
    elif cfg.n <= 6:
        ranks = batch_rank(mats, cfg.p)
    else:
        ranks = [rank_array(M, cfg.p) for M in mats]
    return [cfg.n - int(r) for r in ranks]


def run_rank_experiment(cfg: ExperimentConfig, max_corank: int = 4) -> ExperimentResult:
    cor = _run(_rank_chunk, cfg, 0, cfg.trials)
    hist = Counter(cor)
    T = cfg.trials
    checks = []
    for d in range(min(max_corank, cfg.n) + 1):
        bv = universal_corank_prob(cfg.p, d)
        checks.append(Check.make(f"corank={d}", hist.get(d, 0), T, float(bv), float(bv.error),
                                 cfg.z_threshold, source="universal corank law"))
    return ExperimentResult("rank", _echo(cfg), T,
                            {"corank": {str(k): hist[k] for k in sorted(hist)}}, checks)


# ---------------------------------------------------------------- eigenvalues

def _eig_chunk(cfg, a, b):
    return [tuple(int(r) for r in roots_in_prime_field(charpoly_coeffs(M, cfg.p), cfg.p))
            for M in _matrices(cfg, a, b, cfg.n, cfg.n)]


def run_eigfree_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    p, T, z = cfg.p, cfg.trials, cfg.z_threshold
    events = [int(x) % p for x in cfg.options.get("events", [0])]
    cells = [int(c) for c in cfg.options.get("count_cells", [0, 1, 2])]
    recs = _run(_eig_chunk, cfg, 0, T)
    counts = Counter(len(r) for r in recs)
    single = divisibility_limit(p, 1)
    s = float(single)
    checks = []
    for a in events:
        k = sum(1 for r in recs if a in r)
        checks.append(Check.make(f"P(E_{a})", k, T, 1 / p, 0, z, source="1/p"))
        checks.append(Check.make(f"P(E_{a}) vs singular-limit", k, T, s, float(single.error), z,
                                 primary=False, source="1 - prod(1 - p^-i)"))
    if len(events) >= 2:
        k = sum(1 for r in recs if all(a in r for a in events))
        tag = ",".join(map(str, events))
        d = len(events)
        checks.append(Check.make(f"P(E_{{{tag}}})", k, T, p**-d, 0, z, source="1/p^d"))
        checks.append(Check.make(f"P(E_{{{tag}}}) vs independent limits", k, T, s**d, 0, z,
                                 primary=False, source="(1 - prod(1 - p^-i))^d"))
    for c in cells:
        checks.append(Check.make(f"#eigenvalues={c}", counts.get(c, 0), T, poisson_pmf(c), 0, z,
                                 source="Poisson(1)"))
        checks.append(Check.make(f"#eigenvalues={c} vs Binomial(p,.)", counts.get(c, 0), T,
                                 binomial_pmf(c, p, s), 0, z, primary=False,
                                 source="Binomial(p, 1 - prod(1 - p^-i))"))
    free = counts.get(0, 0)
    extras = {"eigfree_freq": free / T, "eigfree_dist_to_inv_e": abs(free / T - math.exp(-1)),
              "eigfree_finite_p_limit": (1 - s) ** p}
    return ExperimentResult("eigfree", _echo(cfg), T,
                            {"eigencount": {str(k): counts[k] for k in sorted(counts)}},
                            checks, extras)


# --------------------------------------------------------------- divisibility

def _div_chunk(cfg, a, b):
    phi = cfg.phi
    mod = PrimeModulus(cfg.p)
    limit = int(cfg.options.get("cross_check", 100))
    out = []
    for t, M in zip(range(a, b), _matrices(cfg, a, b, cfg.n, cfg.n)):
        cp = PolyOverFp([int(c) for c in charpoly_coeffs(M, cfg.p)], mod)
        div = (cp % phi).is_zero()
        fq = None
        if t < limit:
            fq = rank_minus_root(MatrixOverFp(M, mod), phi) < cfg.n
        out.append((div, fq))
    return out


def run_divisibility_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    if cfg.phi is None:
        raise ValueError("divisibility experiment needs phi")
    T = cfg.trials
    recs = _run(_div_chunk, cfg, 0, T)
    k = sum(1 for d, _ in recs if d)
    lim = divisibility_limit(cfg.p, cfg.phi.degree)
    sub = [(d, f) for d, f in recs if f is not None]
    agree = sum(1 for d, f in sub if d == f)
    checks = [
        Check.make("P(phi | charpoly)", k, T, float(lim), float(lim.error), cfg.z_threshold,
                   source="1 - prod(1 - q^-i), q = p^deg"),
        Check.make("F_q rank agrees with divisibility", agree, len(sub), 1, 0, exact=True,
                   source="equivalence"),
    ]
    return ExperimentResult("divisibility", _echo(cfg), T,
                            {"divisible": {"yes": k, "no": T - k}}, checks,
                            {"cross_checked": len(sub), "cross_agree": agree})


# ----------------------------------------------------------------- partitions

def _bucket(lam: Partition) -> str:
    return str(lam) if lam.size <= PARTITION_CAP else "other"


def _part_chunk(cfg, a, b):
    mod = PrimeModulus(cfg.p)
    phis = [cfg.phi] + ([PolyOverFp.from_string(cfg.options["phi2"], mod)]
                        if "phi2" in cfg.options else [])
    out = []
    for M in _matrices(cfg, a, b, cfg.n, cfg.n):
        Mf = MatrixOverFp(M, mod)
        out.append(tuple(str(lambda_phi(Mf, f)) for f in phis))
    return out


def run_partition_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    if cfg.phi is None:
        raise ValueError("partition experiment needs phi")
    p, T, z = cfg.p, cfg.trials, cfg.z_threshold
    recs = _run(_part_chunk, cfg, 0, T)
    q1 = p**cfg.phi.degree
    small = [lam for s in range(PARTITION_CAP + 1) for lam in partitions_of(s)]

    def bucketed(i):
        return Counter(_bucket(Partition.parse(r[i])) for r in recs)

    h1 = bucketed(0)
    checks = []
    total = Fraction(0)
    for lam in small:
        m = cohen_lenstra_measure(q1, lam)
        total += m.value
        checks.append(Check.make(f"lambda={lam}", h1.get(str(lam), 0), T, float(m),
                                 float(m.error), z, source=f"Cohen-Lenstra q={q1}"))
    checks.append(Check.make("lambda=other", h1.get("other", 0), T, float(1 - total), 0, z,
                             source=f"Cohen-Lenstra q={q1}"))
    hists = {"lambda": {k: h1[k] for k in sorted(h1)}}
    extras = {}
    if "phi2" in cfg.options:
        phi2 = PolyOverFp.from_string(cfg.options["phi2"], p)
        q2 = p**phi2.degree
        joint = Counter((_bucket(Partition.parse(r[0])), _bucket(Partition.parse(r[1])))
                        for r in recs)
        h2 = bucketed(1)
        hists["lambda2"] = {k: h2[k] for k in sorted(h2)}
        hists["joint"] = {f"{a}|{b}": joint[(a, b)] for a, b in sorted(joint)}
        top = [Partition(()), Partition((1,))]
        for l1, l2 in itertools.product(top, top):
            pred = float(cohen_lenstra_measure(q1, l1)) * float(cohen_lenstra_measure(q2, l2))
            key = (str(l1), str(l2))
            checks.append(Check.make(f"joint {l1}|{l2}", joint.get(key, 0), T, pred, 0, z,
                                     source="product of limiting marginals"))
            extras[f"empirical_marginal_product {l1}|{l2}"] = (
                h1.get(str(l1), 0) / T * h2.get(str(l2), 0) / T)
    return ExperimentResult("partition", _echo(cfg), T, hists, checks, extras)


# -------------------------------------------------------------- normal vectors

def _nv_chunk(cfg, a, b):
    p, n = cfg.p, cfg.n
    mod = PrimeModulus(p)
    pair = cfg.options.get("pair", {"i": 1, "j": 0, "a": 1})
    deltas = cfg.options.get("deltas", [0.5])
    want_rho = cfg.options.get("rho", True)
    out = []
    for M in _matrices(cfg, a, b, n, n - 1):
        w = canonical_normal_vector(MatrixOverFp(M, mod))
        if w is None:
            out.append(None)
            continue
        w = np.asarray(w, dtype=np.int64)
        wi, wj = int(w[pair["i"]]), int(w[pair["j"]])
        ratio_hit = wj != 0 and wi * pow(wj, -1, p) % p == int(pair["a"]) % p
        dev = np.abs(np.bincount(w, minlength=p) / n - 1 / p)
        rec = {"w0_zero": bool(w[0] == 0), "wj_nonzero": wj != 0, "pair": bool(ratio_hit),
               "maxdev": float(dev.max()),
               "equi": [bool((dev <= d / p).all()) for d in deltas]}
        if want_rho:
            rec["rho"] = float(rho_exact(w, cfg.distribution, p).rho)
        out.append(rec)
    return out


def run_normal_vector_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    p, n, z = cfg.p, cfg.n, cfg.z_threshold
    target = cfg.options.get("target_valid")
    if target is None:
        recs = _run(_nv_chunk, cfg, 0, cfg.trials)
    else:
        # sample until `target` full-rank trials are collected; keep the minimal prefix
        recs, start = [], 0
        block = CHUNK * max(1, cfg.workers)
        while sum(r is not None for r in recs) < target:
            if start >= cfg.trials:
                raise RuntimeError("trial budget exhausted before reaching target_valid")
            stop = min(start + block, cfg.trials)
            recs += _run(_nv_chunk, cfg, start, stop)
            start = stop
        seen = 0
        for idx, r in enumerate(recs):
            seen += r is not None
            if seen == target:
                recs = recs[:idx + 1]
                break
    sampled = len(recs)
    valid = [r for r in recs if r is not None]
    V = len(valid)
    pair = cfg.options.get("pair", {"i": 1, "j": 0, "a": 1})
    deltas = cfg.options.get("deltas", [0.5])
    cond = [r for r in valid if r["wj_nonzero"]]
    checks = [
        Check.make("P(w[0] = 0)", sum(r["w0_zero"] for r in valid), V, 1 / p, 0, z, source="1/p"),
        Check.make(f"P(w[{pair['i']}] = {pair['a']} w[{pair['j']}] | w[{pair['j']}] != 0)",
                   sum(r["pair"] for r in cond), len(cond), 1 / p, 0, z, source="1/p"),
        Check.make(f"P(w[{pair['i']}] = {pair['a']} w[{pair['j']}] and w[{pair['j']}] != 0)",
                   sum(r["pair"] for r in valid), V, (p - 1) / p**2, 0, z, primary=False,
                   source="(p-1)/p^2 (uniform vector)"),
    ]
    extras = {"sampled": sampled, "full_rank": V, "excluded": sampled - V,
              "max_entry_deviation": max((r["maxdev"] for r in valid), default=0.0)}
    for k, d in enumerate(deltas):
        hits = sum(r["equi"][k] for r in valid)
        f = hits / V if V else 0.0
        extras[f"equidistribution_freq(delta={d})"] = f
        if 0 < f < 1:
            extras[f"fitted_c(delta={d})"] = -p * math.log(1 - f) / (d * d * n)
        elif f == 1:
            hi = wilson_interval(V - hits, V)[1]
            extras[f"fitted_c_lower(delta={d})"] = -p * math.log(hi) / (d * d * n)
    if valid and "rho" in valid[0]:
        rmax = max(r["rho"] for r in valid)
        extras["max_rho"] = rmax
        thr = cfg.options.get("rho_threshold")
        if thr is not None:
            below = sum(r["rho"] < thr for r in valid)
            checks.append(Check.make(f"rho < {thr}", below, V, 1, 0, exact=True,
                                     source="frozen threshold"))
    return ExperimentResult("normal_vector", _echo(cfg), sampled,
                            {"rank_deficient": {"excluded": sampled - V, "kept": V}},
                            checks, extras)


# -------------------------------------------------- membership in a subspace

def _subspace(cfg, d):
    p, n = cfg.p, cfg.n
    stream = trial_stream(cfg.master_seed, 0, AUX_TAG)
    uniform = AtomSampler(DistributionSpec.uniform(p), p)
    while True:
        V = uniform.draw(stream, d * n).reshape(d, n)
        if rank_array(V, p) == d:
            return V


def _membership_law(V, mu, p):
    """Exact P(X . v_i = 0 for all i) for X with iid mu entries (convolution on F_p^d)."""
    d, n = V.shape
    law = mu.mod(p)
    D = math.lcm(*(q.denominator for q in law.values()))
    state = np.zeros((p,) * d, dtype=object)
    state[:] = 0
    state[(0,) * d] = 1
    for k in range(n):
        new = np.zeros_like(state)
        new[:] = 0
        for v, q in law.items():
            shift = tuple(int(v * V[i, k] % p) for i in range(d))
            new += int(q * D) * np.roll(state, shift, axis=tuple(range(d)))
        state = new
    return Fraction(int(state[(0,) * d]), D**n)


def _hd_chunk(cfg, a, b):
    V = _subspace(cfg, int(cfg.options.get("codim", 1)))
    cols = _matrices(cfg, a, b, 1, cfg.n)
    return [bool(((V @ x[0]) % cfg.p == 0).all()) for x in cols]


def run_highdim_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    p, T, z = cfg.p, cfg.trials, cfg.z_threshold
    d = int(cfg.options.get("codim", 1))
    V = _subspace(cfg, d)
    delta = Fraction(0)
    for t in itertools.product(range(p), repeat=d):
        if any(t):
            w = np.array(t, dtype=np.int64) @ V % p
            delta = max(delta, rho_exact(w, cfg.distribution, p).rho)
    exact = _membership_law(V, cfg.distribution, p)
    hits = sum(_run(_hd_chunk, cfg, 0, T))
    target = Fraction(1, p**d)
    checks = [
        Check.make("|P(X in H) - p^-d| <= delta", int(abs(exact - target) <= delta), 1, 1, 0,
                   exact=True, source="exact convolution"),
        Check.make("P(X in H) vs exact law", hits, T, float(exact), 0, z, source="exact law"),
    ]
    se = math.sqrt(float(target) * (1 - float(target)) / T)
    within = abs(hits / T - float(target)) <= float(delta) + z * se
    checks.append(Check.make("P(X in H) within delta + z se of p^-d", int(within), 1, 1, 0,
                             exact=True, source="delta + z sigma"))
    extras = {"delta": float(delta), "exact_membership": float(exact), "codim": d}
    return ExperimentResult("highdim", _echo(cfg), T, {"member": {"yes": hits, "no": T - hits}},
                            checks, extras)


RUNNERS = {
    "rank": run_rank_experiment,
    "eigfree": run_eigfree_experiment,
    "divisibility": run_divisibility_experiment,
    "partition": run_partition_experiment,
    "normal_vector": run_normal_vector_experiment,
    "highdim": run_highdim_experiment,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[cfg.statistic](cfg)
