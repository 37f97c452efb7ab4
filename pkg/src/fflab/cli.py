"""Command line entry point: ``fflab <subcommand> ...``.

Exit codes: 0 success, 1 computation error, 2 usage error.
"""
from __future__ import annotations

import argparse
import datetime
import json
import sys
from fractions import Fraction

from . import exact_stats as es
from .anticonc import DistributionSpec, anticonc_report
from .ff_core import (BoundedValue, Partition, PolyOverFp, fraction_to_decimal,
                      irreducible_count, q_pochhammer)

MAX_SERIES_ORDER = 24


class UsageError(Exception):
    pass


def _dump(obj, args) -> str:
    if getattr(args, "timestamp", False):
        obj = dict(obj, timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat())
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, args):
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _value_fields(v):
    if isinstance(v, BoundedValue):
        return fraction_to_decimal(v.value), fraction_to_decimal(v.error, 6)
    if isinstance(v, Fraction):
        return str(v), "0"
    return str(v), "0"


def _parse_dist(text: str | None):
    """'v:num/den,v:num/den' -> DistributionSpec (default Bernoulli +-1)."""
    if not text:
        return DistributionSpec.bernoulli()
    atoms = {}
    for part in text.split(","):
        v, q = part.split(":")
        atoms[int(v)] = Fraction(q)
    return DistributionSpec.from_dict(atoms)


# ------------------------------------------------------------------ exact

EXACT_STATS = {
    "rank": (("n", "q", "k"), lambda a: es.uniform_rank_prob(a.n, a.q, a.k)),
    "corank-limit": (("p", "d"), lambda a: es.universal_corank_prob(a.p, a.d, a.tol)),
    "cohen-lenstra": (("q", "partition"),
                      lambda a: es.cohen_lenstra_measure(a.q, Partition.parse(a.partition), a.tol)),
    "cycle-weight": (("q", "partition"),
                     lambda a: es.cycle_index_weight(a.q, Partition.parse(a.partition))),
    "divisibility-limit": (("q", "d"), lambda a: es.divisibility_limit(a.q, a.d, a.tol)),
    "fine-herstein": (("q",), lambda a: es.fine_herstein_limit(a.q, a.tol)),
    "gl-order": (("n", "q"), lambda a: es.gl_order(a.n, a.q)),
    "irreducible-count": (("q", "d"), lambda a: irreducible_count(a.q, a.d)),
    "q-pochhammer": (("x", "m"), lambda a: q_pochhammer(Fraction(a.x), a.m, a.tol)),
}


def cmd_exact(args):
    needed, fn = EXACT_STATS[args.statistic]
    params = {}
    for name in needed:
        val = getattr(args, name)
        if val is None and not (name == "m" and args.statistic == "q-pochhammer"):
            raise UsageError(f"exact {args.statistic} needs --{name}")
        params[name] = val
    value, err = _value_fields(fn(args))
    if args.statistic in ("corank-limit", "cohen-lenstra", "divisibility-limit",
                          "fine-herstein") or (args.statistic == "q-pochhammer" and args.m is None):
        params["tol"] = args.tol
    return _dump({"statistic": args.statistic, "params": params, "value": value,
                  "error_bound": err}, args)


# ---------------------------------------------------------------- qseries

def cmd_qseries(args):
    if not 0 <= args.N <= args.max_order:
        raise UsageError(f"N must lie in [0, {args.max_order}]")
    params = {"q": args.q, "N": args.N}
    out = {"series": args.kind, "params": params}
    if args.kind == "derangement":
        s = es.derangement_series(args.q, args.N)
    elif args.kind == "unipotent":
        s = es.unipotent_series(args.q, args.N)
    else:
        ok, s = es.count_all_identity_check(args.q, args.N, args.include_x)
        params["include_x"] = args.include_x
        out["pass"] = ok
        s = es.cycle_index_product(args.q, args.N, args.include_x)
    coeffs = [str(c) for c in s.coeffs]
    out["coefficients"] = coeffs
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("n,coefficient\n")
            fh.writelines(f"{i},{c}\n" for i, c in enumerate(coeffs))
    return _dump(out, args)


# --------------------------------------------------------------- anticonc

def read_vector(path):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    n, p = (int(t) for t in lines[0].split())
    w = [int(t) for t in lines[1:]]
    if len(w) != n:
        raise UsageError(f"vector file declares n={n} but has {len(w)} entries")
    return w, p


def cmd_anticonc(args):
    w, p = read_vector(args.vector)
    mu = _parse_dist(args.dist)
    ks = tuple(range(1, args.k + 1))
    rep = anticonc_report(w, p, mu, gamma=args.gamma, kappa=args.kappa,
                          ks=ks, n_prime=args.nprime, mode=args.mode)
    out = rep.to_json()
    out["config"] = {"vector": w, "distribution": mu.to_json(), "ks": list(ks),
                     "nprime": args.nprime, "mode": args.mode}
    return _dump(out, args)


# --------------------------------------------------------------------- mc

def cmd_mc(args):
    from .experiments import ExperimentConfig, run_experiment
    if args.config:
        with open(args.config) as fh:
            obj = json.load(fh)
    else:
        missing = [f for f in ("stat", "n", "p", "trials") if getattr(args, f) is None]
        if missing:
            raise UsageError("mc needs --config or --stat, --n, --p, --trials, --seed")
        obj = {"statistic": args.stat, "n": args.n, "p": args.p, "trials": args.trials}
        if args.phi:
            obj["extension"] = {"phi": args.phi}
        if args.dist:
            obj["distribution"] = _parse_dist(args.dist).to_json()
    if args.seed is not None:
        obj["master_seed"] = args.seed
    if "master_seed" not in obj:
        raise UsageError("mc needs an explicit seed (--seed or master_seed in the config)")
    if args.workers is not None:
        obj["workers"] = args.workers
    cfg = ExperimentConfig.from_json(obj)
    res = run_experiment(cfg)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(res.to_csv())
    if args.table:
        return res.to_table()
    return _dump(res.to_json(), args)


# ----------------------------------------------------------------- oracle

def cmd_oracle(args):
    from .experiments import enumerate_oracle
    from .experiments.oracle import ORACLE_BUDGET
    mu = _parse_dist(args.dist) if args.dist else None
    size = args.p if mu is None else len(mu.mod(args.p))
    if size ** (args.n * args.n) > ORACLE_BUDGET:
        raise UsageError(f"enumeration budget exceeded: {size}^{args.n * args.n} > 1e6")
    phi = PolyOverFp.from_string(args.phi, args.p) if args.phi else None
    law = enumerate_oracle(args.n, args.p, args.stat, mu, phi)
    return _dump({"n": args.n, "p": args.p, "statistic": args.stat,
                  "weighting": args.dist or "uniform", "phi": args.phi,
                  "distribution": {str(k): str(v) for k, v in law.items()}}, args)


def cmd_selftest(args):
    from . import selftest
    ok = selftest.run(sys.stdout)
    if not ok:
        raise ArithmeticError("selftest failed")
    return ""


# ------------------------------------------------------------------ parser

def build_parser():
    ap = argparse.ArgumentParser(prog="fflab", description="finite field random matrix laboratory")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument("--timestamp", action="store_true", help="add a UTC timestamp")

    p = sub.add_parser("exact", help="closed-form probabilities")
    p.add_argument("statistic", choices=sorted(EXACT_STATS))
    for name in ("n", "q", "k", "p", "d", "m"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--x", help="argument of the q-Pochhammer product, e.g. 1/2")
    p.add_argument("--partition", help="partition literal such as [2,1]")
    p.add_argument("--tol", type=float, default=es.DEFAULT_TOL)
    common(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("qseries", help="cycle-index power series")
    p.add_argument("kind", choices=["derangement", "identity-check", "unipotent"])
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--N", type=int, default=es.DEFAULT_SERIES_ORDER)
    p.add_argument("--max-order", type=int, default=MAX_SERIES_ORDER)
    p.add_argument("--include-x", action="store_true",
                   help="identity-check over all matrices (keeps the factor for phi = x)")
    p.add_argument("--csv")
    common(p)
    p.set_defaults(func=cmd_qseries)

    p = sub.add_parser("anticonc", help="anti-concentration report for a vector")
    p.add_argument("--vector", required=True)
    p.add_argument("--gamma", type=float, default=0.125)
    p.add_argument("--kappa", type=float)
    p.add_argument("--k", type=int, default=2, help="report R_1 .. R_k")
    p.add_argument("--nprime", type=int)
    p.add_argument("--mode", choices=["exact", "float"], default="exact")
    p.add_argument("--dist", help="atoms as value:prob,... (default +-1 with prob 1/2)")
    common(p)
    p.set_defaults(func=cmd_anticonc)

    p = sub.add_parser("mc", help="Monte Carlo experiment")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--stat")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--phi")
    p.add_argument("--dist")
    p.add_argument("--csv")
    p.add_argument("--table", action="store_true", help="aligned text table instead of JSON")
    common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("oracle", help="exhaustive enumeration for tiny sizes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--stat", required=True,
                   choices=["rank", "corank", "eigfree", "gl_eigfree", "eigencount",
                            "divisibility", "partition"])
    p.add_argument("--dist")
    p.add_argument("--phi")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("selftest", help="run the bundled invariant checks")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        text = args.func(args)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"fflab: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError) as exc:
        print(f"fflab: computation failed: {exc}", file=sys.stderr)
        return 1
    if text:
        _emit(text, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
