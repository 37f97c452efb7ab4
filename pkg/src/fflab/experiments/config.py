from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from ..anticonc import DistributionSpec
from ..ff_core import PolyOverFp, PrimeModulus, is_irreducible

SCHEMA_VERSION = "1"
STATISTICS = ("rank", "eigfree", "divisibility", "partition", "normal_vector", "highdim")


@dataclass
class ExperimentConfig:
    n: int
    p: int
    distribution: DistributionSpec
    trials: int
    master_seed: int
    statistic: str
    workers: int = 1
    phi: PolyOverFp | None = None
    z_threshold: float = 4.0
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        PrimeModulus(self.p)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        self.distribution.mod(self.p)
        if self.phi is not None and (not self.phi.is_monic() or not is_irreducible(self.phi)):
            raise ValueError(f"phi = [{self.phi}] is not monic irreducible over F_{self.p}")

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        p = int(obj["p"])
        ext = obj.get("extension")
        phi = PolyOverFp.from_string(ext["phi"], p) if ext else None
        if ext and "degree" in ext and phi.degree != int(ext["degree"]):
            raise ValueError("extension degree does not match phi")
        dist = obj.get("distribution")
        if dist:
            mu = DistributionSpec.from_json(dist)
        else:
            # +-1 collapses mod 2, so fall back to a fair bit there
            mu = DistributionSpec.uniform(2) if p == 2 else DistributionSpec.bernoulli()
        policy = obj.get("policy") or {}
        return cls(n=int(obj["n"]), p=p, distribution=mu, trials=int(obj["trials"]),
                   master_seed=int(obj["master_seed"]), statistic=obj["statistic"],
                   workers=int(obj.get("workers", 1)), phi=phi,
                   z_threshold=float(policy.get("z", 4.0)),
                   options=dict(obj.get("options") or {}))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_json(self, include_workers: bool = True) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "n": self.n, "p": self.p,
            "extension": ({"phi": str(self.phi), "degree": self.phi.degree}
                          if self.phi is not None else None),
            "distribution": self.distribution.to_json(),
            "trials": self.trials, "master_seed": self.master_seed,
            "statistic": self.statistic,
            "policy": {"kind": "normal", "z": self.z_threshold},
            "options": self.options,
        }
        if include_workers:
            out["workers"] = self.workers
        return out


def bernoulli_config(**kw) -> ExperimentConfig:
    kw.setdefault("distribution", DistributionSpec.bernoulli())
    return ExperimentConfig(**kw)


def two_point(p0: Fraction, v0=0, v1=1) -> DistributionSpec:
    return DistributionSpec(((v0, Fraction(p0)), (v1, 1 - Fraction(p0))))
