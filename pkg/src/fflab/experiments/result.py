from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .stats import statistical_verdict, wilson_interval

CSV_HEADER = ["bucket", "count", "freq", "pred", "pred_err", "z"]


def _num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass
class Check:
    name: str
    count: int
    trials: int
    pred: float
    pred_err: float
    z: float
    passed: bool
    primary: bool = True
    source: str = ""

    @classmethod
    def make(cls, name, count, trials, pred, pred_err=0.0, z_threshold=4.0, primary=True,
             source="", exact=False):
        v = statistical_verdict(count, trials, pred, "exact" if exact else z_threshold)
        return cls(name, int(count), int(trials), float(pred), float(pred_err), v.z, v.passed,
                   primary, source)

    @property
    def freq(self) -> float:
        return self.count / self.trials if self.trials else 0.0

    def to_json(self):
        lo, hi = wilson_interval(self.count, self.trials)
        return {"name": self.name, "count": self.count, "trials": self.trials,
                "freq": self.freq, "wilson_low": lo, "wilson_high": hi,
                "pred": self.pred, "pred_err": self.pred_err, "z": _num(self.z),
                "pass": self.passed, "primary": self.primary, "source": self.source}


@dataclass
class ExperimentResult:
    statistic: str
    config: dict
    trials: int
    histograms: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.primary)

    def check(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self):
        return {
            "schema_version": "1",
            "statistic": self.statistic,
            "config": self.config,
            "trials": self.trials,
            "histograms": self.histograms,
            "checks": [c.to_json() for c in self.checks],
            "extras": {k: _num(v) for k, v in self.extras.items()},
            "passed": self.passed,
        }

    def to_table(self) -> str:
        head = ["check", "count", "trials", "freq", "pred", "pred_err", "z", "pass"]
        rows = [head]
        for c in self.checks:
            rows.append([c.name + ("" if c.primary else " *"), str(c.count), str(c.trials),
                         f"{c.freq:.6f}", f"{c.pred:.6f}", f"{c.pred_err:.1e}",
                         f"{c.z:+.2f}" if math.isfinite(c.z) else "inf",
                         "PASS" if c.passed else "FAIL"])
        widths = [max(len(r[i]) for r in rows) for i in range(len(head))]
        lines = ["  ".join(r[i].ljust(widths[i]) if i == 0 else r[i].rjust(widths[i])
                           for i in range(len(head))) for r in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        lines.append("(* = supplementary check, not part of the verdict)")
        for k, v in self.extras.items():
            lines.append(f"{k}: {v}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in self.checks:
            w.writerow([c.name, c.count, repr(c.freq), repr(c.pred), repr(c.pred_err),
                        _num(c.z) if not math.isfinite(c.z) else repr(c.z)])
        return buf.getvalue()
