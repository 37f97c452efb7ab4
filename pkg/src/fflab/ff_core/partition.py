from __future__ import annotations

from collections import Counter
from dataclasses import dataclass


@dataclass(frozen=True, order=False)
class Partition:
    """Integer partition with parts stored in non-increasing order."""

    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts)
        if any(x <= 0 for x in parts):
            raise ValueError("parts must be positive")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError("parts must be non-increasing")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def from_parts(cls, parts):
        return cls(tuple(sorted((int(x) for x in parts if x), reverse=True)))

    @classmethod
    def parse(cls, s: str) -> "Partition":
        s = s.strip()
        if not (s.startswith("[") and s.endswith("]")):
            raise ValueError(f"bad partition literal {s!r}")
        body = s[1:-1].strip()
        return cls(tuple(int(t) for t in body.split(","))) if body else cls(())

    def __str__(self):
        return "[" + ",".join(map(str, self.parts)) + "]"

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def dual(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for x in self.parts if x > j)
                               for j in range(self.parts[0])))

    def multiplicity(self, i: int) -> int:
        return self.parts.count(i)

    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.parts))

    def dual_square_sum(self) -> int:
        """Sum of the squared parts of the dual partition."""
        return sum(x * x for x in self.dual().parts)


def partitions_of(n: int):
    """All partitions of n, descending lexicographic order."""
    if n < 0:
        raise ValueError("n must be non-negative")

    def gen(m, cap):
        if m == 0:
            yield ()
            return
        for first in range(min(m, cap), 0, -1):
            for rest in gen(m - first, first):
                yield (first,) + rest

    return [Partition(t) for t in gen(n, n)]
