"""Permutations in one-line notation, cycle types and integer partitions."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator

from .config import check_cap


@dataclass(frozen=True)
class Permutation:
    """Bijection of {0, ..., k-1} stored as the tuple of images."""

    mapping: tuple

    def __post_init__(self):
        m = tuple(int(x) for x in self.mapping)
        if sorted(m) != list(range(len(m))):
            raise ValueError(f"not a permutation: {m}")
        object.__setattr__(self, "mapping", m)

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(k)))

    @classmethod
    def from_cycles(cls, k: int, cycles) -> "Permutation":
        img = list(range(k))
        for cyc in cycles:
            for i, x in enumerate(cyc):
                img[x] = cyc[(i + 1) % len(cyc)]
        return cls(tuple(img))

    @property
    def degree(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def cycles(self) -> list:
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = []
            i = start
            while not seen[i]:
                seen[i] = True
                cyc.append(i)
                i = self.mapping[i]
            out.append(tuple(cyc))
        return out

    def num_cycles(self) -> int:
        return len(self.cycles())


@dataclass(frozen=True)
class IntegerPartition:
    """Nondecreasing positive parts; ``total`` is their sum."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts)
        if any(x <= 0 for x in parts):
            raise ValueError(f"parts must be positive: {parts}")
        object.__setattr__(self, "parts", tuple(sorted(parts)))

    @property
    def total(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"

    def centralizer_size(self) -> int:
        """z_pi = prod_j j^{m_j} m_j!  (order of the centralizer in S_k)."""
        z = 1
        for j, m in Counter(self.parts).items():
            z *= j**m * math.factorial(m)
        return z

    def class_size(self) -> int:
        return math.factorial(self.total) // self.centralizer_size()

    def representative(self) -> Permutation:
        """Permutation of this cycle type with cycles on consecutive labels."""
        cycles, start = [], 0
        for part in self.parts:
            cycles.append(tuple(range(start, start + part)))
            start += part
        return Permutation.from_cycles(self.total, cycles)


def compose(sigma: Permutation, tau: Permutation) -> Permutation:
    """(sigma o tau)(i) = sigma(tau(i))."""
    if sigma.degree != tau.degree:
        raise ValueError(f"degree mismatch: {sigma.degree} vs {tau.degree}")
    s = sigma.mapping
    return Permutation(tuple(s[t] for t in tau.mapping))


def inverse(sigma: Permutation) -> Permutation:
    inv = [0] * sigma.degree
    for i, x in enumerate(sigma.mapping):
        inv[x] = i
    return Permutation(tuple(inv))


def cycle_type(zeta: Permutation) -> IntegerPartition:
    return IntegerPartition(tuple(len(c) for c in zeta.cycles()))


def enumerate_symmetric_group(k: int) -> Iterator[Permutation]:
    """All k! permutations in lexicographic order of their one-line form."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    check_cap("symmetric_group", k)
    for p in itertools.permutations(range(k)):
        yield Permutation(p)


def enumerate_partitions(k: int) -> list:
    """Partitions of k, each once, ordered by number of parts descending then lexicographically."""
    if k < 0:
        raise ValueError("k must be nonnegative")

    def gen(remaining, smallest):
        if remaining == 0:
            yield ()
            return
        for first in range(smallest, remaining + 1):
            for rest in gen(remaining - first, first):
                yield (first,) + rest

    parts = sorted(gen(k, 1), key=lambda t: (-len(t), t))
    return [IntegerPartition(p) for p in parts]


def cycle_count(mapping) -> int:
    """Number of cycles of a permutation given as any index sequence."""
    n = len(mapping)
    seen = bytearray(n)
    count = 0
    for start in range(n):
        if not seen[start]:
            count += 1
            i = start
            while not seen[i]:
                seen[i] = 1
                i = mapping[i]
    return count
