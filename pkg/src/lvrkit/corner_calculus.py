"""Corner-operator words from differentiating Tr 1/(v - MM^dagger), decorated trees, bounds.

A word is a linear letter sequence read from a marked start: ``R`` is the
resolvent 1/(v - X), ``M`` and ``D`` stand for M and M^dagger, and cups are
``("U", label)``.  The derivative rules are

    d/dM  R = R U D R        d/dM^dagger R = R M U R
    d/dM  M = U              d/dM^dagger D = U

so cutting a word at its cups gives r + 1 corner operators, each one of
R, RM, MdR, MdRM or ONE (an empty segment).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .config import check_cap

CORNER_TYPES = ("R", "RM", "MdR", "MdRM", "ONE")
_SEGMENT_NAME = {(): "ONE", ("R",): "R", ("R", "M"): "RM", ("D", "R"): "MdR", ("D", "R", "M"): "MdRM"}
_NAME_SEGMENT = {v: k for k, v in _SEGMENT_NAME.items()}


def _is_cup(letter):
    return isinstance(letter, tuple)


@dataclass(frozen=True)
class CornerWord:
    letters: tuple

    @property
    def r(self):
        return sum(1 for x in self.letters if _is_cup(x))

    def segments(self):
        segs, cur = [], []
        for x in self.letters:
            if _is_cup(x):
                segs.append(tuple(cur))
                cur = []
            else:
                cur.append(x)
        segs.append(tuple(cur))
        return segs

    def operators(self):
        """The r + 1 corner operators O_0 .. O_r."""
        return tuple(_SEGMENT_NAME[s] for s in self.segments())

    def cup_labels(self):
        return tuple(x[1] for x in self.letters if _is_cup(x))

    def text(self):
        return ",".join(self.operators())

    # counters read off the letters
    @property
    def r_m(self):
        return self.letters.count("M")

    @property
    def r_md(self):
        return self.letters.count("D")

    @property
    def i(self):
        return self.operators().count("ONE")

    @property
    def r_res(self):
        """Resolvent count r_pi: R letters not absorbed into RM / MdR corners."""
        return self.letters.count("R") - (self.r_m + self.r_md)

    def counters(self):
        return {"r": self.r, "r_pi": self.r_res, "r_M": self.r_m, "r_Mdag": self.r_md, "i_pi": self.i}

    def canonical(self):
        """Minimal rotation of the cyclic letter sequence (used for deduplication)."""
        seq = [repr(x) for x in self.letters]
        return min(tuple(seq[k:] + seq[:k]) for k in range(len(seq)))

    def evaluate(self, resolvent, m, cups):
        """Trace of the word with R -> resolvent, M -> m, D -> m^dagger, cup label -> cups[label]."""
        md = m.conj().T
        out = np.eye(m.shape[0], dtype=complex)
        for x in self.letters:
            if _is_cup(x):
                out = out @ cups[x[1]]
            elif x == "R":
                out = out @ resolvent
            elif x == "M":
                out = out @ m
            else:
                out = out @ md
        return np.trace(out)


def parse_word(text):
    """Inverse of CornerWord.text with cups labeled 0, 1, ... left to right."""
    tokens = text.split(",")
    letters = []
    for t, tok in enumerate(tokens):
        if tok not in _NAME_SEGMENT:
            raise ValueError(f"unknown corner token {tok!r}")
        if t:
            letters.append(("U", t - 1))
        letters.extend(_NAME_SEGMENT[tok])
    return CornerWord(tuple(letters))


def _apply(word, kind, label):
    """All terms of one derivative (kind 'M' or 'D' = M^dagger) applied to a word."""
    out = []
    cup = ("U", label)
    for pos, x in enumerate(word):
        if x == "R":
            insert = ("R", cup, "D", "R") if kind == "M" else ("R", "M", cup, "R")
        elif x == kind and x in ("M", "D"):
            insert = (cup,)
        else:
            continue
        out.append(word[:pos] + insert + word[pos + 1:])
    return out


def derivative_labels(q, qbar):
    """Cup labels: M^dagger derivatives first ("b1".."bqbar"), then M ("a1".."aq")."""
    return [("D", f"b{j + 1}") for j in range(qbar)] + [("M", f"a{j + 1}") for j in range(q)]


def differentiate_trace(q, qbar):
    """Every term of d^q/dM^q d^qbar/dM^dagger^qbar Tr 1/(v - MM^dagger), each with prefactor 1."""
    if q < 0 or qbar < 0:
        raise ValueError("derivative orders must be >= 0")
    check_cap("faa_order", q + qbar)
    words = [("R",)]
    for kind, label in derivative_labels(q, qbar):
        words = [w for word in words for w in _apply(word, kind, label)]
    seen = set()
    out = []
    for w in words:
        cw = CornerWord(w)
        key = cw.canonical()
        if key in seen:
            raise AssertionError("duplicate Faa di Bruno term")
        seen.add(key)
        out.append(cw)
    return out


def count_faa_terms(q, qbar):
    return len(differentiate_trace(q, qbar))


def faa_bound(r):
    return 2 ** r * math.factorial(r)


def evaluate_terms(words, m, v, cups):
    x = m @ m.conj().T
    res = np.linalg.inv(v * np.eye(m.shape[0]) - x)
    return sum(w.evaluate(res, m, cups) for w in words)


def matrix_unit(n, a, b):
    e = np.zeros((n, n), dtype=complex)
    e[a, b] = 1.0
    return e


def trace_resolvent(m, w, v):
    """F(M, W) = Tr (v - M W)^{-1} with M and W independent."""
    return np.trace(np.linalg.inv(v * np.eye(m.shape[0]) - m @ w))


# ---------------------------------------------------------------- trees


@dataclass(frozen=True)
class OrientedTree:
    n: int
    edges: tuple  # (tail, head)

    def __post_init__(self):
        if len(self.edges) != self.n - 1:
            raise ValueError("a tree on n vertices has n - 1 edges")
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru == rv:
                raise ValueError("edges contain a cycle")
            parent[ru] = rv

    def degrees(self):
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg


def chain_tree(n):
    return OrientedTree(n, tuple((i, i + 1) for i in range(n - 1)))


def star_tree(n):
    return OrientedTree(n, tuple((0, i) for i in range(1, n)))


def random_tree(n, rng=None):
    """Uniform labeled tree via a Pruefer sequence, each edge randomly oriented."""
    rng = rng or random.Random()
    if n <= 1:
        return OrientedTree(max(n, 1), ())
    if n == 2:
        edges = [(0, 1)]
    else:
        seq = [rng.randrange(n) for _ in range(n - 2)]
        deg = [1] * n
        for x in seq:
            deg[x] += 1
        edges = []
        for x in seq:
            leaf = min(i for i in range(n) if deg[i] == 1)
            edges.append((leaf, x))
            deg[leaf] -= 1
            deg[x] -= 1
        u, w = [i for i in range(n) if deg[i] == 1]
        edges.append((u, w))
    return OrientedTree(n, tuple((u, v) if rng.random() < 0.5 else (v, u) for u, v in edges))


@dataclass(frozen=True)
class Cilium:
    vertex: int
    loop: int
    mark: str  # "J" or "Jdag"
    eta: object = None  # opaque exponent annotation, never evaluated


@dataclass(frozen=True)
class DecoratedTree:
    """Oriented tree with a loop choice s in {1, 2} at each edge end.

    The tail of an edge carries a d/dM derivative (mark M), the head a
    d/dM^dagger derivative (mark M^dagger).
    """

    tree: OrientedTree
    decorations: tuple  # per edge (s_tail, s_head)
    cilia: tuple = field(default=())
    cilia_convention: str = "K source pairs"

    def __post_init__(self):
        if len(self.decorations) != len(self.tree.edges):
            raise ValueError("one decoration pair per edge")
        if any(s not in (1, 2) for pair in self.decorations for s in pair):
            raise ValueError("decorations take values in {1, 2}")
        nj = sum(1 for c in self.cilia if c.mark == "J")
        njd = sum(1 for c in self.cilia if c.mark == "Jdag")
        if nj + njd != len(self.cilia) or nj != njd:
            raise ValueError("J and J^dagger marks must be equinumerous")

    @property
    def n(self):
        return self.tree.n

    def half_edges(self):
        """(vertex, loop, mark, edge index) for each edge end; glued ends have conjugate marks."""
        out = []
        for e, ((u, v), (su, sv)) in enumerate(zip(self.tree.edges, self.decorations)):
            out.append((u, su, "M", e))
            out.append((v, sv, "Mdag", e))
        return out

    def derivative_counts(self):
        """{(vertex, loop): (q, qbar)} over both loops of every vertex."""
        counts = {(i, j): [0, 0] for i in range(self.n) for j in (1, 2)}
        for v, s, mark, _ in self.half_edges():
            counts[(v, s)][0 if mark == "M" else 1] += 1
        return {k: tuple(c) for k, c in counts.items()}


def enumerate_decorations(tree: OrientedTree):
    for decs in product(((1, 1), (1, 2), (2, 1), (2, 2)), repeat=len(tree.edges)):
        yield DecoratedTree(tree, decs)


def count_decorations(n):
    return 4 ** (n - 1)


@dataclass(frozen=True)
class CycleSet:
    components: tuple  # frozensets of (vertex, loop)

    def __len__(self):
        return len(self.components)


def cycles_of(decorated: DecoratedTree) -> CycleSet:
    """Connected components of the forest the decorated edges induce on the 2n loops."""
    n = decorated.n
    parent = list(range(2 * n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (u, v), (su, sv) in zip(decorated.tree.edges, decorated.decorations):
        a, b = find(2 * u + su - 1), find(2 * v + sv - 1)
        parent[a] = b
    groups = {}
    for x in range(2 * n):
        groups.setdefault(find(x), set()).add((x // 2, x % 2 + 1))
    comps = sorted((frozenset(g) for g in groups.values()), key=lambda g: min(g))
    return CycleSet(tuple(comps))


# ---------------------------------------------------------------- bounds


class SectorError(ValueError):
    """arg(lam) outside the sector where cos(arg lam / (p - 1)) > 0."""


@dataclass(frozen=True)
class TreeBound:
    scalar: float
    n_power: int

    def __call__(self, n):
        return self.scalar * n ** self.n_power

    def __str__(self):
        return f"{self.scalar!r} * N^{self.n_power}"


def tree_cumulant_bound(e_t, v_t, kappa, n_blocks, lam, p):
    """|lam|^e (K!)^2 4^K / (cos(arg lam/(p-1))^(2e+K) v!) with the factor N^(2-|pi|) kept apart."""
    theta = np.angle(complex(lam)) / (p - 1)
    cos = math.cos(theta)
    if cos <= 0:
        raise SectorError(f"cos(arg lam/(p-1)) = {cos:.3g} <= 0")
    scalar = (abs(lam) ** e_t * math.factorial(kappa) ** 2 * 4 ** kappa
              / (cos ** (2 * e_t + kappa) * math.factorial(v_t)))
    return TreeBound(float(scalar), 2 - n_blocks)


def mainamp_bound(n, r, lam, k_const, kappa_p):
    """K^n |lam|^(kappa_p n) prod r_i!."""
    r = tuple(r)
    if len(r) != n:
        raise ValueError("need one coordination number per vertex")
    if any(x < 1 for x in r):
        raise ValueError("coordination numbers must be >= 1")
    return float(k_const ** n * abs(lam) ** (kappa_p * n) * math.prod(math.factorial(x) for x in r))
