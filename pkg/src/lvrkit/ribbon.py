"""Labeled ribbon graphs of the (M M^dagger)^p model and their lambda series.

A graph is a set of vertices with cyclically ordered darts (half-edges) and
a perfect matching of M darts onto M-dagger darts.  Interaction vertices
carry 2p alternating darts, observable vertices Tr (M M^dagger)^k carry 2k,
and cilia are univalent vertices: a J-dagger cilium holds one M dart, a J
cilium one M-dagger dart.  Faces are the cycles of sigma o alpha (vertex
rotation after edge involution); a face is broken when it passes a cilium.

Model conventions (all series here use them):

* weight exp(-N Tr M M^dagger - lam N Tr (M M^dagger)^p)
  with sources exp(Tr J^dagger M + Tr M^dagger J);
* lam^m counts interaction vertices;
* labeled interaction vertices are divided by m! (``"v!"``) unless the
  ``"v"`` convention is requested.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from ._backend import kernels
from .combinatorics import IntegerPartition, Permutation, enumerate_partitions
from .config import cap, check_cap
from .ratfunc import RationalFunctionOfN
from .series import LambdaSeries

MODEL_TAG = "thooft-v1"
SCALAR_NORMALIZATION = (
    "K_pi = N^(2K) x [coefficient of Tr_pi(J^dagger J) in log Z] = N^(2K+2) x [same in N^-2 log Z]"
)
CONVENTIONS = ("v!", "v")

JDAG_LEAF, J_LEAF = 1, 2


@dataclass(frozen=True)
class VertexSet:
    """Darts and rotation for a fixed collection of labeled vertices."""

    p: int
    kinds: tuple          # per vertex: "interaction", "observable", "Jdag", "J"
    sigma: tuple          # dart -> next dart at its vertex
    dart_type: tuple      # "M" or "D" per dart
    vertex_of: tuple
    leaf_kind: tuple      # 0, JDAG_LEAF or J_LEAF per dart
    m_darts: tuple
    md_darts: tuple

    @property
    def n_pairs(self):
        return len(self.m_darts)

    @property
    def n_vertices(self):
        return len(self.kinds)


def vertex_set(p, n_interaction, observables=(), n_cilia=0) -> VertexSet:
    """Observables first, then interaction vertices, then J-dagger and J cilia."""
    if p < 2:
        raise ValueError("p must be >= 2")
    specs = [("observable", "MD" * k) for k in observables]
    specs += [("interaction", "MD" * p)] * n_interaction
    specs += [("Jdag", "M")] * n_cilia + [("J", "D")] * n_cilia
    sigma, dtype, vof, leaf = [], [], [], []
    for v, (kind, word) in enumerate(specs):
        base = len(sigma)
        for t, sym in enumerate(word):
            sigma.append(base + (t + 1) % len(word))
            dtype.append(sym)
            vof.append(v)
            leaf.append(JDAG_LEAF if kind == "Jdag" else J_LEAF if kind == "J" else 0)
    m = tuple(i for i, s in enumerate(dtype) if s == "M")
    md = tuple(i for i, s in enumerate(dtype) if s == "D")
    return VertexSet(p, tuple(k for k, _ in specs), tuple(sigma), tuple(dtype), tuple(vof),
                     tuple(leaf), m, md)


@dataclass(frozen=True)
class RibbonGraph:
    vertices: VertexSet
    matching: tuple  # M dart m_darts[i] glued to md_darts[matching[i]]

    @property
    def p(self):
        return self.vertices.p

    def alpha(self):
        vs = self.vertices
        a = [0] * len(vs.sigma)
        for i, j in enumerate(self.matching):
            x, y = vs.m_darts[i], vs.md_darts[j]
            a[x], a[y] = y, x
        return a

    def edges(self):
        vs = self.vertices
        return [(vs.m_darts[i], vs.md_darts[j]) for i, j in enumerate(self.matching)]

    def faces(self):
        """Cycles of sigma o alpha on darts."""
        a, s = self.alpha(), self.vertices.sigma
        return Permutation(tuple(s[a[d]] for d in range(len(s)))).cycles()

    def n_components(self):
        vs = self.vertices
        parent = list(range(vs.n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x, y in self.edges():
            parent[find(vs.vertex_of[x])] = find(vs.vertex_of[y])
        return len({find(v) for v in range(vs.n_vertices)})

    def is_connected(self):
        return self.n_components() == 1

    def face_cilia(self, face):
        """Sequence of cilium kinds met along a face (in tracing order)."""
        return [self.vertices.leaf_kind[d] for d in face if self.vertices.leaf_kind[d]]

    def broken_faces(self):
        return [f for f in self.faces() if self.face_cilia(f)]

    def broken_pattern(self):
        """Sorted cilium-pair counts c(f) of broken faces: the partition pi."""
        return tuple(sorted(self.face_cilia(f).count(JDAG_LEAF) for f in self.broken_faces()))

    def is_balanced(self):
        """J and J-dagger alternate (hence are equinumerous) along every face."""
        for f in self.faces():
            kinds = self.face_cilia(f)
            if len(kinds) % 2 or any(kinds[t] == kinds[t - 1] for t in range(len(kinds))):
                return False
        return True

    def n_edges(self):
        return len(self.matching)

    def euler_characteristic(self):
        return euler_characteristic(self)


def euler_characteristic(graph: RibbonGraph) -> int:
    if not graph.is_connected():
        raise ValueError("Euler characteristic requested for a disconnected graph")
    return graph.vertices.n_vertices - graph.n_edges() + len(graph.faces())


def enumerate_ribbon_graphs(p, n_vertices, n_cilia=0, observables=()):
    """Every labeled matching on the given vertices, in lexicographic order."""
    vs = vertex_set(p, n_vertices, observables, n_cilia)
    check_cap("ribbon_pairs", vs.n_pairs)
    for perm in itertools.permutations(range(vs.n_pairs)):
        yield RibbonGraph(vs, perm)


def scan(vs: VertexSet) -> Counter:
    """Counter of (n_components, unbroken faces, broken code, balanced) over all matchings."""
    check_cap("ribbon_pairs", vs.n_pairs)
    ncomp, nun, code, bal = kernels.ribbon_scan(
        list(vs.sigma), list(vs.m_darts), list(vs.md_darts), list(vs.vertex_of),
        vs.n_vertices, list(vs.leaf_kind))
    return Counter(zip(ncomp.tolist(), nun.tolist(), code.tolist(), bal.tolist()))


def decode_pattern(code: int) -> tuple:
    out = []
    while code:
        out.append(code % 16)
        code //= 16
    return tuple(sorted(out))


def _symmetry(m, convention):
    if convention == "v!":
        return math.factorial(m)
    if convention == "v":
        return max(m, 1)
    raise ValueError(f"unknown convention {convention!r}")


def logz_series(p, order, convention="v!") -> LambdaSeries:
    """N^-2 log Z: sum over connected vacuum graphs of (-lam)^v N^(chi-2) / v!."""
    check_cap("ribbon_pairs", p * order)
    coeffs = [RationalFunctionOfN.const(0)]
    for m in range(1, order + 1):
        vs = vertex_set(p, m)
        terms = Counter()
        for (ncomp, faces, _, _), mult in scan(vs).items():
            if ncomp == 1:
                chi = m - p * m + faces
                terms[chi - 2] += mult
        coeffs.append(RationalFunctionOfN.from_laurent(
            {k: Fraction((-1) ** m * v, _symmetry(m, convention)) for k, v in terms.items()}))
    return LambdaSeries(coeffs)


def invariant_cumulant_series(p, parts, order, convention="v!") -> LambdaSeries:
    """E_c[prod_i (1/N) Tr (M M^dagger)^{k_i}] from connected graphs with observable vertices."""
    parts = tuple(parts)
    if not parts:
        raise ValueError("need at least one trace invariant")
    check_cap("ribbon_pairs", p * order + sum(parts))
    coeffs = []
    for m in range(order + 1):
        vs = vertex_set(p, m, observables=parts)
        edges = vs.n_pairs
        terms = Counter()
        for (ncomp, faces, _, _), mult in scan(vs).items():
            if ncomp == 1:
                terms[m - len(parts) - edges + faces] += mult
        coeffs.append(RationalFunctionOfN.from_laurent(
            {k: Fraction((-1) ** m * v, _symmetry(m, convention)) for k, v in terms.items()}))
    return LambdaSeries(coeffs)


@dataclass(frozen=True)
class CumulantIndexStructure:
    """Delta pattern prod_l delta(d_l, a[rho tau sigma^-1 (l)]) delta(c_l, b[rho xi sigma^-1 (l)])."""

    kappa: int
    partition: IntegerPartition
    tau: Permutation
    xi: Permutation

    def pattern_sum(self, a, b, c, d) -> int:
        """Number of (rho, sigma) in S_K x S_K whose delta pattern is satisfied."""
        k = self.kappa
        t, x = self.tau.mapping, self.xi.mapping
        total = 0
        perms = list(itertools.permutations(range(k)))
        for rho in perms:
            for sig in perms:
                sinv = [0] * k
                for i, y in enumerate(sig):
                    sinv[y] = i
                if all(d[l] == a[rho[t[sinv[l]]]] and c[l] == b[rho[x[sinv[l]]]] for l in range(k)):
                    total += 1
        return total

    def to_json(self):
        return {"K": self.kappa, "partition": list(self.partition.parts),
                "tau": list(self.tau.mapping), "xi": list(self.xi.mapping)}


def index_structure(kappa, partition) -> CumulantIndexStructure:
    part = partition if isinstance(partition, IntegerPartition) else IntegerPartition(tuple(partition))
    if part.total != kappa:
        raise ValueError(f"partition {part} is not a partition of K={kappa}")
    return CumulantIndexStructure(kappa, part, part.representative(), Permutation.identity(kappa))


def scalar_cumulant_series(p, kappa, partition, order, convention="v!"):
    """Scalar cumulant K^kappa_pi(lam, N) and its index structure.

    Sum over connected labeled graphs with ``kappa`` J-dagger and J cilia whose
    broken faces carry cilium counts ``partition``, weight
    (-lam)^v N^(chi - b) / (v! K!^2); see :data:`SCALAR_NORMALIZATION`.
    """
    if not 1 <= kappa <= cap("kappa_max"):
        raise ValueError(f"K must lie in [1, {cap('kappa_max')}]")
    check_cap("ribbon_pairs", p * order + kappa)
    struct = index_structure(kappa, partition)
    target = struct.partition.parts
    coeffs = []
    for m in range(order + 1):
        vs = vertex_set(p, m, n_cilia=kappa)
        edges = vs.n_pairs
        terms = Counter()
        for (ncomp, faces, code, balanced), mult in scan(vs).items():
            if not balanced:
                raise AssertionError("unbalanced broken face")
            if ncomp == 1 and decode_pattern(code) == target:
                terms[m + 2 * kappa - edges + faces] += mult
        den = _symmetry(m, convention) * math.factorial(kappa) ** 2
        coeffs.append(RationalFunctionOfN.from_laurent(
            {k: Fraction((-1) ** m * v, den) for k, v in terms.items()}))
    return LambdaSeries(coeffs), struct


def scalar_cumulants(p, kappa, order, convention="v!"):
    """All partitions of kappa -> series."""
    return {part.parts: scalar_cumulant_series(p, kappa, part, order, convention)[0]
            for part in enumerate_partitions(kappa)}
