"""Unitary Weingarten functions as exact rational functions of N.

The Weingarten function is the class function inverting the Gram pairing
``G(sigma, tau) = N^{#cycles(sigma tau^-1)}`` on S_k.  The solve is done in
the class algebra: one unknown per cycle type, so k=7 means a 15x15 system
over Z[N], eliminated fraction-free (Bareiss) and back-substituted in Q(N).
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction

from . import ratfunc as rf
from .combinatorics import (
    IntegerPartition,
    compose,
    cycle_count,
    enumerate_partitions,
    enumerate_symmetric_group,
    inverse,
)
from .config import check_cap
from .ratfunc import RationalFunctionOfN

# Table printed in the source literature; (1,1) carries a sign that the
# Gram system does not reproduce (see reference_table_discrepancies).
REFERENCE_TABLE = {
    (1,): RationalFunctionOfN((1,), (0, 1)),
    (1, 1): RationalFunctionOfN((-1,), (-1, 0, 1)),
    (2,): RationalFunctionOfN((-1,), (0, -1, 0, 1)),
    (1, 1, 1): RationalFunctionOfN((-2, 0, 1), rf.pmul((0, 1), rf.pmul((-1, 0, 1), (-4, 0, 1)))),
    (1, 2): RationalFunctionOfN((-1,), rf.pmul((-1, 0, 1), (-4, 0, 1))),
    (3,): RationalFunctionOfN((2,), rf.pmul((0, 1), rf.pmul((-1, 0, 1), (-4, 0, 1)))),
}


class SingularGramError(ValueError):
    """N < k: the Gram matrix is singular and Weingarten functions have poles."""


@dataclass(frozen=True)
class ClassGramMatrix:
    """Gram pairing summed over pairs of conjugacy classes.

    ``entries[i][j] = sum_{rho in C_i, zeta in C_j} N^{#cycles(rho zeta^-1)}``,
    polynomials in N stored lowest degree first.
    """

    k: int
    basis: tuple
    entries: tuple

    def polynomial(self, i, j):
        return self.entries[i][j]

    def evaluate(self, n):
        return [[rf.peval(e, n) for e in row] for row in self.entries]


_cache_lock = threading.Lock()
_gram_cache: dict = {}
_wg_cache: dict = {}


def class_gram_matrix(k: int) -> ClassGramMatrix:
    if k < 1:
        raise ValueError("k must be >= 1")
    check_cap("weingarten", k)
    cached = _gram_cache.get(k)
    if cached is not None:
        return cached
    basis = tuple(enumerate_partitions(k))
    index = {p.parts: i for i, p in enumerate(basis)}
    perms = list(itertools.permutations(range(k)))
    ncyc = [cycle_count(p) for p in perms]
    rows = []
    for mu in basis:
        rho = mu.representative().mapping
        # acc[nu][c]: number of tau with tau^-1 rho in class nu and c cycles in tau
        acc = [[0] * (k + 1) for _ in basis]
        for tau, c in zip(perms, ncyc):
            inv = [0] * k
            for i, x in enumerate(tau):
                inv[x] = i
            zeta = tuple(inv[rho[i]] for i in range(k))
            nu = index[tuple(sorted(_cycle_lengths(zeta)))]
            acc[nu][c] += 1
        size = mu.class_size()
        rows.append(tuple(rf._trim(size * x for x in poly) for poly in acc))
    gram = ClassGramMatrix(k, basis, tuple(rows))
    with _cache_lock:
        _gram_cache.setdefault(k, gram)
    return _gram_cache[k]


def _cycle_lengths(mapping):
    n = len(mapping)
    seen = bytearray(n)
    out = []
    for s in range(n):
        if seen[s]:
            continue
        length, i = 0, s
        while not seen[i]:
            seen[i] = 1
            i = mapping[i]
            length += 1
        out.append(length)
    return out


def full_gram_matrix(k: int, n=None):
    """Full S_k x S_k Gram matrix (polynomials, or integers at N=n)."""
    perms = list(enumerate_symmetric_group(k))
    out = []
    for s in perms:
        row = []
        for t in perms:
            c = compose(s, inverse(t)).num_cycles()
            row.append(n**c if n is not None else (0,) * c + (1,))
        out.append(row)
    return perms, out


def _bareiss_solve(a, b):
    """Solve a x = b for a polynomial matrix; returns rational functions."""
    n = len(a)
    m = [list(row) + [b[i]] for i, row in enumerate(a)]
    prev = (1,)
    for k in range(n - 1):
        if not m[k][k]:
            swap = next((r for r in range(k + 1, n) if m[r][k]), None)
            if swap is None:
                raise SingularGramError("singular Gram matrix")
            m[k], m[swap] = m[swap], m[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                num = rf.psub(rf.pmul(m[i][j], m[k][k]), rf.pmul(m[i][k], m[k][j]))
                m[i][j] = rf.pexact_div(num, prev)
            m[i][k] = ()
        prev = m[k][k]
    if not m[n - 1][n - 1]:
        raise SingularGramError("singular Gram matrix")
    x = [None] * n
    for i in range(n - 1, -1, -1):
        acc = RationalFunctionOfN(m[i][n])
        for j in range(i + 1, n):
            if m[i][j]:
                acc = acc - RationalFunctionOfN(m[i][j]) * x[j]
        x[i] = acc / RationalFunctionOfN(m[i][i])
    return x


def weingarten_table(k: int) -> dict:
    """{IntegerPartition: RationalFunctionOfN} for every cycle type of S_k."""
    cached = _wg_cache.get(k)
    if cached is not None:
        return cached
    gram = class_gram_matrix(k)
    rhs = [(1,) if p.parts == (1,) * k else () for p in gram.basis]
    sol = _bareiss_solve([list(r) for r in gram.entries], rhs)
    table = dict(zip(gram.basis, sol))
    with _cache_lock:
        _wg_cache.setdefault(k, table)
    return _wg_cache[k]


def weingarten_symbolic(ct) -> RationalFunctionOfN:
    ct = ct if isinstance(ct, IntegerPartition) else IntegerPartition(tuple(ct))
    return weingarten_table(ct.total)[ct]


def weingarten_eval(ct, n: int) -> Fraction:
    ct = ct if isinstance(ct, IntegerPartition) else IntegerPartition(tuple(ct))
    if n <= 0:
        raise ValueError("N must be a positive integer")
    if n < ct.total:
        raise SingularGramError(f"N={n} < k={ct.total}: Gram matrix is singular")
    return weingarten_symbolic(ct)(n)


def reference_table_discrepancies(kmax: int = 3) -> list:
    """Entries of the printed table that disagree with the Gram solution."""
    out = []
    for parts, printed in REFERENCE_TABLE.items():
        if sum(parts) > kmax:
            continue
        solved = weingarten_symbolic(parts)
        if solved != printed:
            out.append({
                "cycle_type": list(parts),
                "printed": printed.to_json(),
                "gram_solution": solved.to_json(),
                "printed_equals_minus_solution": printed == -solved,
            })
    return out


def haar_moment(a, b, c, d, n: int) -> Fraction:
    """Exact  int dU  U_{a1 b1}..U_{ak bk} conj(U_{c1 d1})..conj(U_{cl dl})."""
    a, b, c, d = map(tuple, (a, b, c, d))
    if len(a) != len(b) or len(c) != len(d):
        raise ValueError("index tuples must pair up (len a == len b, len c == len d)")
    for idx in a + b + c + d:
        if not 0 <= idx < n:
            raise ValueError(f"index {idx} outside [0, {n})")
    k, l = len(a), len(c)
    if k != l:
        return Fraction(0)
    if k == 0:
        return Fraction(1)
    check_cap("weingarten", k)
    if n < k:
        raise SingularGramError(f"N={n} < k={k}")
    table = {p.parts: v(n) for p, v in weingarten_table(k).items()}
    perms = [tuple(p) for p in itertools.permutations(range(k))]
    taus = [t for t in perms if all(a[t[i]] == c[i] for i in range(k))]
    sigmas = [s for s in perms if all(b[s[i]] == d[i] for i in range(k))]
    total = Fraction(0)
    for s in sigmas:
        s_inv = [0] * k
        for i, x in enumerate(s):
            s_inv[x] = i
        for t in taus:
            zeta = tuple(t[s_inv[i]] for i in range(k))
            total += table[tuple(sorted(_cycle_lengths(zeta)))]
    return total
