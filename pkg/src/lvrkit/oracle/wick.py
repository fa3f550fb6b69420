"""Exact Gaussian Wick contraction for complex matrix words.

Gaussian weight exp(-N Tr M M^dagger): <M_ab conj(M_cd)> = delta_ac delta_bd / N.
The interaction exp(-lam N Tr (M M^dagger)^p) is expanded to a fixed order and
every Wick pairing is counted through explicit index identification
(union-find over index variables, fixed external indices kept as constants).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .._backend import kernels
from ..config import check_cap
from ..ratfunc import RationalFunctionOfN
from ..series import LambdaSeries
from .cumulants import connected_from_raw


@dataclass(frozen=True)
class Trace:
    """Tr of a cyclic word in 'M' and 'D' (D = M^dagger), times ``scale``."""

    word: str
    scale: Fraction = Fraction(1)

    @classmethod
    def power(cls, k):
        """Tr (M M^dagger)^k."""
        return cls("MD" * k)


@dataclass(frozen=True)
class Entry:
    """A single matrix entry: M[row, col] (conj=False) or conj(M[row, col])."""

    row: int
    col: int
    conj: bool = False


@dataclass
class WickQuery:
    factors: list
    p: int = 2
    order: int = 0
    N: object = None  # int, or None for symbolic
    trace_normalization: bool = True  # multiply each Trace by 1/N

    def counts(self):
        """(number of M symbols, number of conjugate symbols), interaction excluded."""
        nm = sum(f.word.count("M") if isinstance(f, Trace) else (not f.conj) for f in self.factors)
        nd = sum(f.word.count("D") if isinstance(f, Trace) else f.conj for f in self.factors)
        return nm, nd


def _index_structure(factors):
    """Translate factors into (m_row, m_col, c_row, c_col, nvars, constants)."""
    m_row, m_col, c_row, c_col = [], [], [], []
    nvars = 0
    const_ids = {}
    const_refs = []  # (list, position, value) patched after nvars is known
    for f in factors:
        if isinstance(f, Trace):
            length = len(f.word)
            base = nvars
            nvars += length
            for t, sym in enumerate(f.word):
                left, right = base + t, base + (t + 1) % length
                if sym == "M":
                    m_row.append(left)
                    m_col.append(right)
                elif sym == "D":
                    # (M^dagger)_{left,right} = conj(M_{right,left})
                    c_row.append(right)
                    c_col.append(left)
                else:
                    raise ValueError(f"bad symbol {sym!r}")
        else:
            rows, cols = (c_row, c_col) if f.conj else (m_row, m_col)
            for lst, value in ((rows, f.row), (cols, f.col)):
                const_ids.setdefault(value, len(const_ids))
                const_refs.append((lst, len(lst), value))
                lst.append(None)
    for lst, pos, value in const_refs:
        lst[pos] = nvars + const_ids[value]
    return m_row, m_col, c_row, c_col, nvars, const_ids


def _weight(hist, npairs, n):
    """sum_c hist[c] N^{c - npairs}: Fraction at fixed N, rational function if N is None."""
    if n is None:
        terms = {c - npairs: int(h) for c, h in enumerate(hist) if h}
        return RationalFunctionOfN.from_laurent(terms)
    return sum((Fraction(int(h)) * Fraction(n) ** (c - npairs) for c, h in enumerate(hist) if h), Fraction(0))


def gaussian_moment(factors, n=None):
    """E_0[prod factors] (traces unnormalized) at the Gaussian point, exactly."""
    m_row, m_col, c_row, c_col, nvars, consts = _index_structure(factors)
    if len(m_row) != len(c_row):
        return RationalFunctionOfN.const(0) if n is None else Fraction(0)
    check_cap("wick_pairs", len(m_row))
    if n is not None:
        for value in consts:
            if not 0 <= value < n:
                raise ValueError(f"index {value} outside [0, {n})")
    hist, _ = kernels.wick_class_histogram(m_row, m_col, c_row, c_col, nvars, len(consts))
    return _weight(hist, len(m_row), n)


def _scale(factors, n):
    """Product of 1/N per normalized trace and explicit trace scales."""
    k = sum(isinstance(f, Trace) for f in factors)
    s = Fraction(1)
    for f in factors:
        if isinstance(f, Trace):
            s *= f.scale
    if n is None:
        return RationalFunctionOfN.monomial(-k, s)
    return s / Fraction(n) ** k


def wick_exact(query: WickQuery) -> LambdaSeries:
    """Raw series E_0[prod factors * exp(-lam N Tr X^p)] through ``query.order``.

    Each Trace factor carries 1/N when ``trace_normalization`` is set.
    """
    n = query.N
    if n is not None and (not isinstance(n, int) or n <= 0):
        raise ValueError("N must be a positive integer or None")
    vertex = Trace("MD" * query.p)
    pref = _scale(query.factors, n) if query.trace_normalization else (
        RationalFunctionOfN.const(1) if n is None else Fraction(1))
    coeffs = []
    for m in range(query.order + 1):
        mom = gaussian_moment(list(query.factors) + [vertex] * m, n)
        # (-lam N)^m / m!
        if n is None:
            w = RationalFunctionOfN.monomial(m, Fraction((-1) ** m, math.factorial(m)))
        else:
            w = Fraction((-1) ** m * n**m, math.factorial(m))
        coeffs.append(mom * w * pref)
    return LambdaSeries(coeffs)


def partition_function(p, order, n=None):
    """Z(lam)/Z(0) as a series."""
    return wick_exact(WickQuery([], p=p, order=order, N=n))


def logz(p, order, n=None):
    """N^-2 log Z as a series."""
    z = partition_function(p, order, n)
    inv_n2 = RationalFunctionOfN.monomial(-2) if n is None else Fraction(1, n * n)
    return z.log() * inv_n2


def interacting_moment(factors, p, order, n=None, z=None):
    """<prod factors> in the interacting measure, normalized by Z."""
    raw = wick_exact(WickQuery(list(factors), p=p, order=order, N=n))
    if z is None:
        z = partition_function(p, order, n)
    return raw / z


def connected_series(factors, p, order, n=None):
    """Joint cumulant (as a series in lam) of the given factors."""
    z = partition_function(p, order, n)
    labels = list(range(len(factors)))
    raw = {}
    for size in range(1, len(labels) + 1):
        for subset in combinations(labels, size):
            raw[frozenset(subset)] = interacting_moment([factors[i] for i in subset], p, order, n, z)
    return connected_from_raw(raw, labels)


def invariant_cumulant(parts, p, order, n=None):
    """E_c[prod_i (1/N) Tr (M M^dagger)^{k_i}] as a series in lam."""
    return connected_series([Trace("MD" * k) for k in parts], p, order, n)


def entry_cumulant(a, b, c, d, p, order, n=None):
    """N^{2K} x joint cumulant of {M[b_l, a_l], conj(M[c_l, d_l])}_l.

    This is the index-full cumulant obtained by differentiating log Z in
    (J^dagger)_{a_l b_l} and J_{c_l d_l} with sources Tr(J^dagger M) + Tr(M^dagger J),
    rescaled by N^{2K} (see ``lvrkit.ribbon.SCALAR_NORMALIZATION``).
    """
    kk = len(a)
    factors = [Entry(b[l], a[l]) for l in range(kk)] + [Entry(c[l], d[l], conj=True) for l in range(kk)]
    series = connected_series(factors, p, order, n)
    scale = RationalFunctionOfN.monomial(2 * kk) if n is None else Fraction(n) ** (2 * kk)
    return series * scale
