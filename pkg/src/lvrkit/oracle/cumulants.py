"""Moments <-> joint cumulants by Moebius inversion over set partitions."""
from __future__ import annotations

import math


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def _product(values):
    out = values[0]
    for v in values[1:]:
        out = out * v
    return out


def connected_from_raw(raw, labels=None):
    """Joint cumulant of all labels from raw moments of every nonempty subset.

    ``raw`` maps ``frozenset`` of labels to the moment E[prod_{i in S} X_i].
    Values can be any ring elements (Fractions, rational functions, series).
    """
    if labels is None:
        labels = sorted(set().union(*raw.keys()))
    labels = list(labels)
    if not labels:
        raise ValueError("need at least one factor")
    total = None
    for part in set_partitions(labels):
        blocks = []
        for block in part:
            key = frozenset(block)
            if key not in raw:
                raise KeyError(f"missing sub-moment for {sorted(block)}")
            blocks.append(raw[key])
        k = len(part)
        term = _product(blocks) * ((-1) ** (k - 1) * math.factorial(k - 1))
        total = term if total is None else total + term
    return total


def all_cumulants_from_raw(raw):
    return {s: connected_from_raw(raw, sorted(s)) for s in raw}


def raw_from_cumulants(cum):
    """Inverse transform: E[prod_S X] = sum over set partitions of prod of cumulants."""
    out = {}
    for s in cum:
        total = None
        for part in set_partitions(sorted(s)):
            term = _product([cum[frozenset(b)] for b in part])
            total = term if total is None else total + term
        out[s] = total
    return out
