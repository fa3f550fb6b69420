import itertools
import random
import time
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lvrkit.combinatorics import IntegerPartition, compose, cycle_type, inverse
from lvrkit.config import CapExceeded
from lvrkit.ratfunc import RationalFunctionOfN as RF
from lvrkit.weingarten import (
    REFERENCE_TABLE,
    SingularGramError,
    class_gram_matrix,
    full_gram_matrix,
    haar_moment,
    reference_table_discrepancies,
    weingarten_eval,
    weingarten_symbolic,
    weingarten_table,
)

N = RF.N()


def test_gram_k1():
    g = class_gram_matrix(1)
    assert g.entries == (((0, 1),),)


def test_full_gram_k2():
    _, g = full_gram_matrix(2)
    assert g[0][0] == g[1][1] == (0, 0, 1)
    assert g[0][1] == g[1][0] == (0, 1)


def test_gram_k3_basis():
    assert len(class_gram_matrix(3).basis) == 3


@pytest.mark.parametrize("k", range(1, 6))
def test_class_gram_symmetric_and_degree(k):
    g = class_gram_matrix(k)
    for i, j in itertools.product(range(len(g.basis)), repeat=2):
        assert g.entries[i][j] == g.entries[j][i]
        assert len(g.entries[i][j]) - 1 <= k


@pytest.mark.parametrize("k", range(1, 5))
def test_class_gram_collapses_full_gram(k):
    perms, full = full_gram_matrix(k)
    g = class_gram_matrix(k)
    index = {p: i for i, p in enumerate(g.basis)}
    acc = {}
    for s, row in zip(perms, full):
        for t, poly in zip(perms, row):
            key = (index[cycle_type(s)], index[cycle_type(t)])
            cur = acc.get(key, ())
            n = max(len(cur), len(poly))
            acc[key] = tuple((cur[i] if i < len(cur) else 0) + (poly[i] if i < len(poly) else 0) for i in range(n))
    for (i, j), poly in acc.items():
        assert tuple(poly) == tuple(g.entries[i][j])


def test_reference_values():
    assert weingarten_symbolic((1,)) == 1 / N
    assert weingarten_symbolic((2,)) == RF.const(-1) / (N * (N * N - 1))
    assert weingarten_symbolic((1, 2)) == RF.const(-1) / ((N * N - 1) * (N * N - 4))
    assert weingarten_symbolic((3,)) == RF.const(2) / (N * (N * N - 1) * (N * N - 4))
    assert weingarten_symbolic((1, 1, 1)) == (N * N - 2) / (N * (N * N - 1) * (N * N - 4))


def test_identity_k2_from_gram():
    # the Gram system forces +1/(N^2-1); the reference table prints the opposite sign
    assert weingarten_symbolic((1, 1)) == 1 / (N * N - 1)
    flagged = reference_table_discrepancies()
    assert [d["cycle_type"] for d in flagged] == [[1, 1]]
    assert flagged[0]["printed_equals_minus_solution"]
    assert REFERENCE_TABLE[(1, 1)] == -weingarten_symbolic((1, 1))


@pytest.mark.parametrize("ct,n,value", [((1,), 5, Fraction(1, 5)), ((2,), 3, Fraction(-1, 24)),
                                        ((1, 1, 1), 3, Fraction(7, 120))])
def test_eval_examples(ct, n, value):
    assert weingarten_eval(ct, n) == value


def test_eval_errors():
    with pytest.raises(SingularGramError):
        weingarten_eval((1, 1, 1), 2)
    with pytest.raises(ValueError):
        weingarten_eval((1,), 0)
    with pytest.raises(CapExceeded):
        weingarten_table(8)


@pytest.mark.parametrize("k", range(1, 5))
def test_gram_consistency(k):
    perms, _ = full_gram_matrix(k)
    for n in range(k, k + 4):
        _, gram = full_gram_matrix(k, n)
        wg = [[weingarten_eval(cycle_type(compose(s, inverse(t))), n) for t in perms] for s in perms]
        size = len(perms)
        for i in range(size):
            for j in range(size):
                val = sum(wg[i][m] * gram[m][j] for m in range(size))
                assert val == (1 if i == j else 0)


def test_haar_examples():
    assert haar_moment((0,), (0,), (0,), (0,), 4) == Fraction(1, 4)
    assert haar_moment((0,), (0,), (), (), 4) == 0
    assert haar_moment((0, 1), (0, 1), (0, 1), (0, 1), 3) == Fraction(1, 8)


@pytest.mark.parametrize("n", range(2, 7))
def test_row_sums(n):
    for a in range(n):
        assert sum(haar_moment((a,), (b,), (a,), (b,), n) for b in range(n)) == 1


@pytest.mark.parametrize("n", [2, 3])
def test_higher_unitarity(n):
    # sum_b U_{a1 b} conj U_{c1 b} = delta_{a1 c1} inside a k=2 moment
    for a1, a2, c1, c2, b2, d2 in itertools.product(range(n), repeat=6):
        lhs = sum(haar_moment((a1, a2), (b, b2), (c1, c2), (b, d2), n) for b in range(n))
        rhs = haar_moment((a2,), (b2,), (c2,), (d2,), n) if a1 == c1 else 0
        assert lhs == rhs


@given(st.integers(0, 10 ** 6))
def test_relabeling_invariance(seed):
    rng = random.Random(seed)
    n = 3
    idx = [tuple(rng.randrange(n) for _ in range(2)) for _ in range(4)]
    rows, cols = list(range(n)), list(range(n))
    rng.shuffle(rows)
    rng.shuffle(cols)
    a, b, c, d = idx
    rel = (tuple(rows[x] for x in a), tuple(cols[x] for x in b), tuple(rows[x] for x in c), tuple(cols[x] for x in d))
    assert haar_moment(a, b, c, d, n) == haar_moment(*rel, n)


def test_table_timing():
    t0 = time.perf_counter()
    for k in range(1, 7):
        weingarten_table(k)
    assert time.perf_counter() - t0 < 5.0


def test_partition_input_forms():
    assert weingarten_symbolic(IntegerPartition((2, 1))) == weingarten_symbolic((1, 2))
