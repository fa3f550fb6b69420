import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lvrkit.lvr_kernel import (
    BranchError,
    ConvergenceError,
    IllConditionedError,
    derivative_operator,
    fuss_catalan_numbers,
    matrix_A,
    residual,
    sigma_and_resolvent,
    tp_cardano,
    tp_eval,
    tp_series_eval,
)


def test_fuss_catalan_values():
    assert fuss_catalan_numbers(2, 4).coefficients == (1, 1, 2, 5, 14)
    assert fuss_catalan_numbers(3, 3).coefficients == (1, 1, 3, 12)
    assert all(fuss_catalan_numbers(p, 0).coefficients == (1,) for p in range(2, 7))


@pytest.mark.parametrize("p", range(2, 6))
def test_fuss_catalan_self_consistent(p):
    assert not any(fuss_catalan_numbers(p, 30).residual_coefficients())


def test_fuss_catalan_domain():
    with pytest.raises(ValueError):
        fuss_catalan_numbers(1, 3)


def test_series_examples():
    assert tp_series_eval(2, 0) == 1
    assert residual(2, 0.01, tp_series_eval(2, 0.01)) < 1e-12
    assert residual(5, 0.02, tp_series_eval(5, 0.02)) < 1e-10
    with pytest.raises(ConvergenceError):
        tp_series_eval(2, 0.2)


@given(st.integers(2, 5), st.floats(0, 0.05), st.floats(-np.pi, np.pi))
def test_series_residual(p, r, theta):
    z = r * np.exp(1j * theta)
    assert residual(p, z, tp_series_eval(p, z, 60)) < 1e-12


@given(st.floats(0.001, 0.03), st.floats(-np.pi, np.pi))
def test_cardano_matches_series(r, theta):
    z = r * np.exp(1j * theta)
    assert abs(tp_cardano(z) - tp_series_eval(3, z, 40)) < 1e-10


def test_cardano_examples():
    assert tp_cardano(0) == 1
    assert abs(tp_cardano(0.01) - tp_series_eval(3, 0.01, 40)) < 1e-10
    assert abs(tp_cardano(-0.02) - tp_series_eval(3, -0.02, 40)) < 1e-10
    with pytest.raises(BranchError):
        tp_cardano(4 / 27)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_newton_branch_continuation(p):
    # along the negative axis T_p stays on the branch with T(0) = 1, in (0, 1)
    prev = 1.0
    for z in (-0.01, -0.1, -1.0, -10.0):
        t = tp_eval(p, z)
        assert residual(p, z, t) < 1e-12
        assert 0 < t.real < prev and abs(t.imag) < 1e-14
        prev = t.real
    assert abs(tp_eval(3, -5) - tp_cardano(-5)) < 1e-12


def test_tp_eval_cut():
    with pytest.raises(BranchError):
        tp_eval(2, 1.0)


def test_quadratic_closed_form():
    z = -3.0
    assert abs(tp_eval(2, z) - (1 - np.sqrt(1 - 4 * z)) / (2 * z)) < 1e-13


def random_psd(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return g @ g.conj().T


def test_matrix_A_examples():
    x = random_psd(np.random.default_rng(0), 3)
    assert np.allclose(matrix_A(x, 0.0, 3, 2), x, atol=1e-12)
    assert np.allclose(matrix_A(np.eye(3), 0.03, 3, 2), tp_eval(2, -0.01) * np.eye(3), atol=1e-14)


@pytest.mark.parametrize("form", ["algebraic", "linear"])
def test_matrix_A_eigenvalues(form):
    rng = np.random.default_rng(1)
    x = random_psd(rng, 4)
    lam, n, p = 0.05, 4, 3
    w = np.linalg.eigvalsh(x)
    arg = -lam / n ** 2 * (w ** 2 if form == "algebraic" else w)
    expect = np.sort(w * np.array([tp_eval(p, z).real for z in arg]))
    got = np.linalg.eigvalsh(matrix_A(x, lam, n, p, form=form))
    assert np.allclose(np.sort(got), expect, rtol=1e-12)


def test_forms_agree_at_p2():
    x = random_psd(np.random.default_rng(2), 3)
    assert np.allclose(matrix_A(x, 0.2, 3, 2, "algebraic"), matrix_A(x, 0.2, 3, 2, "linear"))


@given(st.integers(0, 10 ** 6), st.integers(2, 4))
def test_matrix_A_hermitian(seed, p):
    x = random_psd(np.random.default_rng(seed), 3)
    a = matrix_A(x, 0.07, 3, p)
    assert np.abs(a - a.conj().T).max() < 1e-10


def test_matrix_A_rejects_non_hermitian():
    with pytest.raises(ValueError):
        matrix_A(np.array([[1.0, 2.0], [0.0, 1.0]]), 0.1, 2, 2)


@pytest.mark.parametrize("p", [2, 3])
def test_derivative_identity(p):
    rng = np.random.default_rng(10 + p)
    x = random_psd(rng, 4)
    h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = h + h.conj().T
    eps, lam = 1e-5, 0.05
    fd = (matrix_A(x + eps * h, lam, 4, p) - matrix_A(x - eps * h, lam, 4, p)) / (2 * eps)
    pred = np.einsum("ijkl,kl->ij", derivative_operator(x, lam, 4, p), h)
    assert np.linalg.norm(fd - pred) / np.linalg.norm(pred) < 1e-6


def test_sigma_resolvent_examples():
    s, r = sigma_and_resolvent(np.zeros((3, 3)), 0.1, 2)
    assert np.abs(s).max() == 0 and np.allclose(r, np.eye(9))
    s, r = sigma_and_resolvent(np.eye(2), 0.1, 2)
    a = matrix_A(np.eye(2), 0.1, 2, 2)
    c = 0.1 / 2
    assert np.allclose(s, c * (np.kron(a, np.eye(2)) + np.kron(np.eye(2), a)))
    assert np.allclose(a, a[0, 0] * np.eye(2))


def test_sigma_resolvent_residual():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    s, r = sigma_and_resolvent(m, 0.05, 2)
    assert np.abs(r @ (np.eye(9) + s) - np.eye(9)).max() < 1e-10


def test_sigma_resolvent_domain():
    from lvrkit.borel import DomainSpec

    dom = DomainSpec(1, 1.0)
    sigma_and_resolvent(np.eye(2), 0.1, 2, domain=dom)
    with pytest.raises(ValueError):
        sigma_and_resolvent(np.eye(2), 5.0, 2, domain=dom)


def test_ill_conditioned_reported():
    from lvrkit.lvr_kernel import _checked_inverse

    with pytest.raises(IllConditionedError) as err:
        _checked_inverse(np.array([[1.0, 1.0], [1.0, 1.0 + 1e-15]]))
    assert err.value.condition > 1e12
