import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import exp1

from lvrkit import oracle
from lvrkit.borel import (
    DomainSpec,
    QuadratureError,
    borel_leroy_transform,
    d_r_cosine_form,
    d_r_root_form,
    domain_check,
    fit_sigma,
    in_domain,
    inverse_borel_quadrature,
    laguerre_nodes,
    remainder_envelope,
)


def test_domain_examples():
    assert in_domain(0.5, DomainSpec(1, 1.0))
    assert not in_domain(2.1, DomainSpec(1, 1.0))
    boundary = 2.0 * cmath.exp(1j * math.pi / 2)
    assert not in_domain(boundary, DomainSpec(2, 1.0))
    assert in_domain(0.99 * boundary, DomainSpec(2, 1.0))


def test_origin_is_flagged():
    check = domain_check(0, DomainSpec(1, 1.0))
    assert check.inside and check.flags


def test_pacman_and_cardioid():
    pac = DomainSpec(1, 1.0, kind="pacman", angle=2.0, radius=0.5)
    assert in_domain(0.3j, pac)
    assert not in_domain(-0.3, pac)
    assert not in_domain(0.6, pac)
    card = DomainSpec(2, 1.0, kind="cardioid")
    assert in_domain(3.9, card) and not in_domain(4.1, card)
    with pytest.raises(ValueError):
        DomainSpec(1, 1.0, kind="pacman")
    with pytest.raises(ValueError):
        DomainSpec(0, 1.0)


@pytest.mark.parametrize("q", [1, 2, 3])
def test_domain_forms_agree_on_samples(q):
    rng = np.random.default_rng(q)
    R = 0.7
    scale = (2 * R) ** q
    zs = scale * 1.5 * rng.random(10 ** 4) ** 0.5 * np.exp(1j * rng.uniform(-math.pi, math.pi, 10 ** 4))
    mismatches = [z for z in zs if d_r_root_form(z, q, R) != d_r_cosine_form(z, q, R)]
    assert not mismatches


@settings(max_examples=200)
@given(st.integers(1, 4), st.floats(0.1, 5.0), st.floats(1e-3, 20.0), st.floats(-math.pi + 1e-9, math.pi))
def test_domain_forms_agree_property(q, R, mod, arg):
    z = mod * cmath.exp(1j * arg)
    assert d_r_root_form(z, q, R) == d_r_cosine_form(z, q, R)


def test_transform_examples():
    b = borel_leroy_transform([1, 0, 0, 0], 3)
    assert b.coefficients == (1, 0, 0, 0)
    b = borel_leroy_transform([(-1) ** n * math.factorial(n) for n in range(8)], 1)
    assert b.coefficients == tuple(Fraction((-1) ** n) for n in range(8))
    assert b(0.5) == pytest.approx(sum((-0.5) ** n for n in range(8)))
    b = borel_leroy_transform([math.factorial(2 * n) for n in range(6)], 2)
    assert b.coefficients == (1,) * 6
    assert b.check()


@settings(max_examples=30)
@given(st.integers(1, 3), st.lists(st.fractions(max_denominator=50), min_size=1, max_size=8))
def test_transform_exact_inverse(q, a):
    assert borel_leroy_transform(a, q).check()


def test_exponential_pair():
    r = inverse_borel_quadrature(lambda t: cmath.exp(-t), 0.5, 1)
    assert abs(r.value - 2 / 3) < 1e-8
    assert r.error_estimate < 1e-8


@pytest.mark.parametrize("z", [0.1, 0.5, 1.0])
def test_round_trip(z):
    a = [(-1) ** n for n in range(20)]
    b = borel_leroy_transform(a, 1)
    assert b.coefficients[:3] == (Fraction(1), Fraction(-1), Fraction(1, 2))
    r = inverse_borel_quadrature(lambda t: cmath.exp(-t), z, 1)
    assert abs(r.value - 1 / (1 + z)) < 1e-8


@pytest.mark.parametrize("q", [1, 2, 3])
@pytest.mark.parametrize("z", [0.3, 0.2 + 0.2j, 0.05 - 0.1j])
def test_kernel_normalization(q, z):
    assert in_domain(z, DomainSpec(q, 1.0))
    r = inverse_borel_quadrature(lambda t: 1.0, z, q, domain=DomainSpec(q, 1.0))
    assert abs(r.value - 1) < 1e-10


@pytest.mark.parametrize("z", [0.1, 0.5])
def test_stieltjes_pair(z):
    r = inverse_borel_quadrature(lambda t: 1 / (1 + t), z, 1)
    want = math.exp(1 / z) * exp1(1 / z) / z
    assert abs(r.value - want) < 1e-8


def test_outside_domain_rejected():
    with pytest.raises(ValueError):
        inverse_borel_quadrature(lambda t: 1.0, 3.0, 1, domain=DomainSpec(1, 1.0))


def test_growing_integrand_fails():
    with pytest.raises(QuadratureError):
        inverse_borel_quadrature(lambda t: cmath.exp(2 * t), 1.0, 1)


def test_nodes_read_only():
    x, w = laguerre_nodes(64)
    with pytest.raises(ValueError):
        x[0] = 1.0
    assert abs(w.sum() - 1) < 1e-12


def test_envelope_examples():
    assert remainder_envelope(0, 2.0, 1, 0.3) == pytest.approx(0.3)
    assert remainder_envelope(2, 2.0, 1, 0.1) == pytest.approx(0.008)
    assert remainder_envelope(1, 3.0, 2, 0.2) == pytest.approx(0.24)


@settings(max_examples=100)
@given(st.integers(0, 8), st.integers(1, 3), st.floats(1.0, 10.0), st.floats(0.01, 1.0))
def test_envelope_monotone(n, q, sigma, mod):
    base = remainder_envelope(n, sigma, q, mod)
    assert remainder_envelope(n, sigma * 1.1, q, mod) >= base
    assert remainder_envelope(n, sigma, q, mod * 1.1) >= base
    if sigma * mod >= 1:
        assert remainder_envelope(n + 1, sigma, q, mod) >= base


def test_fit_sigma_examples():
    z = 0.1
    pts = [(n, remainder_envelope(n, 2.0, 1, z)) for n in range(1, 5)]
    assert fit_sigma(pts, 1, z) == pytest.approx(2.0, rel=1e-12)
    assert fit_sigma([(1, 0.0), (2, 0.0)], 1, z) == 0.0
    with pytest.raises(ValueError):
        fit_sigma([(1, 0.1)], 1, z)
    with pytest.warns(RuntimeWarning):
        fit_sigma([(0, 1.0), (1, 0.0)], 1, z)


def test_fit_sigma_on_series_remainders():
    z, n = 0.05, 3
    coeffs = [c(n) for c in oracle.logz(2, 3)]
    partial = np.cumsum([float(c) * z ** k for k, c in enumerate(coeffs)])
    rem = [(k, abs(partial[-1] - partial[k])) for k in (1, 2)]
    sigma = fit_sigma(rem, 1, z)
    assert math.isfinite(sigma) and sigma > 0
    for k, r in rem:
        assert r <= remainder_envelope(k, sigma, 1, z) * (1 + 1e-12)
