"""Borel-LeRoy transform of order q, its inverse integral, and analyticity domains.

For a series F(z) = sum a_n z^n the transform is B(t) = sum a_n t^n / (qn)!
and F is recovered as

    F(z) = int_0^inf B(z u^q) e^(-u) du,

evaluated with Gauss-Laguerre nodes, doubling the node count until two
successive values agree.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np
from scipy.special import roots_laguerre

BOUNDARY_RTOL = 1e-12
KINDS = ("D_R", "pacman", "cardioid")


@dataclass(frozen=True)
class DomainSpec:
    """Analyticity domain.

    * ``D_R``: Re z^(-1/q) > 1/(2R), i.e. |z| < (2R)^q cos^q(arg z / q);
    * ``pacman``: 0 < |z| < radius and |arg z| < angle;
    * ``cardioid``: |z| < radius * cos^q(arg z / q) (radius defaults to (2R)^q).
    """

    q: int
    R: float
    kind: str = "D_R"
    angle: float | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be a positive integer")
        if self.R <= 0:
            raise ValueError("R must be positive")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.kind == "pacman" and (self.angle is None or self.radius is None):
            raise ValueError("pacman needs an explicit angle and radius")

    def to_json(self):
        return {"q": self.q, "R": self.R, "kind": self.kind, "angle": self.angle, "radius": self.radius}


@dataclass(frozen=True)
class DomainCheck:
    inside: bool
    flags: tuple = ()


def _strict_less(x, bound):
    return x < bound * (1.0 - BOUNDARY_RTOL)


def d_r_root_form(z, q, R):
    """Re z^(-1/q) > (2R)^-1 on the principal branch."""
    w = complex(z) ** (-1.0 / q)
    target = 1.0 / (2.0 * R)
    return w.real > target * (1.0 + BOUNDARY_RTOL)


def d_r_cosine_form(z, q, R):
    """|z| < (2R)^q cos^q(arg z / q) with |arg z| < q pi / 2."""
    theta = cmath.phase(complex(z))
    if abs(theta) >= q * math.pi / 2:
        return False
    c = math.cos(theta / q)
    if c <= 0:
        return False
    return _strict_less(abs(z), (2.0 * R) ** q * c ** q)


def domain_check(z, spec: DomainSpec) -> DomainCheck:
    z = complex(z)
    if z == 0:
        return DomainCheck(True, ("z=0 taken inside as a limit point",))
    if spec.kind == "D_R":
        return DomainCheck(d_r_root_form(z, spec.q, spec.R))
    theta = cmath.phase(z)
    if spec.kind == "pacman":
        return DomainCheck(_strict_less(abs(z), spec.radius) and _strict_less(abs(theta), spec.angle))
    radius = (2.0 * spec.R) ** spec.q if spec.radius is None else spec.radius
    c = math.cos(theta / spec.q)
    return DomainCheck(c > 0 and _strict_less(abs(z), radius * c ** spec.q))


def in_domain(z, spec: DomainSpec) -> bool:
    return domain_check(z, spec).inside


@dataclass(frozen=True)
class BorelSeries:
    q: int
    coefficients: tuple
    origin: tuple

    def __call__(self, t):
        acc = 0j
        for b in reversed(self.coefficients):
            acc = acc * t + complex(b)
        return acc

    def check(self):
        """b_n (qn)! == a_n (exactly for rational input)."""
        return all(b * math.factorial(self.q * n) == a
                   for n, (a, b) in enumerate(zip(self.origin, self.coefficients)))


def borel_leroy_transform(a, q) -> BorelSeries:
    if q < 1:
        raise ValueError("q must be >= 1")
    out = []
    for n, an in enumerate(a):
        f = math.factorial(q * n)
        out.append(Fraction(an) / f if isinstance(an, Rational) else an / f)
    return BorelSeries(q, tuple(out), tuple(a))


@lru_cache(maxsize=16)
def laguerre_nodes(n):
    x, w = roots_laguerre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float
    nodes: int


def inverse_borel_quadrature(B, z, q, nodes=64, tol=1e-9, max_nodes=1024, domain=None):
    """int_0^inf B(z u^q) e^(-u) du; returns value, |difference| of the last two refinements, nodes."""
    z = complex(z)
    if domain is not None and not in_domain(z, domain):
        raise ValueError(f"z={z} outside the domain")

    def rule(n):
        x, w = laguerre_nodes(n)
        try:
            vals = np.array([complex(B(z * u ** q)) for u in x])
        except (OverflowError, ZeroDivisionError) as exc:
            raise QuadratureError(f"integrand failed at {n} nodes: {exc}") from exc
        if not np.all(np.isfinite(vals)):
            raise QuadratureError("integrand not finite at a quadrature node")
        return complex(np.dot(w, vals))

    prev = rule(nodes)
    n = nodes
    while n < max_nodes:
        n *= 2
        cur = rule(n)
        err = abs(cur - prev)
        if err <= tol * max(1.0, abs(cur)):
            return QuadratureResult(cur, err, n)
        prev = cur
    raise QuadratureError(f"no agreement to {tol} up to {max_nodes} nodes (integrand grows too fast?)")


def remainder_envelope(n, sigma, q, z):
    """sigma^n (qn)! |z|^(n+1)."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    return float(sigma ** n * math.factorial(q * n) * abs(z) ** (n + 1))


def fit_sigma(remainders, q, z):
    """Smallest sigma with |R_n| <= sigma^n (qn)! |z|^(n+1) for every supplied n >= 1.

    The n = 0 bound does not involve sigma; such points are only checked and
    a RuntimeWarning is issued when they violate it.
    """
    remainders = list(remainders)
    if len(remainders) < 2:
        raise ValueError("need at least two (n, |R_n|) points")
    sigma = 0.0
    for n, r in remainders:
        r = abs(r)
        if n == 0:
            if r > abs(z):
                warnings.warn("n=0 remainder exceeds |z|; no sigma can cover it", RuntimeWarning)
            continue
        sigma = max(sigma, (r / (math.factorial(q * n) * abs(z) ** (n + 1))) ** (1.0 / n))
    return sigma
