"""Fuss-Catalan generating function T_p and the matrix operators built on it.

T_p is the solution of z T^p - T + 1 = 0 with T_p(0) = 1.  The matrix map is

    A(X) = X T_p(-c X^(p-1)),   c = lam / N^(p-1),

so that X = A + c A^p and dA = (1 + Sigma_X)^{-1} dX with
Sigma_X = c sum_k A^k (.) A^(p-1-k).  Passing ``form="linear"`` uses the
argument -c X instead; both coincide at p = 2.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SERIES_GUARD = 0.05
HERMITIAN_TOL = 1e-10
RESIDUAL_TOL = 1e-10
COND_LIMIT = 1e12


class ConvergenceError(ValueError):
    """Series evaluated outside its guard radius or Newton failed."""


class BranchError(ValueError):
    """Evaluation point too close to a branch point of T_p."""


class IllConditionedError(ValueError):
    def __init__(self, msg, condition):
        super().__init__(msg)
        self.condition = condition


def branch_point(p):
    """Radius of convergence of T_p: (p-1)^(p-1) / p^p."""
    return (p - 1) ** (p - 1) / p ** p


@dataclass(frozen=True)
class FussCatalanSeries:
    p: int
    coefficients: tuple

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("p must be >= 2")
        if self.coefficients and self.coefficients[0] != 1:
            raise ValueError("C_0 must be 1")

    @property
    def n_max(self):
        return len(self.coefficients) - 1

    def residual_coefficients(self):
        """Coefficients of z T^p - T + 1 through z^n_max (all zero for a valid series)."""
        n = self.n_max
        tp = _poly_pow(self.coefficients, self.p, n)
        shifted = [0] + list(tp[:n])
        return [shifted[i] - self.coefficients[i] + (1 if i == 0 else 0) for i in range(n + 1)]

    def __call__(self, z):
        return _horner(self.coefficients, z)


def _poly_mul(a, b, n):
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x:
            for j, y in enumerate(b[: n + 1 - i]):
                out[i + j] += x * y
    return out


def _poly_pow(a, k, n):
    out = [1] + [0] * n
    for _ in range(k):
        out = _poly_mul(out, a, n)
    return out


@lru_cache(maxsize=64)
def _fuss_catalan(p, n_max):
    t = [1] + [0] * n_max
    for _ in range(n_max + 1):
        tp = _poly_pow(t, p, n_max)
        t = [1] + tp[:n_max]
    return tuple(t)


def fuss_catalan_numbers(p: int, n_max: int) -> FussCatalanSeries:
    """Coefficients of T_p through z^n_max by iterating T <- 1 + z T^p."""
    if not isinstance(p, int) or p < 2:
        raise ValueError("p must be an integer >= 2")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    return FussCatalanSeries(p, _fuss_catalan(p, n_max))


def _horner(coeffs, z):
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def residual(p, z, t):
    return abs(z * t ** p - t + 1)


def tp_series_eval(p, z, n_terms=60, guard=SERIES_GUARD):
    """Partial sum of T_p with n_terms terms; |z| must not exceed ``guard``."""
    if abs(z) > guard * (1 + 1e-12):
        raise ConvergenceError(f"|z|={abs(z):.3g} exceeds the series guard {guard}")
    coeffs = fuss_catalan_numbers(p, max(n_terms - 1, 0)).coefficients
    return complex(_horner([float(c) for c in coeffs], complex(z)))


def tp_series_eval_with_residual(p, z, n_terms=60, guard=SERIES_GUARD):
    t = tp_series_eval(p, z, n_terms, guard)
    return t, residual(p, z, t)


def _newton(p, z, t, tol=1e-15, maxit=60):
    for _ in range(maxit):
        f = z * t ** p - t + 1
        df = p * z * t ** (p - 1) - 1
        if abs(df) < 1e-8:
            raise BranchError(f"derivative vanishes near z={z}")
        step = f / df
        t -= step
        if abs(step) <= tol * max(1.0, abs(t)):
            return t
    raise ConvergenceError(f"Newton did not converge at z={z}")


def tp_eval(p, z, guard=SERIES_GUARD, n_terms=60):
    """T_p(z) on the branch with T_p(0) = 1.

    Inside the guard radius the series is used; outside, Newton steps follow
    the ray from the guard circle to z, each seeded by the previous point.
    """
    z = complex(z)
    if abs(z) <= guard:
        return tp_series_eval(p, z, n_terms, guard)
    zc = branch_point(p)
    if abs(z - zc) < 1e-6 * zc:
        raise BranchError(f"z={z} is at the branch point {zc}")
    if z.imag == 0 and z.real > zc:
        raise BranchError(f"z={z} lies on the cut [{zc:.6g}, inf)")
    direction = z / abs(z)
    start = guard * direction
    t = tp_series_eval(p, start, n_terms, guard)
    n_steps = max(4, int(math.ceil(8 * math.log(abs(z) / guard + 1.0) / math.log(2))) + 8)
    radii = np.geomspace(guard, abs(z), n_steps + 1)[1:]
    for r in radii:
        t = _newton(p, r * direction, t)
    return complex(t)


def tp_cardano(z):
    """T_3(z) from the radical solution of z T^3 - T + 1 = 0.

    Writes S = 1/T, which solves S^3 - S^2 + z = 0, shifts S = y + 1/3 to
    y^3 - y/3 + (z - 2/27) = 0 and takes the Cardano root nearest S = 1.
    """
    z = complex(z)
    if z == 0:
        return 1.0 + 0j
    zc = branch_point(3)
    if abs(z - zc) < 1e-3:
        raise BranchError(f"z={z} is within 1e-3 of the branch point 4/27")
    q = z - 2.0 / 27.0
    disc = cmath.sqrt(q * q / 4.0 - 1.0 / 729.0)
    w = -q / 2.0 + disc
    if abs(w) < 1e-300:
        w = -q / 2.0 - disc
    u = w ** (1.0 / 3.0)
    omega = cmath.exp(2j * cmath.pi / 3.0)
    roots = []
    for k in range(3):
        uk = u * omega ** k
        roots.append(uk + 1.0 / (9.0 * uk) + 1.0 / 3.0)
    roots.sort(key=lambda s: abs(s - 1.0))
    if abs(roots[1] - roots[0]) < 2.0 * abs(roots[0] - 1.0) or abs(roots[0]) < 1e-12:
        raise BranchError(f"branch of T_3 not separated at z={z}")
    return 1.0 / roots[0]


# ---------------------------------------------------------------- matrices


def _check_hermitian_psd(x, tol=HERMITIAN_TOL):
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError("operand must be a square matrix")
    scale = max(1.0, np.abs(x).max())
    if np.abs(x - x.conj().T).max() > tol * scale:
        raise ValueError("operand is not Hermitian")
    w, v = np.linalg.eigh((x + x.conj().T) / 2)
    if w.min() < -tol * scale:
        raise ValueError("operand is not positive semidefinite")
    return np.clip(w, 0.0, None), v


def coupling(lam, n, p):
    return lam / n ** (p - 1)


def eigen_arguments(x_eigs, lam, n, p, form="algebraic"):
    c = coupling(lam, n, p)
    if form == "algebraic":
        return -c * x_eigs ** (p - 1)
    if form == "linear":
        return -c * x_eigs
    raise ValueError(f"unknown form {form!r}")


def matrix_A(X, lam, n=None, p=2, form="algebraic"):
    """A(X) = X T_p(-(lam/N^(p-1)) X^(p-1)) through the eigendecomposition of X."""
    w, v = _check_hermitian_psd(X)
    n = X.shape[0] if n is None else n
    args = eigen_arguments(w, lam, n, p, form)
    t = np.array([tp_eval(p, z) for z in args])
    a = w * t
    out = (v * a) @ v.conj().T
    if np.isreal(lam):
        out = (out + out.conj().T) / 2
    return out


def _powers(a, k):
    out = [np.eye(a.shape[0], dtype=complex)]
    for _ in range(k):
        out.append(out[-1] @ a)
    return out


def sigma_x(X, lam, n=None, p=2):
    """Superoperator Sigma_X on row-major vec: c sum_k A^k (x) (A^(p-1-k))^T."""
    n = X.shape[0] if n is None else n
    a = matrix_A(X, lam, n, p)
    pw = _powers(a, p - 1)
    c = coupling(lam, n, p)
    return c * sum(np.kron(pw[k], pw[p - 1 - k].T) for k in range(p))


def derivative_operator(X, lam, n=None, p=2):
    """(1 + Sigma_X)^{-1} reshaped to R[i, j, k, l] = dA_ij / dX_kl."""
    s = sigma_x(X, lam, n, p)
    r = _checked_inverse(np.eye(s.shape[0]) + s)
    d = X.shape[0]
    return r.reshape(d, d, d, d)


def _checked_inverse(m):
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditionedError(f"1 + Sigma is ill-conditioned (cond={cond:.3e})", cond)
    r = np.linalg.inv(m)
    res = np.abs(m @ r - np.eye(m.shape[0])).max()
    if res >= RESIDUAL_TOL:
        raise IllConditionedError(f"inversion residual {res:.3e} (cond={cond:.3e})", cond)
    return r


def sigma_and_resolvent(M, lam, p=2, n=None, domain=None):
    """Sigma = c sum_k A(MM^dagger)^k (x) A(M^dagger M)^(p-1-k) and R = (1 + Sigma)^{-1}.

    ``domain`` is an optional :class:`lvrkit.borel.DomainSpec` that lam must lie in.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0] if n is None else n
    if domain is not None:
        from .borel import in_domain

        if not in_domain(lam, domain):
            raise ValueError(f"lam={lam} outside the configured domain")
    ax = matrix_A(M @ M.conj().T, lam, n, p)
    ay = matrix_A(M.conj().T @ M, lam, n, p)
    px, py = _powers(ax, p - 1), _powers(ay, p - 1)
    sigma = coupling(lam, n, p) * sum(np.kron(px[k], py[p - 1 - k]) for k in range(p))
    r = _checked_inverse(np.eye(sigma.shape[0]) + sigma)
    return sigma, r
