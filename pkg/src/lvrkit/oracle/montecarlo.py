"""Sampling oracles: Haar unitaries and Metropolis chains of the matrix model."""
from __future__ import annotations

import csv
import itertools
import json
import os
import tempfile
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .._backend import BACKEND, get_kernels

UNITARITY_TOL = 1e-10
TARGET_ACCEPTANCE = 0.3
ACCEPTANCE_BOUNDS = (0.2, 0.5)


@dataclass(frozen=True)
class McEstimate:
    mean: complex | float
    standard_error: complex | float
    sample_count: int
    seed: int
    acceptance_rate: float | None = None
    name: str = ""

    def within(self, exact, n_sigma=4.0, extra=0.0):
        """|mean - exact| <= n_sigma * se + extra, per real and imaginary part."""
        diff = complex(self.mean) - complex(exact)
        se = complex(self.standard_error)
        return (abs(diff.real) <= n_sigma * se.real + extra
                and abs(diff.imag) <= n_sigma * se.imag + extra)

    def to_json(self):
        out = asdict(self)
        for key in ("mean", "standard_error"):
            v = complex(out[key])
            out[key] = v.real if v.imag == 0 else [v.real, v.imag]
        return out


class UnitarityError(RuntimeError):
    pass


def haar_unitaries(n, count, rng):
    """Haar unitaries from QR of complex Ginibre matrices, R-diagonal phases removed."""
    z = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def unitarity_defect(u):
    """Per-sample max |U^dagger U - 1|."""
    eye = np.eye(u.shape[-1])
    return np.abs(np.conj(np.swapaxes(u, 1, 2)) @ u - eye).max(axis=(1, 2))


def _canonical(a, b, c, d):
    """Representative of a moment under row/column relabeling and factor reordering."""
    best = None
    for pu in itertools.permutations(range(len(a))):
        for pc in itertools.permutations(range(len(c))):
            rows, cols = {}, {}
            ra = tuple(rows.setdefault(a[i], len(rows)) for i in pu)
            rb = tuple(cols.setdefault(b[i], len(cols)) for i in pu)
            rc = tuple(rows.setdefault(c[i], len(rows)) for i in pc)
            rd = tuple(cols.setdefault(d[i], len(cols)) for i in pc)
            key = (ra, rb, rc, rd)
            if best is None or key < best:
                best = key
    return best


def canonical_moments(n, kmax=2):
    """One representative (a, b, c, d) per Haar-equivalent moment with k, l <= kmax."""
    reps = set()
    for k in range(kmax + 1):
        for l in range(kmax + 1):
            if k == l == 0:
                continue
            for idx in itertools.product(range(n), repeat=2 * (k + l)):
                a, b = idx[:k], idx[k:2 * k]
                c, d = idx[2 * k:2 * k + l], idx[2 * k + l:]
                reps.add(_canonical(a, b, c, d))
    return sorted(reps, key=lambda t: (len(t[0]), len(t[2]), t))


def _moment_values(u, a, b, c, d):
    val = np.ones(u.shape[0], dtype=complex)
    for i, j in zip(a, b):
        val = val * u[:, i, j]
    for i, j in zip(c, d):
        val = val * np.conj(u[:, i, j])
    return val


def mc_haar(n, samples, seed, moments=None, batch=20000):
    """Sample Haar moments E[prod U_{a_i b_i} prod conj U_{c_j d_j}].

    ``moments`` is a list of (a, b, c, d) index tuples; the default is every
    canonical moment of degree k, l <= 2.  Returns {moment: McEstimate}.
    """
    if not 1 <= n <= 16:
        raise ValueError("N must lie in [1, 16]")
    if not 1 <= samples <= 10**7:
        raise ValueError("samples must lie in [1, 1e7]")
    moments = canonical_moments(n) if moments is None else [tuple(map(tuple, m)) for m in moments]
    rng = np.random.default_rng(seed)
    s1 = np.zeros(len(moments), dtype=complex)
    s2r = np.zeros(len(moments))
    s2i = np.zeros(len(moments))
    done = 0
    while done < samples:
        count = min(batch, samples - done)
        u = haar_unitaries(n, count, rng)
        worst = unitarity_defect(u).max()
        if worst >= UNITARITY_TOL:
            raise UnitarityError(f"sample off the unitary group by {worst:.3e}")
        for t, (a, b, c, d) in enumerate(moments):
            v = _moment_values(u, a, b, c, d)
            s1[t] += v.sum()
            s2r[t] += (v.real ** 2).sum()
            s2i[t] += (v.imag ** 2).sum()
        done += count
    out = {}
    for t, m in enumerate(moments):
        mean = s1[t] / samples
        var_r = max(s2r[t] / samples - mean.real ** 2, 0.0) * samples / max(samples - 1, 1)
        var_i = max(s2i[t] / samples - mean.imag ** 2, 0.0) * samples / max(samples - 1, 1)
        se = complex(np.sqrt(var_r / samples), np.sqrt(var_i / samples))
        out[m] = McEstimate(complex(mean), se, samples, seed, None, f"U{m}")
    return out


# ---------------------------------------------------------------- Metropolis


def invariant_name(k):
    return "(1/N)Tr(MM^dagger)" if k == 1 else f"(1/N)Tr(MM^dagger)^{k}"


def _batch_stats(series, n_batches):
    """Mean and batch-means standard error of a 1-d series."""
    size = len(series) // n_batches
    if size == 0:
        raise ValueError("not enough sweeps for the requested batch count")
    means = series[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return means.mean(), means.std(ddof=1) / np.sqrt(n_batches), means


@dataclass
class ModelRun:
    p: int
    lam: float
    n: int
    seed: int
    sweeps: int
    burn_in: int
    chains: int
    backend: str
    acceptance: list
    steps: list
    estimates: dict
    connected: dict
    status: str
    trace: np.ndarray | None = field(default=None, repr=False)

    def summary(self):
        return {
            "p": self.p, "lambda": self.lam, "N": self.n, "seed": self.seed,
            "sweeps_per_chain": self.sweeps, "burn_in": self.burn_in, "chains": self.chains,
            "backend": self.backend, "status": self.status,
            "acceptance": self.acceptance, "steps": self.steps,
            "invariants": {k: {"estimate": e.mean, "stderr": e.standard_error,
                               "samples": e.sample_count, "seed": e.seed,
                               "acceptance": e.acceptance_rate}
                           for k, e in self.estimates.items()},
            "connected": {k: {"estimate": e.mean, "stderr": e.standard_error,
                              "samples": e.sample_count, "seed": e.seed,
                              "acceptance": e.acceptance_rate}
                          for k, e in self.connected.items()},
        }

    def write_trace_csv(self, path, chain=0, thin=1):
        """Columns sweep, invariant_name, value for one chain."""
        if self.trace is None:
            raise ValueError("run was made without keep_trace=True")
        kmax = self.trace.shape[2]
        _atomic(path, lambda fh: _write_csv(fh, self.trace[::thin, chain, :], kmax, thin))

    def write_summary_json(self, path):
        _atomic(path, lambda fh: json.dump(self.summary(), fh, indent=2))


def _write_csv(fh, trace, kmax, thin):
    w = csv.writer(fh)
    w.writerow(["sweep", "invariant_name", "value"])
    for s, row in enumerate(trace):
        for k in range(kmax):
            w.writerow([s * thin, invariant_name(k + 1), repr(float(row[k]))])


def _atomic(path, writer):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _draws(gens, block, n):
    normals = np.stack([g.standard_normal((block, n, n, 2)) for g in gens], axis=1)
    uniforms = np.stack([g.random((block, n, n)) for g in gens], axis=1)
    return np.ascontiguousarray(normals), np.ascontiguousarray(uniforms)


def mc_model(p, lam, n, sweeps, burn_in, seed, chains=4, kmax=2, block=2000,
             n_batches=50, backend=None, keep_trace=False, step=None):
    """Metropolis estimates of (1/N) Tr (M M^dagger)^k, k = 1..kmax.

    Targets exp(-N Tr MM^dagger - lam N Tr (MM^dagger)^p) with single-entry
    complex Gaussian proposals.  Chain c draws from a stream seeded by
    (seed, c); the step size of each chain starts at ``step`` (default
    N^-1/2) and is tuned during burn-in toward acceptance 0.3.  Per-chain
    batch means are merged by inverse-variance weighting.  ``connected`` holds N^2 (E[t_i t_j] - E[t_i] E[t_j]) with a
    jackknife error over pooled batches.
    """
    if lam < 0 or not np.isfinite(lam):
        raise ValueError("lam must be real and >= 0")
    if not 1 <= n <= 8:
        raise ValueError("N must lie in [1, 8]")
    if p < 2:
        raise ValueError("p must be >= 2")
    kern = get_kernels(backend)
    gens = [np.random.default_rng([seed, c]) for c in range(chains)]
    M = np.zeros((chains, n, n), dtype=complex)
    steps = np.full(chains, 1.0 / np.sqrt(n) if step is None else float(step))

    remaining = burn_in
    while remaining > 0:
        b = min(100, remaining)
        normals, uniforms = _draws(gens, b, n)
        obs = np.zeros((b, chains, kmax))
        acc = kern.metropolis_sweeps(M, float(lam), p, steps, normals, uniforms, obs)
        rate = acc / (b * n * n)
        steps = steps * np.clip(np.exp(2.0 * (rate - TARGET_ACCEPTANCE)), 0.5, 2.0)
        remaining -= b

    trace = np.empty((sweeps, chains, kmax))
    accepted = np.zeros(chains, dtype=np.int64)
    done = 0
    while done < sweeps:
        b = min(block, sweeps - done)
        normals, uniforms = _draws(gens, b, n)
        obs = np.zeros((b, chains, kmax))
        accepted += kern.metropolis_sweeps(M, float(lam), p, steps, normals, uniforms, obs)
        trace[done:done + b] = obs
        done += b

    acceptance = (accepted / (sweeps * n * n)).tolist()
    lo, hi = ACCEPTANCE_BOUNDS
    status = "ok" if all(lo <= a <= hi for a in acceptance) else "warning"
    if status == "warning":
        warnings.warn(f"Metropolis acceptance {acceptance} outside [{lo}, {hi}]", RuntimeWarning)
    mean_acc = float(np.mean(acceptance))

    estimates = {}
    for k in range(kmax):
        means, ses = [], []
        for c in range(chains):
            m, se, _ = _batch_stats(trace[:, c, k], n_batches)
            means.append(m)
            ses.append(se)
        w = 1.0 / np.maximum(np.square(ses), 1e-300)
        mean = float(np.sum(w * means) / np.sum(w))
        se = float(1.0 / np.sqrt(np.sum(w)))
        estimates[invariant_name(k + 1)] = McEstimate(mean, se, sweeps * chains, seed, mean_acc,
                                                      invariant_name(k + 1))

    connected = {}
    size = sweeps // n_batches
    if size > 0:
        blk = trace[: size * n_batches].reshape(n_batches, size, chains, kmax)
        blk = np.swapaxes(blk, 1, 2).reshape(n_batches * chains, size, kmax)
        nb = blk.shape[0]
        for i in range(kmax):
            for j in range(i, kmax):
                sum_ij = (blk[:, :, i] * blk[:, :, j]).sum(axis=1)
                sum_i = blk[:, :, i].sum(axis=1)
                sum_j = blk[:, :, j].sum(axis=1)
                tot = size * nb

                def cov(sij, si, sj, count):
                    return n * n * (sij / count - (si / count) * (sj / count))

                full = cov(sum_ij.sum(), sum_i.sum(), sum_j.sum(), tot)
                jack = np.array([cov(sum_ij.sum() - sum_ij[b], sum_i.sum() - sum_i[b],
                                     sum_j.sum() - sum_j[b], tot - size) for b in range(nb)])
                se = float(np.sqrt((nb - 1) / nb * np.sum((jack - jack.mean()) ** 2)))
                name = f"N^2 cov[{invariant_name(i + 1)}, {invariant_name(j + 1)}]"
                connected[name] = McEstimate(float(full), se, tot, seed, mean_acc, name)

    return ModelRun(p, float(lam), n, seed, sweeps, burn_in, chains, backend or BACKEND,
                    acceptance, steps.tolist(), estimates, connected, status,
                    trace if keep_trace else None)
