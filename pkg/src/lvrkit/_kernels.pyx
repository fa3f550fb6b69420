# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: Wick pairing scans, ribbon face tracing, Metropolis sweeps.

Semantics match ``lvrkit._kernels_py`` exactly; see the docstrings there.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef inline int _find(int* parent, int x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef inline bint _next_perm(int* a, int n) noexcept nogil:
    cdef int i = n - 2, j, t
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    t = a[i]; a[i] = a[j]; a[j] = t
    i += 1
    j = n - 1
    while i < j:
        t = a[i]; a[i] = a[j]; a[j] = t
        i += 1
        j -= 1
    return True


def wick_class_histogram(m_row, m_col, c_row, c_col, int nvars, int nconst):
    cdef int n = len(m_row)
    cdef int total = nvars + nconst
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hist = np.zeros(nvars + 1, dtype=np.int64)
    cdef long long conflicts = 0
    cdef int* mr = <int*> malloc(n * sizeof(int))
    cdef int* mc = <int*> malloc(n * sizeof(int))
    cdef int* cr = <int*> malloc(n * sizeof(int))
    cdef int* cc = <int*> malloc(n * sizeof(int))
    cdef int* perm = <int*> malloc(n * sizeof(int))
    cdef int* parent = <int*> malloc((total + 1) * sizeof(int))
    cdef int* mark = <int*> malloc((total + 1) * sizeof(int))
    cdef int i, j, x, ru, rv, roots, bad, r, step
    cdef int u[2]
    cdef int v[2]
    try:
        for i in range(n):
            mr[i] = m_row[i]; mc[i] = m_col[i]; cr[i] = c_row[i]; cc[i] = c_col[i]
            perm[i] = i
        while True:
            for x in range(total):
                parent[x] = x
            for i in range(n):
                j = perm[i]
                u[0] = mr[i]; v[0] = cr[j]; u[1] = mc[i]; v[1] = cc[j]
                for step in range(2):
                    ru = _find(parent, u[step])
                    rv = _find(parent, v[step])
                    if ru != rv:
                        if ru >= nvars:
                            parent[rv] = ru
                        else:
                            parent[ru] = rv
            for x in range(total):
                mark[x] = 0
            roots = 0
            bad = 0
            for x in range(total):
                r = _find(parent, x)
                if not mark[r]:
                    mark[r] = 1
                    roots += 1
            for x in range(total):
                mark[x] = 0
            for x in range(nvars, total):
                r = _find(parent, x)
                if mark[r]:
                    bad = 1
                mark[r] = 1
            if bad:
                conflicts += 1
            else:
                hist[roots - nconst] += 1
            if not _next_perm(perm, n):
                break
    finally:
        free(mr); free(mc); free(cr); free(cc); free(perm); free(parent); free(mark)
    return hist, conflicts


def ribbon_scan(sigma_in, m_darts_in, md_darts_in, vertex_of_in, int nvert, leaf_kind_in):
    cdef int n = len(m_darts_in)
    cdef int ndarts = len(sigma_in)
    cdef long long nperm = 1
    cdef int i
    for i in range(2, n + 1):
        nperm *= i
    cdef cnp.ndarray[cnp.int32_t, ndim=1] ncomp = np.zeros(nperm, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] nunbroken = np.zeros(nperm, dtype=np.int32)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] code = np.zeros(nperm, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] balanced = np.zeros(nperm, dtype=np.uint8)
    cdef int* sigma = <int*> malloc(ndarts * sizeof(int))
    cdef int* alpha = <int*> malloc(ndarts * sizeof(int))
    cdef int* kind = <int*> malloc(ndarts * sizeof(int))
    cdef int* vof = <int*> malloc(ndarts * sizeof(int))
    cdef int* md = <int*> malloc(n * sizeof(int))
    cdef int* mm = <int*> malloc(n * sizeof(int))
    cdef int* perm = <int*> malloc(n * sizeof(int))
    cdef int* parent = <int*> malloc((nvert + 1) * sizeof(int))
    cdef unsigned char* seen = <unsigned char*> malloc(ndarts)
    cdef int* counts = <int*> malloc((ndarts + 1) * sizeof(int))
    cdef long long r = 0
    cdef int a, b, ru, rv, comps, unbroken, ncounts, start, d, nleaf, nj, first, prev, ok, t, key, c2
    cdef long long c
    try:
        for i in range(ndarts):
            sigma[i] = sigma_in[i]; kind[i] = leaf_kind_in[i]; vof[i] = vertex_of_in[i]
        for i in range(n):
            mm[i] = m_darts_in[i]; md[i] = md_darts_in[i]; perm[i] = i
        while True:
            for i in range(n):
                a = mm[i]; b = md[perm[i]]
                alpha[a] = b
                alpha[b] = a
            for i in range(nvert):
                parent[i] = i
            comps = nvert
            for i in range(n):
                ru = _find(parent, vof[mm[i]])
                rv = _find(parent, vof[md[perm[i]]])
                if ru != rv:
                    parent[ru] = rv
                    comps -= 1
            for i in range(ndarts):
                seen[i] = 0
            unbroken = 0
            ncounts = 0
            ok = 1
            for start in range(ndarts):
                if seen[start]:
                    continue
                nleaf = 0
                nj = 0
                first = 0
                prev = 0
                d = start
                while not seen[d]:
                    seen[d] = 1
                    if kind[d]:
                        if nleaf == 0:
                            first = kind[d]
                        elif kind[d] == prev:
                            ok = 0
                        prev = kind[d]
                        nleaf += 1
                        if kind[d] == 1:
                            nj += 1
                    d = sigma[alpha[d]]
                if nleaf == 0:
                    unbroken += 1
                    continue
                if nleaf > 1 and first == prev:
                    ok = 0
                if nj * 2 != nleaf:
                    ok = 0
                # insertion into sorted counts
                t = ncounts
                while t > 0 and counts[t - 1] > nj:
                    counts[t] = counts[t - 1]
                    t -= 1
                counts[t] = nj
                ncounts += 1
            c = 0
            for t in range(ncounts):
                c = c * 16 + counts[t]
            ncomp[r] = comps
            nunbroken[r] = unbroken
            code[r] = c
            balanced[r] = ok
            r += 1
            if not _next_perm(perm, n):
                break
    finally:
        free(sigma); free(alpha); free(kind); free(vof); free(md); free(mm)
        free(perm); free(parent); free(seen); free(counts)
    return ncomp, nunbroken, code, balanced.astype(bool)


cdef double _trace_power(double complex* X, double complex* P, double complex* T, int n, int p) noexcept nogil:
    """Re Tr X^p for Hermitian X (p >= 1); P, T are n*n scratch buffers."""
    cdef int a, b, c, k
    cdef double complex s
    cdef double acc = 0.0
    if p == 1:
        for a in range(n):
            acc += X[a * n + a].real
        return acc
    for a in range(n * n):
        P[a] = X[a]
    for k in range(p - 2):
        for a in range(n):
            for b in range(n):
                s = 0
                for c in range(n):
                    s = s + P[a * n + c] * X[c * n + b]
                T[a * n + b] = s
        for a in range(n * n):
            P[a] = T[a]
    for a in range(n):
        for b in range(n):
            acc += (P[a * n + b] * X[b * n + a]).real
    return acc


def metropolis_sweeps(cnp.ndarray[cnp.complex128_t, ndim=3] M, double lam, int p,
                      cnp.ndarray[cnp.float64_t, ndim=1] steps,
                      cnp.ndarray[cnp.float64_t, ndim=5] normals,
                      cnp.ndarray[cnp.float64_t, ndim=4] uniforms,
                      cnp.ndarray[cnp.float64_t, ndim=3] obs):
    cdef int nchain = M.shape[0]
    cdef int n = M.shape[1]
    cdef int nsweep = normals.shape[0]
    cdef int kmax = obs.shape[2]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] accepts = np.zeros(nchain, dtype=np.int64)
    cdef double complex* X = <double complex*> malloc(n * n * sizeof(double complex))
    cdef double complex* Xn = <double complex*> malloc(n * n * sizeof(double complex))
    cdef double complex* P = <double complex*> malloc(n * n * sizeof(double complex))
    cdef double complex* T = <double complex*> malloc(n * n * sizeof(double complex))
    cdef double complex* row = <double complex*> malloc(n * sizeof(double complex))
    cdef int s, ch, i, j, a, b, c, k
    cdef double complex old, new, z
    cdef double scale, trxp, trn, ds, rs
    cdef double inv_sqrt2 = 1.0 / sqrt(2.0)
    try:
        for s in range(nsweep):
            for ch in range(nchain):
                scale = steps[ch] * inv_sqrt2
                for a in range(n):
                    for b in range(n):
                        z = 0
                        for c in range(n):
                            z = z + M[ch, a, c] * M[ch, b, c].conjugate()
                        X[a * n + b] = z
                trxp = _trace_power(X, P, T, n, p)
                for i in range(n):
                    for j in range(n):
                        old = M[ch, i, j]
                        new = old + scale * (normals[s, ch, i, j, 0] + 1j * normals[s, ch, i, j, 1])
                        for c in range(n):
                            row[c] = M[ch, i, c]
                        row[j] = new
                        for a in range(n * n):
                            Xn[a] = X[a]
                        for b in range(n):
                            z = 0
                            if b == i:
                                rs = 0.0
                                for c in range(n):
                                    rs += row[c].real * row[c].real + row[c].imag * row[c].imag
                                z = rs
                            else:
                                for c in range(n):
                                    z = z + row[c] * M[ch, b, c].conjugate()
                            Xn[i * n + b] = z
                            Xn[b * n + i] = z.conjugate()
                        trn = _trace_power(Xn, P, T, n, p)
                        ds = n * ((new.real * new.real + new.imag * new.imag)
                                  - (old.real * old.real + old.imag * old.imag)) + lam * n * (trn - trxp)
                        if uniforms[s, ch, i, j] < exp(-ds):
                            M[ch, i, j] = new
                            for a in range(n * n):
                                X[a] = Xn[a]
                            trxp = trn
                            accepts[ch] += 1
                # observables from a fresh X
                for a in range(n):
                    for b in range(n):
                        z = 0
                        for c in range(n):
                            z = z + M[ch, a, c] * M[ch, b, c].conjugate()
                        X[a * n + b] = z
                for k in range(kmax):
                    obs[s, ch, k] = _trace_power(X, P, T, n, k + 1) / n
    finally:
        free(X); free(Xn); free(P); free(T); free(row)
    return accepts
