"""Pure-Python/numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` extension; used
when the extension is not built or ``LVRKIT_BACKEND=python`` is set.
"""
import itertools

import numpy as np


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def wick_class_histogram(m_row, m_col, c_row, c_col, nvars, nconst):
    """Histogram of free index classes over all Wick pairings.

    Nodes ``0..nvars-1`` are summed indices, ``nvars..nvars+nconst-1`` fixed
    external values.  M symbol i is paired with conjugate symbol perm[i];
    pairing identifies rows with rows and columns with columns.  Returns
    ``(hist, n_conflict)`` where ``hist[c]`` counts pairings with c free
    classes and ``n_conflict`` those forcing two distinct fixed values equal.
    """
    n = len(m_row)
    total = nvars + nconst
    hist = np.zeros(nvars + 1, dtype=np.int64)
    conflicts = 0
    for perm in itertools.permutations(range(n)):
        parent = list(range(total))
        for i in range(n):
            j = perm[i]
            for u, v in ((m_row[i], c_row[j]), (m_col[i], c_col[j])):
                ru, rv = _find(parent, u), _find(parent, v)
                if ru != rv:
                    # keep fixed-value nodes as roots
                    if ru >= nvars:
                        parent[rv] = ru
                    else:
                        parent[ru] = rv
        roots = {_find(parent, x) for x in range(total)}
        const_roots = {_find(parent, x) for x in range(nvars, total)}
        if len(const_roots) < nconst:
            conflicts += 1
            continue
        hist[len(roots) - nconst] += 1
    return hist, conflicts


def ribbon_scan(sigma, m_darts, md_darts, vertex_of, nvert, leaf_kind):
    """Trace faces of every labeled ribbon graph on a fixed vertex set.

    ``sigma`` is the vertex rotation on darts; graph number r (lexicographic
    rank of the matching perm) glues M dart ``m_darts[i]`` to M-dagger dart
    ``md_darts[perm[i]]``.  Faces are cycles of sigma o alpha.  Leaf darts
    (``leaf_kind`` 1 for J-dagger cilia, 2 for J cilia) mark faces broken.

    Returns arrays (n_components, n_unbroken_faces, broken_code, balanced)
    with broken_code packing the sorted cilium counts of broken faces in
    base 16 and balanced flagging that J and J-dagger alternate in every face.
    """
    n = len(m_darts)
    ndarts = len(sigma)
    nperm = 1
    for i in range(2, n + 1):
        nperm *= i
    ncomp = np.zeros(nperm, dtype=np.int32)
    nunbroken = np.zeros(nperm, dtype=np.int32)
    code = np.zeros(nperm, dtype=np.int64)
    balanced = np.zeros(nperm, dtype=np.bool_)
    alpha = [0] * ndarts
    for r, perm in enumerate(itertools.permutations(range(n))):
        for i in range(n):
            a, b = m_darts[i], md_darts[perm[i]]
            alpha[a] = b
            alpha[b] = a
        parent = list(range(nvert))
        comps = nvert
        for i in range(n):
            ru = _find(parent, vertex_of[m_darts[i]])
            rv = _find(parent, vertex_of[md_darts[perm[i]]])
            if ru != rv:
                parent[ru] = rv
                comps -= 1
        seen = bytearray(ndarts)
        unbroken = 0
        counts = []
        ok = True
        for start in range(ndarts):
            if seen[start]:
                continue
            kinds = []
            d = start
            while not seen[d]:
                seen[d] = 1
                if leaf_kind[d]:
                    kinds.append(leaf_kind[d])
                d = sigma[alpha[d]]
            if not kinds:
                unbroken += 1
                continue
            nj = kinds.count(1)
            if nj * 2 != len(kinds) or any(kinds[t] == kinds[t - 1] for t in range(len(kinds))):
                ok = False
            counts.append(nj)
        c = 0
        for x in sorted(counts):
            c = c * 16 + x
        ncomp[r] = comps
        nunbroken[r] = unbroken
        code[r] = c
        balanced[r] = ok
    return ncomp, nunbroken, code, balanced


def metropolis_sweeps(M, lam, p, steps, normals, uniforms, obs):
    """Metropolis sweeps for the weight exp(-N Tr X - lam N Tr X^p), X = M M^dagger.

    ``M`` has shape (chains, N, N) and is updated in place.  Each sweep visits
    entries row-major; the proposal for chain c at entry (i, j) of sweep s is
    ``steps[c] * (normals[s,c,i,j,0] + 1j*normals[s,c,i,j,1]) / sqrt(2)``,
    accepted when ``uniforms[s,c,i,j] < exp(-dS)``.  After each sweep
    ``obs[s, c, k-1] = Tr(X^k)/N`` for k = 1..obs.shape[2].  Returns the
    number of accepted proposals per chain.
    """
    nchain, n, _ = M.shape
    nsweep = normals.shape[0]
    kmax = obs.shape[2]
    accepts = np.zeros(nchain, dtype=np.int64)
    scale = steps / np.sqrt(2.0)
    for s in range(nsweep):
        X = M @ np.conj(np.swapaxes(M, 1, 2))
        trxp = np.trace(np.linalg.matrix_power(X, p), axis1=1, axis2=2).real
        for i in range(n):
            for j in range(n):
                delta = scale * (normals[s, :, i, j, 0] + 1j * normals[s, :, i, j, 1])
                old = M[:, i, j]
                new = old + delta
                newrow = M[:, i, :].copy()
                newrow[:, j] = new
                xrow = np.einsum("cn,cbn->cb", newrow, np.conj(M))
                xrow[:, i] = np.sum(np.abs(newrow) ** 2, axis=1)
                Xn = X.copy()
                Xn[:, i, :] = xrow
                Xn[:, :, i] = np.conj(xrow)
                Xn[:, i, i] = xrow[:, i]
                trn = np.trace(np.linalg.matrix_power(Xn, p), axis1=1, axis2=2).real
                ds = n * (np.abs(new) ** 2 - np.abs(old) ** 2) + lam * n * (trn - trxp)
                acc = uniforms[s, :, i, j] < np.exp(-ds)
                if acc.any():
                    M[acc, i, :] = newrow[acc]
                    X[acc] = Xn[acc]
                    trxp = np.where(acc, trn, trxp)
                    accepts += acc
        X = M @ np.conj(np.swapaxes(M, 1, 2))
        P = X.copy()
        for k in range(kmax):
            obs[s, :, k] = np.trace(P, axis1=1, axis2=2).real / n
            P = P @ X
    return accepts
