"""Small dense linear algebra: cyclic Jacobi eigensolver and spectral norms.

The matrices met here are Gram blocks of a handful of columns, so a plain
cyclic Jacobi sweep is accurate and fast enough, and it gives the condition
oracles a code path that does not share LAPACK with the batched enumerations
in :mod:`dantzig_lab.conditions`.
"""

from __future__ import annotations

import numpy as np

from .errors import NotSymmetricError

SYMMETRY_TOL = 1e-10
JACOBI_TOL = 1e-12
MAX_SWEEPS = 100


def _jacobi(a, want_vectors):
    a = np.array(a, dtype=float, copy=True)
    k = a.shape[0]
    v = np.eye(k) if want_vectors else None
    scale = np.linalg.norm(a)
    if k < 2 or scale == 0.0:
        return a, v
    for _ in range(MAX_SWEEPS):
        off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= JACOBI_TOL * scale:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # symmetric Schur decomposition of the (p, q) 2x2 block
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau == 0.0:
                    t = 1.0
                elif abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                if want_vectors:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
    return a, v


def sym_eigs(matrix, vectors=False):
    """Eigenvalues of a symmetric matrix in ascending order.

    Parameters
    ----------
    matrix : array_like, shape (k, k)
        Symmetric within ``1e-10`` (relative to its largest entry).
    vectors : bool
        Also return the orthonormal eigenvectors as columns of ``Q`` so that
        ``A = Q diag(w) Q.T``.

    Raises
    ------
    NotSymmetricError
        If the input is not square or not symmetric.
    """
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetricError(f"expected a square matrix, got shape {a.shape}")
    amax = np.max(np.abs(a)) if a.size else 0.0
    if a.size and np.max(np.abs(a - a.T)) > SYMMETRY_TOL * max(amax, 1.0):
        raise NotSymmetricError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    d, v = _jacobi(a, vectors)
    w = np.diag(d).copy()
    order = np.argsort(w, kind="stable")
    if vectors:
        return w[order], v[:, order]
    return w[order]


def max_singular_value(matrix):
    """Largest singular value, computed as sqrt of the top eigenvalue of M^T M."""
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    if m.size == 0:
        return 0.0
    # use the smaller of the two Gram products
    g = m.T @ m if m.shape[1] <= m.shape[0] else m @ m.T
    top = sym_eigs(g)[-1]
    return float(np.sqrt(max(top, 0.0)))
