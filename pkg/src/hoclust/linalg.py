"""Truncated left singular subspaces via Gram-matrix eigendecomposition.

The Gram matrix of the smaller side is formed explicitly and passed to a
symmetric eigensolver; this is accurate and fast for the short-and-wide
unfoldings used throughout. Sign and completion conventions are fixed so
results are deterministic functions of the input.
"""

from __future__ import annotations

import numpy as np

_EPS = float(np.finfo(float).eps)


def _check_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise ValueError("expected a nonempty matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _fix_sign(u: np.ndarray) -> np.ndarray:
    # largest-magnitude entry made positive, ties broken by lowest index
    j = int(np.argmax(np.abs(u)))
    return -u if u[j] < 0 else u


def _complete_canonical(cols: list[np.ndarray], p: int, r: int) -> list[np.ndarray]:
    # Gram-Schmidt against canonical vectors e_0, e_1, ... in index order
    for i in range(p):
        if len(cols) == r:
            break
        v = np.zeros(p)
        v[i] = 1.0
        for c in cols:
            v -= (c @ v) * c
        for c in cols:  # second pass for numerical stability
            v -= (c @ v) * c
        norm = np.linalg.norm(v)
        if norm > 1e-10:
            cols.append(_fix_sign(v / norm))
    if len(cols) < r:
        raise ValueError(f"cannot complete {len(cols)} columns to rank {r}")
    return cols


def singular_values(m) -> np.ndarray:
    """All singular values of `m`, descending, computed from the smaller Gram matrix."""
    m = _check_matrix(m)
    p, q = m.shape
    g = m @ m.T if p <= q else m.T @ m
    w = np.linalg.eigvalsh(g)[::-1]
    return np.sqrt(np.clip(w, 0.0, None))


def top_left_singular_vectors(m, r: int) -> np.ndarray:
    """Orthonormal basis for the top-`r` left singular subspace of `m`.

    Deterministic: each column's largest-magnitude entry is made positive
    (ties to the lowest index). If the numerical rank falls short of `r`, the
    basis is completed by Gram-Schmidt against canonical vectors in index
    order; callers must not rely on those trailing columns beyond
    orthonormality.

    Parameters
    ----------
    m : ndarray, shape (p, q)
    r : int
        Number of columns, 1 <= r <= min(p, q).

    Returns
    -------
    ndarray of shape (p, r) with orthonormal columns.
    """
    m = _check_matrix(m)
    p, q = m.shape
    if not 1 <= r <= min(p, q):
        raise ValueError(f"rank {r} out of range for {p}x{q} matrix")
    if p <= q:
        evals, evecs = np.linalg.eigh(m @ m.T)
        evals, evecs = evals[::-1], evecs[:, ::-1]
        sigmas = np.sqrt(np.clip(evals, 0.0, None))
        tol = max(p, q) * _EPS * sigmas[0]
        k = min(int(np.count_nonzero(sigmas > tol)), r)
        block = evecs[:, :k]
    else:
        evals, evecs = np.linalg.eigh(m.T @ m)
        evals, evecs = evals[::-1], evecs[:, ::-1]
        sigmas = np.sqrt(np.clip(evals, 0.0, None))
        tol = max(p, q) * _EPS * sigmas[0]
        k = min(int(np.count_nonzero(sigmas > tol)), r)
        if k > 0:
            # map right singular vectors through m, re-orthonormalize
            b = m @ evecs[:, :k]
            qmat, rmat = np.linalg.qr(b)
            signs = np.sign(np.diag(rmat))
            signs[signs == 0] = 1.0
            block = qmat * signs
        else:
            block = np.zeros((p, 0))
    cols = [_fix_sign(block[:, i].copy()) for i in range(k)]
    if k < r:
        cols = _complete_canonical(cols, p, r)
    return np.column_stack(cols)
