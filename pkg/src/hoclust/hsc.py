"""High-order spectral clustering: spectral factor estimates plus k-means.

The pipeline is: per-mode truncated SVD of the raw unfoldings, one power
iteration step through the other modes' factors, projection of each mode's
rows onto its refined subspace, then a relaxed k-means (k-means++ seeding and
Lloyd refinement, best of several restarts) on the projected rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import top_left_singular_vectors
from .tensor import multi_product, unfold


@dataclass(frozen=True)
class HscConfig:
    """Ranks and k-means knobs for the spectral clustering pipeline."""

    ranks: tuple
    kmeans_restarts: int = 10
    kmeans_max_iters: int = 100
    seed: object = None


def _as_seedseq(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _check_ranks(y: np.ndarray, ranks) -> tuple:
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != y.ndim:
        raise ValueError(f"{len(ranks)} ranks for an order-{y.ndim} tensor")
    for k, (rk, pk) in enumerate(zip(ranks, y.shape)):
        if not 1 <= rk <= pk:
            raise ValueError(f"mode {k}: rank {rk} out of range for extent {pk}")
    return ranks


def hosvd_factors(y, ranks) -> list:
    """Top-r_k left singular vectors of each mode's raw unfolding."""
    y = np.asarray(y, dtype=float)
    ranks = _check_ranks(y, ranks)
    return [top_left_singular_vectors(unfold(y, k), rk) for k, rk in enumerate(ranks)]


def power_step(y, factors, ranks) -> list:
    """One power-iteration refinement of the factors.

    For each mode, project all *other* modes by the given factors and take the
    top-r_k left singular vectors of the resulting unfolding. All projections
    use the input factors (not the refined ones), so the modes are
    independent.
    """
    y = np.asarray(y, dtype=float)
    ranks = _check_ranks(y, ranks)
    out = []
    for k, rk in enumerate(ranks):
        proj = multi_product(
            y, [(factors[l].T, l) for l in range(y.ndim) if l != k]
        )
        out.append(top_left_singular_vectors(unfold(proj, k), rk))
    return out


def projected_rows(y, factors, mode: int) -> np.ndarray:
    """Mode-`mode` rows after projecting the other modes and this mode's subspace.

    Returns the p_k x prod(r_l, l != k) matrix U_k U_k^T M_k(y x_{l!=k} U_l^T)
    whose rows are clustered.
    """
    y = np.asarray(y, dtype=float)
    if not 0 <= mode < y.ndim:
        raise ValueError(f"mode {mode} out of range")
    proj = multi_product(y, [(factors[l].T, l) for l in range(y.ndim) if l != mode])
    rows = unfold(proj, mode)
    u = factors[mode]
    return u @ (u.T @ rows)


def _kmeans_plusplus(rows: np.ndarray, r: int, rng) -> np.ndarray:
    n = rows.shape[0]
    centers = np.empty((r, rows.shape[1]))
    chosen = [int(rng.integers(n))]
    centers[0] = rows[chosen[0]]
    d2 = ((rows - centers[0]) ** 2).sum(axis=1)
    for i in range(1, r):
        total = d2.sum()
        if total <= 0.0:
            # all remaining points coincide with chosen centers; take the
            # lowest unused index for determinism
            used = set(chosen)
            j = next(idx for idx in range(n) if idx not in used)
        else:
            j = int(rng.choice(n, p=d2 / total))
        chosen.append(j)
        centers[i] = rows[j]
        d2 = np.minimum(d2, ((rows - centers[i]) ** 2).sum(axis=1))
    return centers


def _repair_empty(assign: np.ndarray, d2: np.ndarray, r: int) -> np.ndarray:
    # promote the point farthest from its current centroid into each empty
    # cluster, never emptying the donor
    sizes = np.bincount(assign, minlength=r)
    for a in np.flatnonzero(sizes == 0):
        own = d2[np.arange(assign.size), assign]
        order = np.argsort(-own, kind="stable")
        for j in order:
            if sizes[assign[j]] >= 2:
                sizes[assign[j]] -= 1
                assign[j] = a
                sizes[a] += 1
                break
    return assign


def _lloyd(rows: np.ndarray, centers: np.ndarray, max_iters: int):
    n, r = rows.shape[0], centers.shape[0]
    labels = None
    for _ in range(max_iters):
        d2 = ((rows[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1)
        new = d2.argmin(axis=1)
        new = _repair_empty(new, d2, r)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = np.stack([rows[labels == a].mean(axis=0) for a in range(r)])
    cost = float(((rows - centers[labels]) ** 2).sum())
    return labels + 1, centers, cost


def kmeans_cost(rows, z, centers) -> float:
    """Sum of squared distances of each row to its assigned center."""
    rows = np.asarray(rows, dtype=float)
    z = np.asarray(z, dtype=int)
    centers = np.asarray(centers, dtype=float)
    return float(((rows - centers[z - 1]) ** 2).sum())


def relaxed_kmeans(rows, r: int, *, restarts: int = 10, max_iters: int = 100, seed=None):
    """Best-of-`restarts` k-means++ with Lloyd refinement.

    Assignment ties go to the lowest cluster index; an empty cluster receives
    the point farthest from its current centroid. The restart with the lowest
    cost wins, ties to the lowest restart index. Per-restart seeds are derived
    from `seed` by SeedSequence spawning, so results do not depend on
    execution order.

    Returns (labels, centers) with 1-based labels.
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.size == 0:
        raise ValueError("expected a nonempty matrix of rows")
    if not 1 <= r <= rows.shape[0]:
        raise ValueError(f"cluster count {r} out of range for {rows.shape[0]} rows")
    if restarts < 1:
        raise ValueError("need at least one restart")
    children = _as_seedseq(seed).spawn(restarts)
    best = None
    for i in range(restarts):
        rng = np.random.default_rng(children[i])
        centers0 = _kmeans_plusplus(rows, r, rng)
        z, centers, cost = _lloyd(rows, centers0, max_iters)
        if best is None or cost < best[0]:
            best = (cost, z, centers)
    return best[1], best[2]


def hsc(y, config: HscConfig) -> list:
    """Spectral clustering of every mode; returns one label vector per mode."""
    y = np.asarray(y, dtype=float)
    ranks = _check_ranks(y, config.ranks)
    base = hosvd_factors(y, ranks)
    factors = power_step(y, base, ranks)
    mode_seeds = _as_seedseq(config.seed).spawn(y.ndim)
    out = []
    for k, rk in enumerate(ranks):
        rows = projected_rows(y, factors, k)
        z, _ = relaxed_kmeans(
            rows,
            rk,
            restarts=config.kmeans_restarts,
            max_iters=config.kmeans_max_iters,
            seed=mode_seeds[k],
        )
        out.append(z)
    return out
