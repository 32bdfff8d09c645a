"""Reference estimators: HOOI, factor k-means, contaminated-truth oracle, exact MLE.

These serve as comparison points for the main spectral + Lloyd pipeline: a
low-rank (not blockwise) alternating projection fit, clustering of the raw
spectral factors, Lloyd refinement started from a corrupted copy of the truth,
and an exhaustive least-squares search over all labelings for tiny problems.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .blockmodel import _block_sums_counts
from .hlloyd import HLloydConfig, hlloyd
from .hsc import hosvd_factors, relaxed_kmeans, _as_seedseq, _check_ranks
from .labels import validate_labels
from .linalg import top_left_singular_vectors
from .tensor import frobenius, multi_product, unfold

_MLE_MAX_ASSIGNMENTS = 10_000_000


@dataclass(frozen=True)
class OracleConfig:
    """Contamination fraction and seed for the oracle initialization."""

    contamination: float = 0.2
    seed: object = None


def contaminate_labels(z, fraction: float, r: int, rng) -> np.ndarray:
    """Resample floor(fraction*p) distinct positions uniformly from 1..r.

    Collisions with the original label are allowed, so the realized
    contamination is at most floor(fraction*p) per mode.
    """
    z = validate_labels(z, r).copy()
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    m = int(math.floor(fraction * z.size))
    if m == 0:
        return z
    idx = rng.choice(z.size, size=m, replace=False)
    z[idx] = rng.integers(1, r + 1, size=m)
    return z


def oracle_estimate(
    y,
    truth,
    config: OracleConfig | None = None,
    hlloyd_config: HLloydConfig | None = None,
    ranks=None,
) -> list:
    """Lloyd refinement started from a contaminated copy of the true labels."""
    y = np.asarray(y, dtype=float)
    config = config or OracleConfig()
    if ranks is None:
        ranks = [int(np.asarray(z).max()) for z in truth]
    rng = np.random.default_rng(config.seed)
    init = [
        contaminate_labels(z, config.contamination, rk, rng)
        for z, rk in zip(truth, ranks)
    ]
    labels, _ = hlloyd(y, init, hlloyd_config, ranks=ranks)
    return labels


def hooi_estimate(y, ranks, iters: int = 10, tol: float = 1e-8) -> np.ndarray:
    """Low-multilinear-rank fit by alternating per-mode projections.

    Starts from the raw spectral factors and sweeps the modes, each time
    taking the top singular subspace of the tensor projected through the other
    modes' current factors. Stops after `iters` sweeps or when every projector
    moves less than `tol` in Frobenius norm. Returns the projected tensor.
    """
    y = np.asarray(y, dtype=float)
    ranks = _check_ranks(y, ranks)
    if iters < 0:
        raise ValueError("iters must be >= 0")
    factors = hosvd_factors(y, ranks)
    d = y.ndim
    for _ in range(iters):
        moved = 0.0
        for k in range(d):
            proj = multi_product(y, [(factors[l].T, l) for l in range(d) if l != k])
            new = top_left_singular_vectors(unfold(proj, k), ranks[k])
            moved = max(
                moved, frobenius(new @ new.T - factors[k] @ factors[k].T)
            )
            factors[k] = new
        if moved < tol:
            break
    core = multi_product(y, [(f.T, k) for k, f in enumerate(factors)])
    return multi_product(core, [(f, k) for k, f in enumerate(factors)])


def hosvd_cluster(
    y, ranks, *, restarts: int = 10, max_iters: int = 100, seed=None
) -> list:
    """k-means on the rows of each mode's raw spectral factor."""
    y = np.asarray(y, dtype=float)
    ranks = _check_ranks(y, ranks)
    factors = hosvd_factors(y, ranks)
    mode_seeds = _as_seedseq(seed).spawn(y.ndim)
    out = []
    for k, rk in enumerate(ranks):
        z, _ = relaxed_kmeans(
            factors[k], rk, restarts=restarts, max_iters=max_iters, seed=mode_seeds[k]
        )
        out.append(z)
    return out


def brute_force_mle(y, ranks):
    """Exact least-squares clustering by enumerating every labeling.

    Guarded to prod_k r_k**p_k <= 1e7 assignments. Ties are broken toward the
    lexicographically smallest concatenated labeling. Returns
    (labels, core, objective).
    """
    y = np.asarray(y, dtype=float)
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != y.ndim:
        raise ValueError(f"{len(ranks)} ranks for an order-{y.ndim} tensor")
    log_count = sum(p * math.log(r) for p, r in zip(y.shape, ranks))
    if log_count > math.log(_MLE_MAX_ASSIGNMENTS):
        raise ValueError("label space too large for exhaustive search")
    per_mode = [
        list(itertools.product(range(1, r + 1), repeat=p))
        for p, r in zip(y.shape, ranks)
    ]
    best_obj = math.inf
    best = None
    for combo in itertools.product(*per_mode):
        zs = [np.array(c, dtype=int) for c in combo]
        sums, counts = _block_sums_counts(y, zs, ranks)
        core = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
        fit = core[np.ix_(*[z - 1 for z in zs])]
        obj = float(((y - fit) ** 2).sum())
        if obj < best_obj:
            best_obj = obj
            best = (zs, core)
    return best[0], best[1], best_obj
