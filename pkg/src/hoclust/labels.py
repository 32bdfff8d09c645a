"""Cluster labels and partition-comparison metrics.

Labels are integer arrays with entries in 1..r (cluster ids are 1-based; array
positions are 0-based as usual). Two metrics are provided: the
permutation-minimized misclassification rate h, and the clustering error rate
CER = 1 - adjusted Rand index, which needs no label alignment.
"""

from __future__ import annotations

from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

# above this many clusters the exact permutation search is replaced by the
# Hungarian assignment, which gives the same optimum
_BRUTE_FORCE_MAX_R = 8


def validate_labels(z, r: int) -> np.ndarray:
    """Check entries lie in 1..r and return the labels as an int array."""
    z = np.asarray(z, dtype=int)
    if z.ndim != 1 or z.size == 0:
        raise ValueError("labels must be a nonempty 1-d sequence")
    if r < 1:
        raise ValueError(f"cluster count must be >= 1, got {r}")
    if z.min() < 1 or z.max() > r:
        raise ValueError(f"label values must lie in 1..{r}")
    return z


def cluster_sizes(z, r: int) -> np.ndarray:
    """Size of each cluster 1..r (zeros for empty clusters)."""
    z = validate_labels(z, r)
    return np.bincount(z, minlength=r + 1)[1:]


def membership_matrix(z, r: int) -> np.ndarray:
    """Binary p x r matrix M with M[j, z_j - 1] = 1."""
    z = validate_labels(z, r)
    m = np.zeros((z.size, r))
    m[np.arange(z.size), z - 1] = 1.0
    return m


def weighted_membership(z, r: int) -> np.ndarray:
    """Column-normalized membership matrix W = M diag(1/|cluster|).

    Columns sum to one, so W.T applied to data averages over each cluster.
    Raises if any cluster is empty.
    """
    sizes = cluster_sizes(z, r)
    empty = np.flatnonzero(sizes == 0) + 1
    if empty.size:
        raise ValueError(f"empty cluster(s): {empty.tolist()}")
    return membership_matrix(z, r) / sizes


def _contingency(a: np.ndarray, b: np.ndarray, ra: int, rb: int) -> np.ndarray:
    c = np.zeros((ra, rb), dtype=np.int64)
    np.add.at(c, (a - 1, b - 1), 1)
    return c


def misclassification_rate(a, b, r: int | None = None):
    """Minimum fraction of disagreements over cluster relabelings of `b`.

    h(a, b) = (1/p) min_pi sum_j 1{a_j != pi(b_j)} over permutations pi of
    1..r. Exhaustive search for r <= 8, Hungarian assignment beyond that; both
    give the exact optimum.

    Returns
    -------
    (h, pi) : (float, ndarray)
        pi has length r with pi[j-1] the label that b's cluster j is mapped
        to. Ties are broken toward the lexicographically smallest pi in the
        exhaustive regime.
    """
    a = np.asarray(a, dtype=int)
    b = np.asarray(b, dtype=int)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ValueError("labelings must be nonempty 1-d sequences of equal length")
    if r is None:
        r = int(max(a.max(), b.max()))
    a = validate_labels(a, r)
    b = validate_labels(b, r)
    c = _contingency(a, b, r, r)
    p = a.size
    if r <= _BRUTE_FORCE_MAX_R:
        best_agree = -1
        best_pi = None
        for pi in permutations(range(1, r + 1)):
            agree = sum(c[pi[y] - 1, y] for y in range(r))
            if agree > best_agree:
                best_agree = agree
                best_pi = pi
        pi_arr = np.array(best_pi, dtype=int)
        agree = best_agree
    else:
        # maximize sum_y C[pi(y), y]
        cost = -c.T
        rows, cols = linear_sum_assignment(cost)
        pi_arr = np.empty(r, dtype=int)
        pi_arr[rows] = cols + 1
        agree = int(c[pi_arr - 1, np.arange(r)].sum())
    return 1.0 - agree / p, pi_arr


def clustering_error_rate(a, b) -> float:
    """CER = 1 - adjusted Rand index, from the pairs-counting formula.

    Needs no label alignment and tolerates different cluster counts. The
    degenerate case where the ARI denominator vanishes (both partitions
    trivial) is defined as 0.
    """
    a = np.asarray(a, dtype=int)
    b = np.asarray(b, dtype=int)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ValueError("labelings must be nonempty 1-d sequences of equal length")
    ra, rb = int(a.max()), int(b.max())
    a = validate_labels(a, ra)
    b = validate_labels(b, rb)
    n = a.size
    total_pairs = n * (n - 1) / 2.0
    if total_pairs == 0:
        return 0.0
    c = _contingency(a, b, ra, rb).astype(float)
    comb2 = lambda x: x * (x - 1) / 2.0
    index = comb2(c).sum()
    a_pairs = comb2(c.sum(axis=1)).sum()
    b_pairs = comb2(c.sum(axis=0)).sum()
    expected = a_pairs * b_pairs / total_pairs
    denom = 0.5 * (a_pairs + b_pairs) - expected
    if denom == 0.0:
        return 0.0
    ari = (index - expected) / denom
    return 1.0 - ari


def labels_to_csv(z) -> str:
    """One-line CSV of the label values."""
    z = np.asarray(z, dtype=int)
    return ",".join(str(int(v)) for v in z) + "\n"


def labels_from_csv(line: str) -> np.ndarray:
    """Parse a one-line CSV of integers into a label array."""
    parts = [s.strip() for s in line.strip().split(",") if s.strip()]
    if not parts:
        raise ValueError("empty label line")
    try:
        return np.array([int(s) for s in parts], dtype=int)
    except ValueError as exc:
        raise ValueError(f"malformed label line: {line!r}") from exc
