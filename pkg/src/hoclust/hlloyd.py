"""High-order Lloyd refinement of per-mode cluster labels.

Each round re-estimates the core by blockwise averaging, then sweeps the
modes in order: aggregate the data over the other modes' current clusters
(averaging shrinks the noise) and reassign each entity to the nearest core
row. Later modes in a round see earlier modes' fresh labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .blockmodel import block_mean_estimate, objective
from .labels import validate_labels, weighted_membership
from .tensor import multi_product, unfold


@dataclass(frozen=True)
class HLloydConfig:
    """Iteration knobs. max_iters=None means ceil(2 ln max(dims)) at call time."""

    max_iters: int | None = None
    early_stop: bool = True


@dataclass
class HLloydTrace:
    """Per-round diagnostics, for inspection only.

    objectives[t] is the blockwise-constant residual evaluated at round t's
    core estimate and end-of-round labels; label_changes[t] counts flipped
    labels per mode; repairs[t] counts empty-cluster repairs.
    """

    objectives: list = field(default_factory=list)
    label_changes: list = field(default_factory=list)
    repairs: list = field(default_factory=list)


def default_rounds(dims) -> int:
    """ceil(2 ln max(dims)): enough rounds for the refinement to settle."""
    return int(math.ceil(2.0 * math.log(max(dims))))


def aggregate_mode(y, labels, mode: int, ranks=None) -> np.ndarray:
    """Average `y` over every mode's clusters except `mode`.

    Returns a tensor whose mode-`mode` extent is unchanged and whose other
    extents are the cluster counts. Raises if another mode has an empty
    cluster.
    """
    y = np.asarray(y, dtype=float)
    if not 0 <= mode < y.ndim:
        raise ValueError(f"mode {mode} out of range")
    if ranks is None:
        ranks = [int(np.asarray(z).max()) for z in labels]
    ws = [
        (weighted_membership(labels[l], ranks[l]).T, l)
        for l in range(y.ndim)
        if l != mode
    ]
    return multi_product(y, ws)


def assign_mode(aggregate, core, mode: int) -> np.ndarray:
    """Nearest-core-row assignment for each entity of `mode` (ties to the lowest id)."""
    aggregate = np.asarray(aggregate, dtype=float)
    core = np.asarray(core, dtype=float)
    rows = unfold(aggregate, mode)
    crows = unfold(core, mode)
    if rows.shape[1] != crows.shape[1]:
        raise ValueError("aggregate and core disagree on the other modes' extents")
    d2 = ((rows[:, None, :] - crows[None, :, :]) ** 2).sum(axis=-1)
    return d2.argmin(axis=1) + 1


def _repair_empty(z: np.ndarray, d2: np.ndarray, rk: int) -> int:
    """Move the worst-fitting entity into each empty cluster; returns move count."""
    moves = 0
    sizes = np.bincount(z, minlength=rk + 1)[1:]
    for a in np.flatnonzero(sizes == 0):
        own = d2[np.arange(z.size), z - 1]
        order = np.argsort(-own, kind="stable")
        for j in order:
            if sizes[z[j] - 1] >= 2:
                sizes[z[j] - 1] -= 1
                z[j] = a + 1
                sizes[a] += 1
                moves += 1
                break
    return moves


def hlloyd(y, init, config: HLloydConfig | None = None, ranks=None):
    """Refine per-mode labels by alternating core and label updates.

    Parameters
    ----------
    y : ndarray
        Observed tensor.
    init : list of label arrays
        One 1-based label vector per mode; every cluster must be nonempty.
    config : HLloydConfig, optional
    ranks : sequence of int, optional
        Cluster counts per mode; defaults to the max label in each vector.

    Returns
    -------
    (labels, trace)
        Refined labels (new arrays; `init` is untouched) and an HLloydTrace.
        Stops early when a full round changes no label.
    """
    y = np.asarray(y, dtype=float)
    config = config or HLloydConfig()
    if len(init) != y.ndim:
        raise ValueError(f"{len(init)} label vectors for an order-{y.ndim} tensor")
    if ranks is None:
        ranks = [int(np.asarray(z).max()) for z in init]
    ranks = [int(r) for r in ranks]
    z = []
    for k, (zk, rk) in enumerate(zip(init, ranks)):
        zk = validate_labels(zk, rk).copy()
        if len(zk) != y.shape[k]:
            raise ValueError(f"mode {k}: {len(zk)} labels for extent {y.shape[k]}")
        if np.unique(zk).size != rk:
            raise ValueError(f"mode {k}: init has empty cluster(s)")
        z.append(zk)
    rounds = config.max_iters if config.max_iters is not None else default_rounds(y.shape)
    if rounds < 1:
        raise ValueError("need at least one round")

    trace = HLloydTrace()
    for _ in range(rounds):
        core = block_mean_estimate(y, z, ranks)
        changes = []
        repairs = 0
        for k in range(y.ndim):
            agg = aggregate_mode(y, z, k, ranks)
            rows = unfold(agg, k)
            crows = unfold(core, k)
            d2 = ((rows[:, None, :] - crows[None, :, :]) ** 2).sum(axis=-1)
            new = d2.argmin(axis=1).astype(int) + 1
            repairs += _repair_empty(new, d2, ranks[k])
            changes.append(int((new != z[k]).sum()))
            z[k] = new
        trace.objectives.append(objective(y, core, z))
        trace.label_changes.append(tuple(changes))
        trace.repairs.append(repairs)
        if config.early_stop and sum(changes) == 0:
            break
    return z, trace
