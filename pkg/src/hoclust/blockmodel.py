"""Tensor block model: synthesis, sampling, separation, estimation, BIC.

A block model is a core tensor of block means, one label vector per mode, and
a noise level. The observed tensor is the blockwise-constant expansion of the
core plus iid Gaussian noise. Sampling uses numpy's seeded Generator
(PCG64 counter-based stream, ziggurat normal sampling), so identical seeds
give bit-identical draws.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .labels import membership_matrix, validate_labels
from .tensor import mode_product, unfold


@dataclass(frozen=True)
class BlockModel:
    """Core tensor, per-mode labels (1-based), and noise standard deviation."""

    core: np.ndarray
    labels: list
    sigma: float = 1.0

    def __post_init__(self):
        core = np.asarray(self.core, dtype=float)
        if core.ndim < 2:
            raise ValueError("core must have order >= 2")
        if not np.all(np.isfinite(core)):
            raise ValueError("core has non-finite entries")
        if len(self.labels) != core.ndim:
            raise ValueError(
                f"{len(self.labels)} label vectors for an order-{core.ndim} core"
            )
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        labels = []
        for k, z in enumerate(self.labels):
            z = validate_labels(z, core.shape[k])
            present = np.unique(z)
            if present.size != core.shape[k]:
                missing = sorted(set(range(1, core.shape[k] + 1)) - set(present))
                raise ValueError(f"mode {k}: empty cluster(s) {missing}")
            labels.append(z)
        object.__setattr__(self, "core", core)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "sigma", float(self.sigma))

    @property
    def dims(self) -> tuple:
        return tuple(len(z) for z in self.labels)

    @property
    def ranks(self) -> tuple:
        return tuple(self.core.shape)

    def to_json(self) -> str:
        payload = {
            "dims": list(self.dims),
            "ranks": list(self.ranks),
            "sigma": self.sigma,
            "core": self.core.ravel(order="C").tolist(),
            "labels": [z.tolist() for z in self.labels],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "BlockModel":
        try:
            payload = json.loads(text)
            ranks = tuple(int(r) for r in payload["ranks"])
            core = np.array(payload["core"], dtype=float).reshape(ranks)
            labels = [np.array(z, dtype=int) for z in payload["labels"]]
            sigma = float(payload["sigma"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed block model JSON: {exc}") from exc
        model = cls(core=core, labels=labels, sigma=sigma)
        if model.dims != tuple(payload.get("dims", model.dims)):
            raise ValueError("dims field disagrees with label lengths")
        return model


def delta_sq(core, mode: int) -> float:
    """Squared minimum separation of mode-`mode` core rows.

    min over distinct cluster pairs of the squared distance between the
    corresponding rows of the mode-`mode` matricization of the core.
    """
    core = np.asarray(core, dtype=float)
    rows = unfold(core, mode)
    r = rows.shape[0]
    if r < 2:
        raise ValueError(f"mode {mode} needs at least 2 clusters for a separation")
    diffs = rows[:, None, :] - rows[None, :, :]
    d2 = (diffs**2).sum(axis=-1)
    iu = np.triu_indices(r, k=1)
    return float(d2[iu].min())


def delta_min_sq(core) -> float:
    """Minimum of delta_sq over all modes."""
    core = np.asarray(core, dtype=float)
    return min(delta_sq(core, k) for k in range(core.ndim))


def snr(core, sigma: float) -> float:
    """Signal-to-noise ratio delta_min_sq / sigma^2."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0 for an SNR")
    return delta_min_sq(core) / sigma**2


def synthesize_signal(model: BlockModel) -> np.ndarray:
    """Blockwise-constant expansion X[j1..jd] = core[z1[j1], ..., zd[jd]]."""
    return model.core[np.ix_(*[z - 1 for z in model.labels])]


def sample(model: BlockModel, seed=None) -> np.ndarray:
    """Signal plus iid N(0, sigma^2) noise, from the seeded generator."""
    x = synthesize_signal(model)
    if model.sigma == 0:
        return x.copy()
    rng = np.random.default_rng(seed)
    return x + model.sigma * rng.standard_normal(x.shape)


def balanced_labels(p: int, r: int) -> np.ndarray:
    """Contiguous near-equal blocks: cluster a gets p//r entities (+1 for a <= p%r)."""
    if p < r:
        raise ValueError(f"cannot place {r} nonempty clusters among {p} entities")
    sizes = [p // r + (1 if a < p % r else 0) for a in range(r)]
    return np.repeat(np.arange(1, r + 1), sizes)


def proportion_labels(p: int, r: int, xi: float) -> np.ndarray:
    """Cluster 1 holds round(xi*p) entities; the rest split near-equally."""
    if not 0.0 < xi < 1.0:
        raise ValueError("xi must lie in (0, 1)")
    n1 = int(round(xi * p))
    if n1 < 1 or p - n1 < r - 1:
        raise ValueError(f"xi={xi} leaves an empty cluster for p={p}, r={r}")
    if r == 1:
        return np.ones(p, dtype=int)
    rest = balanced_labels(p - n1, r - 1) + 1
    return np.concatenate([np.ones(n1, dtype=int), rest])


def random_core(ranks, delta_min: float, rng) -> np.ndarray:
    """Iid standard normal core rescaled so the minimum separation is exactly `delta_min`.

    `delta_min` is the unsquared separation: after rescaling,
    sqrt(delta_min_sq(core)) == delta_min to floating-point accuracy.
    """
    ranks = tuple(int(r) for r in ranks)
    if any(r < 2 for r in ranks):
        raise ValueError("every mode needs at least 2 clusters")
    if delta_min <= 0:
        raise ValueError("delta_min must be > 0")
    for _ in range(100):
        core = rng.standard_normal(ranks)
        measured = delta_min_sq(core)
        if measured >= 1e-8:
            return core * (delta_min / math.sqrt(measured))
    raise RuntimeError("could not draw a core with nonzero separation")


def random_instance(
    d: int,
    p: int,
    r,
    *,
    gamma: float | None = None,
    delta_min: float | None = None,
    sigma: float = 1.0,
    balance: float | None = None,
    seed=None,
) -> BlockModel:
    """Random block model with a pinned separation.

    Exactly one of `gamma` and `delta_min` must be given. With `gamma`, the
    core is rescaled so snr(core, sigma) == p**gamma exactly (requires
    sigma > 0). With `delta_min`, the unsquared minimum separation is pinned
    directly. `balance=None` gives near-equal contiguous clusters; a float xi
    in (0, 1) makes cluster 1 hold round(xi*p) entities per mode.

    `r` may be an int (same rank every mode) or a length-d sequence.
    """
    if (gamma is None) == (delta_min is None):
        raise ValueError("give exactly one of gamma and delta_min")
    if d < 2:
        raise ValueError("order must be >= 2")
    ranks = tuple([int(r)] * d) if np.isscalar(r) else tuple(int(v) for v in r)
    if len(ranks) != d:
        raise ValueError(f"expected {d} ranks, got {len(ranks)}")
    if gamma is not None:
        if sigma <= 0:
            raise ValueError("sigma must be > 0 when targeting an SNR exponent")
        delta_min = sigma * p ** (gamma / 2.0)
    rng = np.random.default_rng(seed)
    core = random_core(ranks, delta_min, rng)
    if balance is None:
        labels = [balanced_labels(p, rk) for rk in ranks]
    else:
        labels = [proportion_labels(p, rk, balance) for rk in ranks]
    return BlockModel(core=core, labels=labels, sigma=sigma)


def _block_sums_counts(y: np.ndarray, labels, ranks):
    sums = y
    counts_1d = []
    for k, (z, rk) in enumerate(zip(labels, ranks)):
        m = membership_matrix(z, rk)
        sums = mode_product(sums, m.T, k)
        counts_1d.append(m.sum(axis=0))
    counts = counts_1d[0]
    for c in counts_1d[1:]:
        counts = np.multiply.outer(counts, c)
    return sums, counts


def _resolve_ranks(labels, ranks):
    if ranks is None:
        return tuple(int(np.asarray(z).max()) for z in labels)
    return tuple(int(r) for r in ranks)


def block_mean_estimate(y, labels, ranks=None) -> np.ndarray:
    """Blockwise average of `y` under the given per-mode labels.

    Cells whose index combination has no entities (possible only when some
    cluster is empty) are set to 0 and flagged with a warning.
    """
    y = np.asarray(y, dtype=float)
    ranks = _resolve_ranks(labels, ranks)
    if len(labels) != y.ndim:
        raise ValueError(f"{len(labels)} label vectors for an order-{y.ndim} tensor")
    sums, counts = _block_sums_counts(y, labels, ranks)
    if (counts == 0).any():
        warnings.warn(
            "empty block cell(s): estimates set to 0 there", RuntimeWarning, stacklevel=2
        )
        return np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
    return sums / counts


def estimate_xhat(y, labels, ranks=None) -> np.ndarray:
    """Blockwise-constant fit: block means expanded back to the data's shape."""
    y = np.asarray(y, dtype=float)
    ranks = _resolve_ranks(labels, ranks)
    core = block_mean_estimate(y, labels, ranks)
    idx = [validate_labels(z, rk) - 1 for z, rk in zip(labels, ranks)]
    return core[np.ix_(*idx)]


def objective(y, core, labels) -> float:
    """Sum of squared residuals of `y` against the blockwise-constant model."""
    y = np.asarray(y, dtype=float)
    core = np.asarray(core, dtype=float)
    idx = [validate_labels(z, rk) - 1 for z, rk in zip(labels, core.shape)]
    fit = core[np.ix_(*idx)]
    return float(((y - fit) ** 2).sum())


def bic(y, labels, ranks=None) -> float:
    """Bayesian information criterion for a given clustering.

    p_* log(residual sum of squares) + (r_* + sum_k p_k log r_k) log p_*,
    natural logs, where p_* and r_* are the products of the extents and of the
    cluster counts. Raises if the residual is exactly zero.
    """
    y = np.asarray(y, dtype=float)
    ranks = _resolve_ranks(labels, ranks)
    xhat = estimate_xhat(y, labels, ranks)
    rss = float(((y - xhat) ** 2).sum())
    if rss <= 0.0:
        raise ValueError("zero residual: BIC undefined (model interpolates the data)")
    p_star = y.size
    r_star = int(np.prod(ranks))
    penalty = r_star + sum(pk * math.log(rk) for pk, rk in zip(y.shape, ranks))
    return p_star * math.log(rss) + penalty * math.log(p_star)


def balance_check(labels, alpha: float, beta: float, ranks=None) -> bool:
    """True when every cluster size lies within [alpha*p/r, beta*p/r] for its mode."""
    if not 0 < alpha <= 1 <= beta:
        raise ValueError("need 0 < alpha <= 1 <= beta")
    ranks = _resolve_ranks(labels, ranks)
    for z, rk in zip(labels, ranks):
        z = validate_labels(z, rk)
        p = z.size
        sizes = np.bincount(z, minlength=rk + 1)[1:]
        if sizes.min() < alpha * p / rk or sizes.max() > beta * p / rk:
            return False
    return True
