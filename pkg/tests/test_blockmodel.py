import math

import numpy as np
import pytest

from hoclust.blockmodel import (
    BlockModel,
    balance_check,
    balanced_labels,
    bic,
    block_mean_estimate,
    delta_min_sq,
    delta_sq,
    estimate_xhat,
    objective,
    proportion_labels,
    random_core,
    random_instance,
    sample,
    snr,
    synthesize_signal,
)
from hoclust.labels import membership_matrix
from hoclust.tensor import multi_product

RANK_ONE_CORE = np.array([[[1.0, -1.0], [-1.0, 1.0]], [[-1.0, 1.0], [1.0, -1.0]]])


def test_delta_sq_hand_values():
    core = np.array([[0.0, 0.0], [3.0, 4.0]])
    assert delta_sq(core, 0) == pytest.approx(25.0)
    assert delta_sq(core, 1) == pytest.approx(1.0)  # columns (0,3) vs (0,4)
    assert delta_min_sq(core) == pytest.approx(1.0)
    assert snr(core, 2.0) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        snr(core, 0.0)


def test_delta_sq_sixteen_on_every_mode():
    for mode in range(3):
        assert delta_sq(RANK_ONE_CORE, mode) == pytest.approx(16.0)
    assert delta_min_sq(RANK_ONE_CORE) == pytest.approx(16.0)


def test_delta_sq_three_clusters():
    core = np.array([[0.0], [1.0], [10.0]])
    assert delta_sq(core, 0) == pytest.approx(1.0)  # closest pair wins
    with pytest.raises(ValueError):
        delta_sq(np.array([[1.0, 2.0]]), 0)  # single cluster has no separation


def test_block_model_validation():
    core = np.zeros((2, 2))
    BlockModel(core=core, labels=[np.array([1, 2]), np.array([2, 1])])
    with pytest.raises(ValueError, match="empty cluster"):
        BlockModel(core=core, labels=[np.array([1, 1]), np.array([1, 2])])
    with pytest.raises(ValueError):
        BlockModel(core=core, labels=[np.array([1, 2])])
    with pytest.raises(ValueError):
        BlockModel(core=np.zeros(2), labels=[np.array([1, 2])])
    with pytest.raises(ValueError):
        BlockModel(core=core, labels=[np.array([1, 2]), np.array([1, 2])], sigma=-1.0)


def test_block_model_json_round_trip():
    m = random_instance(3, 6, 2, delta_min=1.5, sigma=0.7, seed=21)
    back = BlockModel.from_json(m.to_json())
    np.testing.assert_array_equal(back.core, m.core)
    assert back.sigma == m.sigma
    for za, zb in zip(back.labels, m.labels):
        np.testing.assert_array_equal(za, zb)
    with pytest.raises(ValueError):
        BlockModel.from_json("{}")


def test_synthesize_matches_membership_expansion():
    m = random_instance(3, 7, 2, delta_min=2.0, seed=22)
    x = synthesize_signal(m)
    factors = [(membership_matrix(z, rk), k) for k, (z, rk) in enumerate(zip(m.labels, m.ranks))]
    np.testing.assert_allclose(x, multi_product(m.core, factors), atol=1e-12)
    # spot value: entry (i, j, k) reads the core at the clusters of i, j, k
    z1, z2, z3 = m.labels
    assert x[3, 5, 1] == m.core[z1[3] - 1, z2[5] - 1, z3[1] - 1]


def test_sample_sigma_zero_and_reproducibility():
    m = random_instance(2, 8, 2, delta_min=1.0, sigma=0.0, seed=23)
    y = sample(m, seed=1)
    np.testing.assert_array_equal(y, synthesize_signal(m))
    m2 = random_instance(2, 8, 2, delta_min=1.0, sigma=1.0, seed=23)
    np.testing.assert_array_equal(sample(m2, seed=5), sample(m2, seed=5))
    assert not np.array_equal(sample(m2, seed=5), sample(m2, seed=6))


def test_sample_noise_moments():
    m = random_instance(3, 20, 2, delta_min=1.0, sigma=2.0, seed=24)
    noise = sample(m, seed=25) - synthesize_signal(m)
    n = noise.size
    assert abs(noise.mean()) < 5 * 2.0 / math.sqrt(n)
    assert noise.var() == pytest.approx(4.0, rel=0.08)


def test_balanced_labels():
    assert balanced_labels(7, 3).tolist() == [1, 1, 1, 2, 2, 3, 3]
    assert balanced_labels(6, 3).tolist() == [1, 1, 2, 2, 3, 3]
    assert balanced_labels(3, 3).tolist() == [1, 2, 3]
    with pytest.raises(ValueError):
        balanced_labels(2, 3)


def test_proportion_labels():
    assert proportion_labels(10, 2, 0.3).tolist() == [1, 1, 1] + [2] * 7
    np.testing.assert_array_equal(proportion_labels(10, 2, 0.5), balanced_labels(10, 2))
    z = proportion_labels(9, 3, 1.0 / 3.0)
    assert z.tolist() == [1, 1, 1, 2, 2, 2, 3, 3, 3]
    with pytest.raises(ValueError):
        proportion_labels(10, 2, 0.04)  # rounds to an empty first cluster
    with pytest.raises(ValueError):
        proportion_labels(10, 2, 1.2)


def test_random_core_pins_separation_exactly():
    rng = np.random.default_rng(26)
    core = random_core((3, 2, 4), 1.7, rng)
    assert math.sqrt(delta_min_sq(core)) == pytest.approx(1.7, rel=1e-12)
    with pytest.raises(ValueError):
        random_core((1, 2), 1.0, rng)
    with pytest.raises(ValueError):
        random_core((2, 2), 0.0, rng)


def test_random_instance_gamma_pins_snr():
    m = random_instance(3, 40, 2, gamma=-1.2, sigma=2.0, seed=27)
    assert snr(m.core, 2.0) == pytest.approx(40.0**-1.2, rel=1e-12)
    assert m.dims == (40, 40, 40)
    assert m.ranks == (2, 2, 2)
    for z in m.labels:
        np.testing.assert_array_equal(z, balanced_labels(40, 2))


def test_random_instance_argument_checks():
    with pytest.raises(ValueError):
        random_instance(3, 10, 2, seed=0)  # neither gamma nor delta_min
    with pytest.raises(ValueError):
        random_instance(3, 10, 2, gamma=-1.0, delta_min=1.0, seed=0)  # both
    with pytest.raises(ValueError):
        random_instance(3, 10, 2, gamma=-1.0, sigma=0.0, seed=0)
    with pytest.raises(ValueError):
        random_instance(1, 10, 2, delta_min=1.0, seed=0)
    with pytest.raises(ValueError):
        random_instance(3, 10, (2, 2), delta_min=1.0, seed=0)  # wrong rank count


def test_random_instance_per_mode_ranks_and_imbalance():
    m = random_instance(3, 12, (2, 3, 4), delta_min=1.0, balance=0.5, seed=28)
    assert m.ranks == (2, 3, 4)
    sizes0 = np.bincount(m.labels[0], minlength=3)[1:]
    assert sizes0.tolist() == [6, 6]
    sizes2 = np.bincount(m.labels[2], minlength=5)[1:]
    assert sizes2.tolist() == [6, 2, 2, 2]


def block_means_by_loops(y, labels, ranks):
    out = np.zeros(ranks)
    for cell in np.ndindex(*ranks):
        sel = [np.flatnonzero(np.asarray(z) == c + 1) for z, c in zip(labels, cell)]
        out[cell] = y[np.ix_(*sel)].mean()
    return out


def test_block_mean_estimate_matches_loops():
    rng = np.random.default_rng(29)
    y = rng.standard_normal((6, 5, 7))
    labels = [
        rng.permutation(balanced_labels(6, 2)),
        rng.permutation(balanced_labels(5, 2)),
        rng.permutation(balanced_labels(7, 3)),
    ]
    ranks = (2, 2, 3)
    got = block_mean_estimate(y, labels, ranks)
    np.testing.assert_allclose(got, block_means_by_loops(y, labels, ranks), atol=1e-12)
    # expansion agrees entrywise with indexing the means by the labels
    xhat = estimate_xhat(y, labels, ranks)
    for idx in [(0, 0, 0), (5, 4, 6), (2, 3, 1)]:
        cell = tuple(z[i] - 1 for z, i in zip(labels, idx))
        assert xhat[idx] == got[cell]


def test_block_mean_estimate_empty_cell_warns():
    y = np.ones((2, 2))
    with pytest.warns(RuntimeWarning, match="empty block cell"):
        core = block_mean_estimate(y, [np.array([1, 1]), np.array([1, 2])], (2, 2))
    assert core[0, 0] == 1.0 and core[0, 1] == 1.0
    assert core[1, 0] == 0.0 and core[1, 1] == 0.0


def test_objective_and_optimality_of_block_means():
    rng = np.random.default_rng(30)
    y = rng.standard_normal((8, 6))
    labels = [balanced_labels(8, 2), balanced_labels(6, 3)]
    core = block_mean_estimate(y, labels)
    base = objective(y, core, labels)
    assert base == pytest.approx(float(((y - estimate_xhat(y, labels)) ** 2).sum()))
    for _ in range(5):
        perturbed = core + 0.1 * rng.standard_normal(core.shape)
        assert objective(y, perturbed, labels) > base


def test_bic_hand_value():
    y = np.array([[1.0, 2.0], [3.0, 4.0]])
    labels = [np.array([1, 1]), np.array([1, 1])]
    # single block: mean 2.5, rss = 1.5^2 + 0.5^2 + 0.5^2 + 1.5^2 = 5
    got = bic(y, labels, (1, 1))
    assert got == pytest.approx(4.0 * math.log(5.0) + 1.0 * math.log(4.0))
    with pytest.raises(ValueError, match="zero residual"):
        bic(np.zeros((2, 2)), labels, (1, 1))


def test_bic_prefers_true_ranks_on_strong_signal():
    m = random_instance(2, 24, 2, delta_min=4.0, sigma=0.3, seed=31)
    y = sample(m, seed=32)
    true_bic = bic(y, m.labels, (2, 2))
    merged = [np.ones(24, dtype=int), m.labels[1]]
    assert true_bic < bic(y, merged, (1, 2))


def test_balance_check():
    labels = [np.array([1, 1, 1, 2] * 2 + [2, 2]), balanced_labels(10, 2)]
    sizes = np.bincount(labels[0], minlength=3)[1:]
    assert sizes.tolist() == [6, 4]  # p/r = 5, so bands are [5a, 5b]
    assert balance_check(labels, 0.5, 1.5)
    assert not balance_check(labels, 0.9, 1.5)
    assert not balance_check([np.array([1, 1, 1, 2])], 0.5, 1.4)  # max side fails
    with pytest.raises(ValueError):
        balance_check(labels, 0.0, 1.5)
    with pytest.raises(ValueError):
        balance_check(labels, 0.5, 0.9)
