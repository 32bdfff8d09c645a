"""Pick the number of clusters per mode with the BIC-style criterion.

The criterion is p_total * log(rss / p_total) plus a log-volume penalty on
the number of block parameters. Underfitting inflates the residual,
overfitting pays the penalty, and the planted ranks sit at the minimum.
"""

import itertools

import numpy as np

from hoclust import HscConfig, bic, hlloyd, hsc, random_instance, sample

model = random_instance(3, 40, 2, delta_min=2.5, sigma=1.0, seed=311)
y = sample(model, seed=312)
print("planted ranks:", model.ranks)

# candidate grid around the planted value, fit by the full pipeline
scores = {}
for idx, combo in enumerate(itertools.product((2, 3), repeat=3)):
    init = hsc(y, HscConfig(ranks=combo, seed=np.random.SeedSequence((313, idx))))
    labels, _ = hlloyd(y, init, ranks=combo)
    scores[combo] = bic(y, labels, combo)

# the all-in-one-block fit needs no clustering step at all
ones = [np.ones(40, dtype=int) for _ in range(3)]
scores[(1, 1, 1)] = bic(y, ones, (1, 1, 1))

print("\nranks      bic")
for combo in sorted(scores):
    marker = " <- planted" if combo == model.ranks else ""
    print(f"{combo}  {scores[combo]:.1f}{marker}")

best = min(scores, key=scores.get)
print("\nselected:", best)
assert best == model.ranks, "criterion should land on the planted ranks"

# underfitting is penalized through the residual, overfitting via parameters
assert scores[(1, 1, 1)] > scores[best]
assert scores[(3, 3, 3)] > scores[best]
print("both misfit directions score worse than the planted ranks")

print("done")
