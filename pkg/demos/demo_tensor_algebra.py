"""Walk through the tensor primitives: unfolding, folding, mode products.

Shows that the mode-k unfolding of a multilinear product equals the matrix
product with the Kronecker chain of the remaining factors, which is the
identity every spectral step in the package relies on.
"""

from functools import reduce

import numpy as np

from hoclust import fold, kron, mode_product, multi_product, unfold

rng = np.random.default_rng(7)

# a small order-3 tensor with distinct extents so axis mistakes cannot hide
s = rng.standard_normal((2, 3, 4))

# unfolding puts the chosen mode on the rows; folding inverts it exactly
for k in range(3):
    mat = unfold(s, k)
    assert mat.shape == (s.shape[k], s.size // s.shape[k])
    assert np.array_equal(fold(mat, k, s.shape), s)
print("unfold/fold round trips on every mode")

# a mode product contracts one axis with a matrix
u0 = rng.standard_normal((5, 2))
x = mode_product(s, u0, 0)
assert x.shape == (5, 3, 4)
assert np.allclose(unfold(x, 0), u0 @ unfold(s, 0))
print("mode product matches the matrix product on the unfolding")

# multilinear product in every mode at once
u1 = rng.standard_normal((6, 3))
u2 = rng.standard_normal((7, 4))
x = multi_product(s, [(u0, 0), (u1, 1), (u2, 2)])
assert x.shape == (5, 6, 7)

# the Kronecker identity: unfold(s x1 u0 x2 u1 x3 u2, k)
#   = u_k @ unfold(s, k) @ (u_{k+1} kron ... kron u_{k-1}).T
factors = [u0, u1, u2]
for k in range(3):
    chain = reduce(kron, [factors[(k + i) % 3] for i in range(1, 3)])
    rhs = factors[k] @ unfold(s, k) @ chain.T
    err = np.abs(unfold(x, k) - rhs).max()
    assert err < 1e-12
    print(f"mode {k}: Kronecker identity holds, max deviation {err:.1e}")

print("done")
