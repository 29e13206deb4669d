"""The polar transform and successive-cancellation posteriors on a tiny block."""

import numpy as np

from polarwom import WomSourceModel, leaf_priors_from_state, polar_transform, sc_posterior

# The transform is its own inverse: applying it twice gives the input back.
x = np.array([1, 0, 1, 1, 0, 0, 1, 0], dtype=np.uint8)
u = polar_transform(x)
print("x      =", x)
print("u = xG =", u)
print("uG     =", polar_transform(u))

# It also works on batches along the last axis.
batch = np.random.default_rng(0).integers(0, 2, size=(3, 8), dtype=np.uint8)
print(polar_transform(batch))

# A 4-cell block with state s.  Cells at 0 are stuck, so x is 0 there;
# the cell at 1 is programmed to 0 with probability gamma.
model = WomSourceModel(beta=0.5, gamma=0.3)
s = np.array([1, 0, 1, 1])
priors = leaf_priors_from_state(model, s)
print("per-cell P(x=0), P(x=1):")
print(priors)

# P(U_i | s, u_1..u_{i-1}) for a couple of prefixes
for prefix in [(), (1,), (1, 0)]:
    p0, p1 = sc_posterior(priors, prefix)
    i = len(prefix) + 1
    print(f"prefix {prefix}: P(U_{i}=0) = {p0:.4f}, P(U_{i}=1) = {p1:.4f}")
