"""Estimating entropy profiles and picking the index sets F and G."""

import numpy as np

from polarwom import ReadChannel, WomSourceModel, build_partition, estimate_profile, exact_profile

model = WomSourceModel(0.5, 0.5)
ch = ReadChannel.bsc(0.02)

# For tiny blocks the profile can be computed exactly.
print("exact, N=8, state side:      ", np.round(exact_profile(model, None, 8).values, 4))
print("exact, N=8, observation side:", np.round(exact_profile(model, ch, 8).values, 4))

# Larger blocks are estimated by Monte Carlo.  The profiles polarize:
# most entries drift toward 0 or 1 as N grows.
for N in [64, 256, 1024]:
    ps = estimate_profile(model, None, N, 4000, rng=1)
    po = estimate_profile(model, ch, N, 4000, rng=2)
    part = build_partition(ps, po, 0.9, 0.1)
    middle = np.mean((ps.values > 0.1) & (ps.values < 0.9))
    print(f"N={N:5d}: |F|={len(part.F):4d} |G|={len(part.G):4d} message bits={len(part.message_set):4d} "
          f"rate={part.design_rate:.3f} unpolarized={middle:.2%} G outside F={len(part.violations)}")

# Sorted profiles make the polarization visible.
print(np.round(np.sort(ps.values)[:: N // 16], 3))
