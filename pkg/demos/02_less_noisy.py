"""When does a read channel leave enough room to store data?

The scheme needs I(X;Y) >= I(X;S): the read channel must reveal at least as
much about the written bits as the old cell state already does.
"""

import numpy as np

from polarwom import ReadChannel, WomSourceModel, less_noisy_condition, mutual_info_xs, mutual_info_xy
from polarwom.harness import rate_gap_bound

model = WomSourceModel(beta=0.5, gamma=0.5)
print(f"I(X;S) = {mutual_info_xs(model):.4f} bits")

for p in [0.0, 0.01, 0.02, 0.05, 0.1, 0.2]:
    ch = ReadChannel.bsc(p)
    holds, margin = less_noisy_condition(model, ch)
    print(f"BSC({p:<4}): I(X;Y) = {mutual_info_xy(model, ch):.4f}  margin {margin:+.4f}  "
          f"holds={holds}  rate limit {rate_gap_bound(model, ch):.4f}")

# Sweep the crossover to find where the margin turns negative.
ps = np.linspace(0.0, 0.5, 501)
margins = np.array([less_noisy_condition(model, ReadChannel.bsc(p))[1] for p in ps])
print("margin changes sign near p =", ps[np.argmax(margins < 0)])

# An asymmetric channel: 1 read as 0 more often than the reverse
ch = ReadChannel.bac(0.01, 0.08)
print("BAC(0.01, 0.08) margin:", round(less_noisy_condition(model, ch)[1], 4))
