"""Store a message in partly used cells and read it back through a noisy sensor."""

import numpy as np

from polarwom import (
    ReadChannel,
    WomSourceModel,
    apply_write,
    build_partition,
    decode,
    encode,
    estimate_profile,
    freeze_bits,
    sample_source_block,
    transmit,
)
from polarwom.harness import simulate, summarize

model = WomSourceModel(0.5, 0.5)
ch = ReadChannel.bsc(0.01)
N = 1024
rng = np.random.default_rng(4)

ps = estimate_profile(model, None, N, 5000, rng=10)
po = estimate_profile(model, ch, N, 5000, rng=11)
part = build_partition(ps, po, 0.999, 0.001)
freeze = freeze_bits(part)
print(f"{len(part.message_set)} message bits in {N} cells (rate {part.design_rate:.3f})")

# One write and read, step by step.
s, _ = sample_source_block(model, N, rng)
message = rng.integers(0, 2, len(part.message_set))
enc = encode(s, part, message, freeze, model, rng)
stored = apply_write(s, enc.codeword)
y = transmit(stored, ch, rng)
decoded = decode(y, part, freeze, model, ch)
print("cells asked to rise from 0:", enc.wom_violations)
print("cells programmed 1 -> 0:", int(((s == 1) & (enc.codeword == 0)).sum()))
print("read errors:", int((y != stored).sum()), " message bit errors:", int((decoded != message).sum()))

# Many trials at once
results = simulate(model, ch, part, freeze, 200, seed=5)
rep = summarize(results, model, ch, part)
print(f"FER {rep.frame_error_rate:.3f} [{rep.fer_ci_low:.3f}, {rep.fer_ci_high:.3f}], "
      f"BER {rep.bit_error_rate:.2e}, write fraction {rep.mean_write_fraction:.3f}")
