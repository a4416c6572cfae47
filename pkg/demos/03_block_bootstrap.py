"""
The circular block bootstrap
============================

Blocks of length l start anywhere on the circle, so every observation is
covered equally often on average and the bootstrap ECDF is unbiased for
the sample ECDF.
"""

import numpy as np

from blockquant import (
    BlockLengthSchedule,
    Ecdf,
    GaussianModel,
    ProcessSpec,
    block_length,
    bootstrap_quantile,
    expected_bootstrap_ecdf,
    generate,
    resample,
)

x = np.arange(1.0, 9.0)
bs = resample(x, 3, seed=0)
print("starts", bs.block_starts, "->", bs.values)

# Blocks wrap around the end of the sample.
print("start 6, l=4:", resample(x, 4, starts=[6, 6]).values)

# %%
# E* F*_n(t) = F_n(t) exactly, for any sample, block length and t.
y = generate(ProcessSpec.ar1(GaussianModel(), 0.7), 200, seed=2).values
for t in (-1.0, 0.0, 0.5):
    print(f"t={t:+.1f}  E*F*_n = {expected_bootstrap_ecdf(y, 13, t):.4f}  F_n = {Ecdf(y)(t):.4f}")

# %%
# Block-length schedules. The dyadic one is constant between powers of two.
power, dyadic = BlockLengthSchedule.power(1.0, 0.5), BlockLengthSchedule.dyadic_power(1.0, 0.5)
for n in (100, 1000, 1023, 1024, 4095, 4096):
    print(f"n={n:5d}  power l={block_length(power, n):3d}  dyadic l={block_length(dyadic, n):3d}")

# %%
# Bootstrap distribution of the median for one path.
l = block_length(power, y.size)
meds = np.array([bootstrap_quantile(resample(y, l, seed=s), 0.5) for s in range(500)])
print(f"bootstrap sd of the median: {meds.std():.3f} (l={l})")
