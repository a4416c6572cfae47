"""
When the block bootstrap fails for quantiles
============================================

With rho = 1 the bootstrap law of the centered median approaches the true
sampling law. With rho = 2 it does not: the bootstrap centers at F_n^{-1}(p)
instead of t_p, and the nonlinear g^{-1} turns that random offset into a
random distortion Z_rho that never goes away.
"""

import numpy as np

from blockquant import BlockLengthSchedule, BootstrapPlan, McConfig, PowerLocalModel, ProcessSpec, z_rho_sampler
from blockquant.experiments import bootstrap_contrast

plan = BootstrapPlan(BlockLengthSchedule.power(1.0, 0.5), 300)
for rho in (1.0, 2.0):
    cfg = McConfig(ProcessSpec.ar1(PowerLocalModel(rho), 0.5), plan, (256, 1024, 4096), 150, base_seed=9)
    print(f"rho={rho:g}")
    for n in cfg.n_grid:
        d = bootstrap_contrast(cfg, n)
        print(f"  n={n:5d}  mean D = {d.mean():.3f}  sd D = {d.std(ddof=1):.3f}")

# %%
# The limiting distortion: identically zero when rho = 1, a spread-out
# random variable when rho = 2.
for rho in (1.0, 2.0):
    z = z_rho_sampler(rho, 0.5, 1.0, count=500, inner_count=2000, seed=1)
    print(f"rho={rho:g}  Z mean={z.mean():.3f} sd={z.std():.3f} quartiles={np.quantile(z, [0.25, 0.5, 0.75]).round(3)}")
