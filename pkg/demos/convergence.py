"""
How fast the rescaled tree approaches its limit
===============================================

Two experiments, small versions of the ones the `treelab experiment`
subcommand runs at full size: the height exponent alpha = ell/(ell+1), and
the distortion / measure-discrepancy bounds along a slowly growing
skeleton k(n) = ceil(n^(1/5)).  Writes height_scaling.png next to this
script.
"""

import pathlib
import time
from math import ceil

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from treelab import RngStream, alpha_of, depth_profile, exponent_fit, grow
from treelab.metrics import experiment_row

t0 = time.time()

# --- height exponent -------------------------------------------------------

ell = 2
sizes = [2**p for p in range(9, 18)]
medians = []
r = RngStream(31, 0)
for n in sizes:
    hs = [depth_profile(grow(ell, n, r.spawn(n, i))).max() for i in range(15)]
    medians.append(float(np.median(hs)))
fit = exponent_fit(list(zip(sizes, medians)))
print(f"height exponent at ell={ell}: fitted {fit['slope']:.3f} "
      f"+- {fit['stderr']:.3f}, limit theory says {alpha_of(ell):.3f}")

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.loglog(sizes, medians, "o-", label="median height, 15 trees/size")
ref = medians[0] * (np.array(sizes) / sizes[0]) ** alpha_of(ell)
ax.loglog(sizes, ref, "--", label=f"slope {alpha_of(ell):.3f}")
ax.set_xlabel("n")
ax.set_ylabel("height")
ax.legend()
fig.tight_layout()
out = pathlib.Path(__file__).parent / "height_scaling.png"
fig.savefig(out, dpi=120)
print(f"wrote {out}")

# --- coupling quality along k(n) = n^(1/5) ---------------------------------

print("\ncoupling bounds, 12 replicates per size (medians):")
print(f"{'n':>8} {'k':>3} {'distortion<=':>13} {'discrepancy':>12} {'pendant D':>10}")
for n in (2**11, 2**13, 2**15):
    k = ceil(n ** 0.2)
    eps = k ** (-1 / (ell + 1))
    rows = [
        experiment_row(ell, n, k, eps, i, RngStream(31, 1).spawn(n, i))
        for i in range(12)
    ]
    med = lambda f: float(np.median([row[f] for row in rows]))
    print(f"{n:>8} {k:>3} {med('dis_bound'):>13.3f} "
          f"{med('discrepancy'):>12.4f} {med('D_scaled'):>10.3f}")

print(f"\n({time.time() - t0:.1f}s total)")
