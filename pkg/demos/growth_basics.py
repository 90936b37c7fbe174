"""
Growing trees one edge split at a time
======================================

A tree starts as a single root-leaf edge.  Step m picks a uniform edge,
splits it with a new internal vertex, and every ell-th step also hangs a
fresh leaf off that vertex.  This script grows a few trees and checks the
bookkeeping that everything downstream relies on.
"""

import numpy as np

from treelab import RngStream, depth_profile, grow
from treelab.growth import from_csv, to_csv

r = RngStream(seed=42, stream_id=0)

# A tiny tree first: 5 growth steps at ell=2 means two of the steps
# (m=2 and m=4) added leaves, so 3 leaves total.
t = grow(ell=2, n=5, r=r)
print(f"ell={t.ell}, steps={t.n}")
print(f"vertices: {t.n_vertices}  (= n + n//ell + 2 = {5 + 5 // 2 + 2})")
print(f"leaves:   {t.n_leaves}, ids {t.leaf_ids.tolist()}")
print(f"parents:  {t.parent.tolist()}")

# Depths are one array scan away.
d = depth_profile(t)
print(f"depths:   {d.tolist()}")
print(f"height:   {d.max()}")

# The parent array serializes to CSV and back without loss.
text = to_csv(t)
assert from_csv(text).parent.tolist() == t.parent.tolist()
print(f"\nCSV round trip ok ({len(text.splitlines())} lines)")

# Heights grow like n^alpha with alpha = ell/(ell+1).  Even a handful of
# trees per size shows the exponent clearly on a log-log scale.
print("\nmedian height vs n (ell=2, alpha=2/3):")
print(f"{'n':>8} {'median h':>10} {'h / n^(2/3)':>12}")
for p in range(8, 17, 2):
    n = 2**p
    hs = [depth_profile(grow(2, n, r.spawn(p, i))).max() for i in range(21)]
    med = np.median(hs)
    print(f"{n:>8} {med:>10.0f} {med / n ** (2 / 3):>12.3f}")
