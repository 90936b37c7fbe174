"""Line-breaking construction of the limit tree.

Break [0, infinity) at the points C_1 < C_2 < ... where C_k^(ell+1) is a
unit-rate Poisson arrival time.  Segment k glues to a uniform point on the
tree built so far; the result after K segments is the K-branch skeleton of
the continuum limit.
"""

import numpy as np
import scipy.stats as sps

from treelab import RngStream, build_skeleton, sample_cuts, sample_point
from treelab.skeleton import distance

r = RngStream(7, 0)

# The cut law: C_k^(ell+1) is Gamma(k, 1).  Check the first two moments.
ell, k = 2, 5
draws = np.array(
    [sample_cuts(ell, k, r.spawn(i)).cuts[-1] ** (ell + 1) for i in range(4000)]
)
print(f"C_{k}^{ell + 1}: sample mean {draws.mean():.3f} (Gamma says {k}), "
      f"var {draws.var():.3f} (Gamma says {k})")
ks = sps.kstest(draws, sps.gamma(a=k).cdf)
print(f"KS against Gamma({k},1): D={ks.statistic:.4f}")

# Build one skeleton and poke at it.
sk = build_skeleton(ell=2, K=6, r=RngStream(7, 1))
print(f"\n6-branch skeleton, total length {sk.cuts.cuts[-1]:.3f}")
print(f"cut points: {np.array2string(np.asarray(sk.cuts.cuts), precision=3)}")
print(f"branch j glues to branch: {sk.attach_branch.tolist()}")

# Distances between uniformly sampled points satisfy the triangle
# inequality (they'd better -- it's a tree metric).
pts = [sample_point(sk, r.spawn(100 + i)) for i in range(3)]
d01 = distance(sk, pts[0], pts[1])
d12 = distance(sk, pts[1], pts[2])
d02 = distance(sk, pts[0], pts[2])
print(f"\nthree random points: d01={d01:.3f} d12={d12:.3f} d02={d02:.3f}")
assert d02 <= d01 + d12 + 1e-12
print("triangle inequality holds")
