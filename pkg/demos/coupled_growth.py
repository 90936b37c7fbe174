"""
One sample, two trees
=====================

embellish() draws the continuum skeleton and the discrete growth history
from the same randomness: markers dropped on the skeleton's branches replay
the edge-split choices exactly.  So a single draw yields a continuum tree
and a combinatorial tree that are not merely equal in law but glued
together point by point.
"""

import numpy as np

from treelab import RngStream, depth_profile, embellish, marker_count, to_growth_tree
from treelab.embellish import marker_count_scaled, project_to_spanned
from treelab.samplers import alpha_of, scale_c_of
from treelab.skeleton import distance, sample_point

ell, n = 2, 200
e = embellish(ell, n, RngStream(11, 0))
t = to_growth_tree(e)

print(f"one draw at ell={ell}, n={n}:")
print(f"  skeleton: {e.n_branches} branches, total length {e.base.cuts.cuts[-1]:.3f}")
print(f"  markers:  {e.n} (one per growth step)")
print(f"  tree:     {t.n_vertices} vertices, {t.n_leaves} leaves")

# The graph metric between marked points is literally the number of markers
# crossed on the continuum path -- count them both ways.
r = RngStream(11, 1)
a, b = sample_point(e.base, r.spawn(0)), sample_point(e.base, r.spawn(1))
print(f"\ntwo random skeleton points:")
print(f"  continuum distance  {distance(e.base, a, b):.4f}")
print(f"  markers on the path {marker_count(e, a, b)}")
print(f"  rescaled marker count {marker_count_scaled(e, a, b):.4f}")

# Rescaled, the two metrics drift together at rate n^(-alpha): pick pairs
# and look at the worst gap.
scale = scale_c_of(ell) / n ** alpha_of(ell)
gaps = []
for i in range(300):
    a, b = sample_point(e.base, r.spawn(2, i)), sample_point(e.base, r.spawn(3, i))
    gaps.append(abs(distance(e.base, a, b) - marker_count_scaled(e, a, b)))
print(f"\nmax |continuum - rescaled graph| over 300 pairs: {max(gaps):.4f}")
print(f"(one rescaled edge is {scale:.4f})")

# Projection snaps a point to the part of the skeleton the first k branches
# span; projecting twice changes nothing.
p = sample_point(e.base, r.spawn(4))
q = project_to_spanned(e, 2, p)
assert project_to_spanned(e, 2, q) == q
print(f"\nprojection to the 2-branch span: branch {p.branch} -> branch {q.branch}")

# Same-law check against the direct chain: compare first-leaf depths from
# the coupled route and the plain growth chain.
from treelab import grow

d_coupled = [
    depth_profile(to_growth_tree(embellish(ell, 30, RngStream(12, i))))[1]
    for i in range(2000)
]
d_direct = [depth_profile(grow(ell, 30, RngStream(13, i)))[1] for i in range(2000)]
print(f"\nfirst-leaf depth at n=30, 2000 draws per route:")
print(f"  coupled route mean {np.mean(d_coupled):.3f}, direct chain mean {np.mean(d_direct):.3f}")
