"""Urn views of the growing tree.

Branch sizes of the growth chain evolve as a draw-and-duplicate urn in
which a new color immigrates every ell-th step.  That identification makes
some questions exact (small laws enumerate to rationals) and others cheap
(two urn runs replace a whole tree simulation).
"""

from collections import Counter

import numpy as np

from treelab import (
    RngStream,
    enumerate_growth,
    enumerate_urn,
    grow,
    run_classical,
    run_infinite_urn,
    two_stage_sample,
)
from treelab.growth import branch_lengths, spanned_subtree

# --- the exact identification, n small enough to enumerate ----------------

ell, n = 2, 4
law_tree = enumerate_growth(
    ell, n, lambda t: tuple(int(x) for x in branch_lengths(t, t.n_leaves))
)
law_urn = enumerate_urn("infinite", ell, {}, n, lambda state: state)
print(f"branch-size law at ell={ell}, n={n} (exact rationals):")
for outcome, prob in sorted(law_tree.outcomes.items()):
    print(f"  {outcome}: {prob}   urn gives {law_urn.outcomes[outcome]}")
assert law_tree.outcomes == law_urn.outcomes

# --- one urn trajectory --------------------------------------------------

urn = run_infinite_urn(ell=2, n=12, r=RngStream(21, 0))
print(f"\ninfinite urn after 12 steps: counts {urn.counts.tolist()}"
      f" (colors enter at steps 2, 4, ...)")

# --- de Finetti: the classical (1,1) urn is a uniform mixture -------------

r = RngStream(21, 1)
whites = np.array([run_classical(1, 1, 50, r.spawn(i)) for i in range(3000)])
print(f"\nclassical (1,1) urn, 50 draws: white count is uniform on 1..51")
print(f"  sample mean {whites.mean():.2f} (uniform says 26),"
      f" min {whites.min()}, max {whites.max()}")

# --- two urns instead of one tree ----------------------------------------
# (M, U) = (vertices the first k leaves span, branches among them) has the
# same law whether you grow the whole tree or run two small urns.

k, n = 2, 40
r1, r2 = RngStream(21, 2), RngStream(21, 3)
from_tree = Counter()
from_urns = Counter()
for i in range(4000):
    t = grow(2, n, r1.spawn(i))
    m = spanned_subtree(t, k).edge_count
    u = int(branch_lengths(t, k)[k - 1])
    from_tree[(m, u)] += 1
    from_urns[two_stage_sample(2, k, n, r2.spawn(i))] += 1

print(f"\n(M, U) at k={k}, n={n}: top five outcomes, 4000 draws each")
print(f"{'outcome':>10} {'tree':>6} {'urns':>6}")
for outcome, cnt in from_tree.most_common(5):
    print(f"{str(outcome):>10} {cnt:>6} {from_urns[outcome]:>6}")
