"""Marker-decorated line-breaking trees coupled to the growth chain.

Running the growth chain and the line-breaking construction on shared
randomness: step m of the chain drops a marker uniformly (by length) on the
first 1 + floor((m-1)/ell) branches, and on every ell-th step the marker
doubles as the gluing vertex where the next branch attaches.  Reading off
the markers as graph vertices reproduces the growth chain's law exactly,
while forgetting them leaves the line-breaking tree — one object carrying
both metrics.

A variant schedule (build_x_coupling) grows the same trees around a tracked
uniform point: each stage either glues the next branch at the tracked point
(with the stick-breaking probability) and re-draws the point inside the new
branch, or glues at a fresh uniform vertex and keeps the point.  The
tracked point's graph distance to spanned subtrees then telescopes into a
sum of rounded uniforms, which is the identity the pendant-distance tests
exercise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .growth import GrowthTree
from .samplers import CutSequence, RngStream, sample_cuts, scale_c_of, alpha_of
from .skeleton import (
    Skeleton,
    TreePoint,
    _fmt,
    from_json as skel_from_json,
    to_json as skel_to_json,
)

__all__ = [
    "EmbellishedTree",
    "XCoupling",
    "embellish",
    "to_growth_tree",
    "marker_count",
    "marker_count_scaled",
    "count_in_interval",
    "edge_lengths",
    "branch_edge_counts",
    "project_to_spanned",
    "build_x_coupling",
    "pendant_distance_sample",
    "to_json",
    "from_json",
]


def _vertex_id_of_step(ell: int, m: int) -> int:
    """Creation-ordered vertex id of the step-m marker (root=0, first leaf=1)."""
    return m + (m - 1) // ell + 1


@dataclass
class EmbellishedTree:
    """A line-breaking skeleton plus the growth chain's marker vertices.

    Markers are stored twice: per step (branch_of_step / offset_of_step,
    1-based step index) and in CSR form sorted by (branch, offset)
    (branch_ptr, m_offsets, m_vids, m_steps).  glue_vids[b-1] is the vertex
    id of the marker where branch b attaches (-1 for branch 1); leaf_vids
    holds the leaf vertex ids in branch order.
    """

    base: Skeleton
    n: int
    branch_of_step: np.ndarray
    offset_of_step: np.ndarray
    glue_vids: np.ndarray
    branch_ptr: np.ndarray = field(init=False)
    m_offsets: np.ndarray = field(init=False)
    m_vids: np.ndarray = field(init=False)
    m_steps: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        ell = self.ell
        n = self.n
        K = self.base.n_branches
        steps = np.arange(1, n + 1, dtype=np.int64)
        vids = steps + (steps - 1) // ell + 1
        order = np.lexsort((self.offset_of_step[1:], self.branch_of_step[1:]))
        sorted_branch = self.branch_of_step[1:][order]
        self.m_offsets = self.offset_of_step[1:][order]
        self.m_vids = vids[order]
        self.m_steps = steps[order]
        self.branch_ptr = np.searchsorted(
            sorted_branch, np.arange(1, K + 2), side="left"
        ).astype(np.int64)
        # branch_ptr[b-1]:branch_ptr[b] slices branch b's markers.

    @property
    def ell(self) -> int:
        return self.base.ell

    @property
    def n_branches(self) -> int:
        return self.base.n_branches

    @property
    def n_vertices(self) -> int:
        return self.n + self.n // self.ell + 2

    @property
    def leaf_vids(self) -> np.ndarray:
        out = np.empty(self.n_branches, dtype=np.int64)
        out[0] = 1
        out[1:] = self.glue_vids[1:] + 1
        return out

    def branch_markers(self, b: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(offsets, vertex ids, steps) of branch b's markers, offset-sorted."""
        lo, hi = self.branch_ptr[b - 1], self.branch_ptr[b]
        return self.m_offsets[lo:hi], self.m_vids[lo:hi], self.m_steps[lo:hi]

    def marker_position(self, step: int) -> TreePoint:
        return TreePoint(
            int(self.branch_of_step[step]), float(self.offset_of_step[step])
        )

    def is_vertex_at(self, p: TreePoint) -> bool:
        """Whether a canonical point coincides with a vertex (root/leaf/marker)."""
        b, x = p.branch, p.offset
        if b == 1 and x == 0.0:
            return True
        if x == self.base.lengths[b - 1]:
            return True
        offs, _, _ = self.branch_markers(b)
        i = int(np.searchsorted(offs, x, side="left"))
        return i < offs.size and offs[i] == x


def embellish(
    ell: int, n: int, r: RngStream, cuts: CutSequence | None = None
) -> EmbellishedTree:
    """Drop n uniform markers stage by stage and glue branches at the
    every-ell-th ones.

    The step-m marker is uniform by length over the first 1 + (m-1)//ell
    branches; when ell | m it becomes the gluing vertex of the next branch.
    Passing cuts pins the skeleton's branch lengths (used by tests that
    condition on the continuum tree and replay only the markers).
    """
    if ell < 1 or n < 0:
        raise ValueError(f"need ell >= 1 and n >= 0, got ({ell}, {n})")
    K = n // ell + 1
    if cuts is None:
        cuts = sample_cuts(ell, K, r)
    elif len(cuts) != K:
        raise ValueError(f"cuts has {len(cuts)} entries, expected {K}")
    carr = cuts.cuts

    branch_of_step = np.zeros(n + 1, dtype=np.int64)
    offset_of_step = np.zeros(n + 1, dtype=np.float64)
    attach_branch = np.full(K, -1, dtype=np.int64)
    attach_offset = np.zeros(K, dtype=np.float64)
    glue_vids = np.full(K, -1, dtype=np.int64)

    if n > 0:
        u = r.uniform(n)
        stage = np.arange(n, dtype=np.int64) // ell  # 0-based cut index per step
        pos = u * carr[stage]
        bidx = np.searchsorted(carr, pos, side="right")
        base = np.where(bidx > 0, carr[np.maximum(bidx - 1, 0)], 0.0)
        branch_of_step[1:] = bidx + 1
        offset_of_step[1:] = pos - base
        # A marker exactly on a cut boundary (probability zero) sits at
        # offset 0 of a later branch; remap it to its canonical home on the
        # parent so that every stored coordinate is canonical.  Remaps and
        # glue records must interleave in step order: a step's canonical
        # home lives on a branch glued at an earlier step.
        boundary = set(
            (np.nonzero((offset_of_step[1:] == 0.0) & (branch_of_step[1:] > 1))[0] + 1)
            .tolist()
        )
        for s in sorted(boundary.union(range(ell, n + 1, ell))):
            if s in boundary:
                b = int(branch_of_step[s])
                branch_of_step[s] = attach_branch[b - 1]
                offset_of_step[s] = attach_offset[b - 1]
            if s % ell == 0:
                j = s // ell
                attach_branch[j] = branch_of_step[s]
                attach_offset[j] = offset_of_step[s]
                glue_vids[j] = _vertex_id_of_step(ell, s)

    base_skel = Skeleton(
        cuts=cuts, attach_branch=attach_branch, attach_offset=attach_offset
    )
    return EmbellishedTree(
        base=base_skel,
        n=n,
        branch_of_step=branch_of_step,
        offset_of_step=offset_of_step,
        glue_vids=glue_vids,
    )


def to_growth_tree(e: EmbellishedTree) -> GrowthTree:
    """Forget the metric: read the markers off as a discrete tree.

    Each branch contributes a parent chain glue vertex -> markers in offset
    order -> leaf.  The result uses the same vertex id and array conventions
    as growth.grow, so the two are comparable sample by sample.
    """
    ell, n, K = e.ell, e.n, e.n_branches
    nv = e.n_vertices
    parent = np.full(nv, -1, dtype=np.int64)
    kind = np.ones(nv, dtype=np.int8)
    creation = np.zeros(nv, dtype=np.int64)
    kind[0] = 0
    leaf_vids = e.leaf_vids
    kind[leaf_vids] = 2
    creation[e.m_vids] = e.m_steps
    creation[leaf_vids[1:]] = np.arange(1, K, dtype=np.int64) * ell
    for b in range(1, K + 1):
        _, vids, _ = e.branch_markers(b)
        head = 0 if b == 1 else int(e.glue_vids[b - 1])
        for v in vids:
            parent[v] = head
            head = int(v)
        parent[leaf_vids[b - 1]] = head
    return GrowthTree(
        ell=ell,
        n=n,
        parent=parent,
        kind=kind,
        creation=creation,
        leaf_ids=leaf_vids.copy(),
        edges=np.arange(1, nv, dtype=np.int64),
    )


def count_in_interval(
    e: EmbellishedTree, branch: int, lo: float, hi: float, closed_end: bool = False
) -> int:
    """Vertices whose canonical position lies in [lo, hi) of a branch.

    closed_end widens the right end to include hi itself — used for the last
    cell of a branch so the leaf is covered.  The root (offset 0 of branch 1)
    counts; junction vertices count on their canonical parent branch only.
    """
    offs, _, _ = e.branch_markers(branch)
    side = "right" if closed_end else "left"
    c = int(np.searchsorted(offs, hi, side=side) - np.searchsorted(offs, lo, side="left"))
    if branch == 1 and lo <= 0.0 < hi:
        c += 1
    blen = e.base.lengths[branch - 1]
    if lo <= blen and (blen < hi or (closed_end and blen == hi)):
        c += 1
    return c


def marker_count(e: EmbellishedTree, a: TreePoint, b: TreePoint) -> int:
    """Vertices on the half-open real-tree path [a, b).

    Decomposes the path into branch segments with the same two-pointer walk
    as the metric distance; each closed segment's vertices come from
    count_in_interval plus junction bookkeeping, and the count of the closed
    walk drops by one when b itself is a vertex.
    """
    e.base.validate_point(a)
    e.base.validate_point(b)
    ca, cb = e.base.canonical(a), e.base.canonical(b)
    if ca == cb:
        return 0
    ab_, ao = e.base.attach_branch, e.base.attach_offset
    ba, xa = ca.branch, ca.offset
    bb, xb = cb.branch, cb.offset
    total = 0
    # Walk both endpoints down to a common branch, counting the closed
    # segment [0, x] each pop crosses; junctions are vertices and get
    # counted exactly once via closed_end on the popped branch's [0, x].
    while ba != bb:
        if ba > bb:
            total += count_in_interval(e, ba, 0.0, xa, closed_end=True)
            xa = ao[ba - 1]
            ba = int(ab_[ba - 1])
        else:
            total += count_in_interval(e, bb, 0.0, xb, closed_end=True)
            xb = ao[bb - 1]
            bb = int(ab_[bb - 1])
    lo, hi = min(xa, xb), max(xa, xb)
    total += count_in_interval(e, ba, lo, hi, closed_end=True)
    # total now counts every vertex on the closed path [a, b]; the segment
    # endpoints at a and b themselves were only counted if they are
    # vertices.  Half-open means b must not count.
    if e.is_vertex_at(cb):
        total -= 1
    return total


def marker_count_scaled(e: EmbellishedTree, a: TreePoint, b: TreePoint) -> float:
    """marker_count times c / n**alpha — the rescaled graph metric."""
    ell = e.ell
    return marker_count(e, a, b) * scale_c_of(ell) / float(e.n) ** alpha_of(ell)


def edge_lengths(e: EmbellishedTree) -> np.ndarray:
    """All real-tree edge lengths: per-branch gaps between consecutive
    vertices, branch by branch.  Sums to the total length; exchangeable and
    jointly flat-Dirichlet after normalizing."""
    out: list[np.ndarray] = []
    for b in range(1, e.n_branches + 1):
        offs, _, _ = e.branch_markers(b)
        blen = e.base.lengths[b - 1]
        out.append(np.diff(offs, prepend=0.0, append=blen))
    return np.concatenate(out)


def branch_edge_counts(e: EmbellishedTree) -> np.ndarray:
    """Edges of each branch's vertex chain (markers on the branch plus one)."""
    return np.diff(e.branch_ptr) + 1


def project_to_spanned(e: EmbellishedTree, k: int, p: TreePoint) -> TreePoint:
    """Nearest point of the first-k-branches subtree to p (canonical)."""
    if not 1 <= k <= e.n_branches:
        raise ValueError(f"k={k} out of range 1..{e.n_branches}")
    c = e.base.canonical(p)
    b, x = c.branch, c.offset
    while b > k:
        x = e.base.attach_offset[b - 1]
        b = int(e.base.attach_branch[b - 1])
    return TreePoint(b, float(x))


@dataclass
class XCoupling:
    """Variant growth around a tracked point X°.

    Stage k+1 glues branch k+1 at X°_k with probability ΔC_{k+1}/C_{k+1}
    (case a, tag 1; X° then re-drawn uniformly inside the new branch) and at
    a fresh uniform vertex otherwise (case b, tag 0; X° kept).  Either way
    the stage finishes with ell-1 markers uniform over the enlarged tree.
    x_points[j] is X°_j (x_points[0] the root); x_vids[j] the id of the
    marker sitting there; ws/vs the driving uniforms (index 0 unused);
    cases[j] tags stage j (stages 0 and 1 carry -1)."""

    tree: EmbellishedTree
    x_points: list[TreePoint]
    x_vids: np.ndarray
    ws: np.ndarray
    vs: np.ndarray
    cases: np.ndarray

    @property
    def n_stages(self) -> int:
        return self.tree.n_branches

    @property
    def ell(self) -> int:
        return self.tree.ell


def build_x_coupling(
    ell: int, m: int, r: RngStream, cuts: CutSequence | None = None
) -> XCoupling:
    """Run m stages of the tracked-point construction (m*ell markers)."""
    if ell < 1 or m < 1:
        raise ValueError(f"need ell >= 1 and m >= 1, got ({ell}, {m})")
    if cuts is None:
        cuts = sample_cuts(ell, m, r)
    elif len(cuts) != m:
        raise ValueError(f"cuts has {len(cuts)} entries, expected {m}")
    carr = cuts.cuts
    n = m * ell

    branch_of_step = np.zeros(n + 1, dtype=np.int64)
    offset_of_step = np.zeros(n + 1, dtype=np.float64)
    attach_branch = np.full(m, -1, dtype=np.int64)
    attach_offset = np.zeros(m, dtype=np.float64)
    glue_vids = np.full(m, -1, dtype=np.int64)
    ws = np.full(m + 1, np.nan)
    vs = np.full(m + 1, np.nan)
    cases = np.full(m + 1, -1, dtype=np.int8)
    x_points = [TreePoint(1, 0.0)]
    x_vids = np.zeros(m + 1, dtype=np.int64)

    def place(step: int, gpos: float) -> None:
        # Global arc-length coordinate -> canonical (branch, offset).
        idx = int(np.searchsorted(carr, gpos, side="right"))
        b = idx + 1
        off = gpos - (carr[idx - 1] if idx > 0 else 0.0)
        if off == 0.0 and b > 1:
            b, off = int(attach_branch[b - 1]), float(attach_offset[b - 1])
        branch_of_step[step] = b
        offset_of_step[step] = off

    step = 0
    ws[1], vs[1] = r.uniform(), r.uniform()  # W_1 plays no role; drawn for symmetry
    for _ in range(ell - 1):
        step += 1
        place(step, r.uniform() * carr[0])
    step += 1
    branch_of_step[step] = 1
    offset_of_step[step] = vs[1] * carr[0]
    x_points.append(TreePoint(1, float(offset_of_step[step])))
    x_vids[1] = _vertex_id_of_step(ell, step)

    for k in range(2, m + 1):
        w, v = r.uniform(), r.uniform()
        ws[k], vs[k] = w, v
        dc = carr[k - 1] - carr[k - 2]
        if w <= dc / carr[k - 1]:
            cases[k] = 1
            xp = x_points[-1]
            attach_branch[k - 1] = xp.branch
            attach_offset[k - 1] = xp.offset
            glue_vids[k - 1] = x_vids[k - 1]
            step += 1
            off = v * dc
            while off == 0.0:  # keep the new point clear of the junction
                off = r.uniform() * dc
            branch_of_step[step] = k
            offset_of_step[step] = off
            x_points.append(TreePoint(k, float(off)))
            x_vids[k] = _vertex_id_of_step(ell, step)
        else:
            cases[k] = 0
            step += 1
            place(step, r.uniform() * carr[k - 2])
            attach_branch[k - 1] = branch_of_step[step]
            attach_offset[k - 1] = offset_of_step[step]
            glue_vids[k - 1] = _vertex_id_of_step(ell, step)
            x_points.append(x_points[-1])
            x_vids[k] = x_vids[k - 1]
        for _ in range(ell - 1):
            step += 1
            place(step, r.uniform() * carr[k - 1])

    base = Skeleton(cuts=cuts, attach_branch=attach_branch, attach_offset=attach_offset)
    tree = EmbellishedTree(
        base=base,
        n=n,
        branch_of_step=branch_of_step,
        offset_of_step=offset_of_step,
        glue_vids=glue_vids,
    )
    return XCoupling(
        tree=tree, x_points=x_points, x_vids=x_vids, ws=ws, vs=vs, cases=cases
    )


def pendant_distance_sample(x: XCoupling, k: int) -> int:
    """The telescoped graph distance from X° to the first-k-branches subtree.

    On each stage i > k that glued at the tracked point, the geodesic gains
    the segment from the new tracked position back to the junction: given
    the branch's final edge count U_i, that segment carries 1 + Binomial(U_i
    - 2, V_i) vertices, whose V-integrated law is uniform on {1..U_i-1} —
    i.e. ceil(V_i*(U_i-1)).  Summing over those stages reproduces the graph
    distance exactly; the sum is zero precisely when the point never left
    the first k branches.
    """
    m = x.n_stages
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= {m}, got k={k}")
    if k == m:
        return 0
    counts = branch_edge_counts(x.tree)
    total = 0
    for i in range(k + 1, m + 1):
        if x.cases[i] == 1:
            total += int(np.ceil(x.vs[i] * (counts[i - 1] - 1)))
    return total


def to_json(e: EmbellishedTree) -> str:
    """Skeleton JSON extended with n and the marker table
    [[branch, offset, vertex_id, step], ...] (offsets as 17-digit strings)."""
    doc = json.loads(skel_to_json(e.base))
    doc["n"] = e.n
    doc["markers"] = [
        [int(b), _fmt(o), int(v), int(s)]
        for b, o, v, s in zip(
            np.repeat(
                np.arange(1, e.n_branches + 1), np.diff(e.branch_ptr)
            ),
            e.m_offsets,
            e.m_vids,
            e.m_steps,
        )
    ]
    return json.dumps(doc, sort_keys=True)


def from_json(text: str) -> EmbellishedTree:
    """Parse to_json output back into an equal tree (bit-exact reals)."""
    base = skel_from_json(text)
    doc = json.loads(text)
    n = int(doc["n"])
    markers = doc["markers"]
    if len(markers) != n:
        raise ValueError(f"marker table has {len(markers)} rows, expected n={n}")
    branch_of_step = np.zeros(n + 1, dtype=np.int64)
    offset_of_step = np.zeros(n + 1, dtype=np.float64)
    seen = np.zeros(n + 1, dtype=bool)
    for row in markers:
        b, off, vid, s = int(row[0]), float(row[1]), int(row[2]), int(row[3])
        if not 1 <= s <= n or seen[s]:
            raise ValueError(f"bad or repeated step {s} in marker table")
        if vid != _vertex_id_of_step(base.ell, s):
            raise ValueError(f"vertex id {vid} inconsistent with step {s}")
        seen[s] = True
        branch_of_step[s] = b
        offset_of_step[s] = off
    glue_vids = np.full(base.n_branches, -1, dtype=np.int64)
    for j in range(1, base.n_branches):
        offs_b = branch_of_step[1:] == base.attach_branch[j]
        hit = np.nonzero(
            offs_b & (offset_of_step[1:] == base.attach_offset[j])
        )[0]
        if hit.size == 0:
            raise ValueError(f"branch {j + 1} attach point is not a marker")
        glue_vids[j] = _vertex_id_of_step(base.ell, int(hit[0]) + 1)
    return EmbellishedTree(
        base=base,
        n=n,
        branch_of_step=branch_of_step,
        offset_of_step=offset_of_step,
        glue_vids=glue_vids,
    )
