"""Uniform-edge-split growth chains with every ell-th step adding a leaf.

The chain starts from a single root-leaf edge.  At step m an edge is chosen
uniformly at random and split by a new internal vertex; whenever ell divides
m the step also hangs a fresh leaf off that new vertex.  Leaves therefore
arrive at a vanishing rate relative to internal growth, and heights scale
like n^alpha with alpha = ell/(ell+1).

Vertex ids are creation-ordered: root 0, first leaf 1, then each step's new
internal vertex (and leaf, on leaf steps) in order.  An edge is identified
with its child endpoint, and a split rewires the old child's parent to the
new vertex, so the old child keeps its edge slot.  Since new edges are
appended in id order, the edge list at any time is exactly ids 1..E in
order — the sampling kernel exploits this and never materializes it.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from numba import njit

from .samplers import RngStream, alpha_of, scale_c_of

__all__ = [
    "Params",
    "GrowthTree",
    "SpannedSubtree",
    "grow",
    "spanned_subtree",
    "branch_lengths",
    "depth_profile",
    "recover_choices",
    "to_csv",
    "from_csv",
    "KIND_ROOT",
    "KIND_INTERNAL",
    "KIND_LEAF",
    "KIND_NAMES",
]

KIND_ROOT = 0
KIND_INTERNAL = 1
KIND_LEAF = 2
KIND_NAMES = ("root", "internal", "leaf")


@dataclass(frozen=True)
class Params:
    """Growth parameters; the exponent and scale constant derive from ell."""

    ell: int

    def __post_init__(self) -> None:
        if self.ell < 1:
            raise ValueError(f"ell must be a positive integer, got {self.ell}")

    @property
    def alpha(self) -> float:
        return alpha_of(self.ell)

    @property
    def scale_c(self) -> float:
        return scale_c_of(self.ell)


@dataclass
class GrowthTree:
    """A grown tree after n steps, stored as flat creation-ordered arrays.

    parent[v] is the vertex id of v's parent (-1 for the root), kind[v] is
    one of KIND_ROOT/KIND_INTERNAL/KIND_LEAF, creation[v] the step at which
    v appeared (0 for the initial root-leaf pair), leaf_ids the leaf vertex
    ids in appearance order, and edges the edge list by child endpoint.
    """

    ell: int
    n: int
    parent: np.ndarray
    kind: np.ndarray
    creation: np.ndarray
    leaf_ids: np.ndarray
    edges: np.ndarray

    @property
    def n_vertices(self) -> int:
        return int(self.parent.size)

    @property
    def n_edges(self) -> int:
        return int(self.edges.size)

    @property
    def n_leaves(self) -> int:
        return int(self.leaf_ids.size)

    def params(self) -> Params:
        return Params(self.ell)


@njit(cache=True)
def _grow_kernel(ell, n, u):
    nv = n + n // ell + 2
    parent = np.full(nv, -1, np.int64)
    kind = np.zeros(nv, np.uint8)
    creation = np.zeros(nv, np.int64)
    leaf_ids = np.empty(n // ell + 1, np.int64)

    parent[1] = 0
    kind[1] = 2  # first leaf
    leaf_ids[0] = 1
    vnext = 2
    nleaf = 1
    ecount = 1
    for m in range(1, n + 1):
        # Edge slot i always holds child id i + 1; see module docstring.
        i = int(u[m - 1] * ecount)
        if i >= ecount:
            i = ecount - 1
        child = i + 1
        v = vnext
        vnext += 1
        parent[v] = parent[child]
        parent[child] = v
        kind[v] = 1
        creation[v] = m
        ecount += 1
        if m % ell == 0:
            w = vnext
            vnext += 1
            parent[w] = v
            kind[w] = 2
            creation[w] = m
            leaf_ids[nleaf] = w
            nleaf += 1
            ecount += 1
    return parent, kind, creation, leaf_ids


def grow(ell: int, n: int, r: RngStream) -> GrowthTree:
    """Run the growth chain for n steps at leaf period ell."""
    if ell < 1:
        raise ValueError(f"ell must be a positive integer, got {ell}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    u = r.uniform(n) if n > 0 else np.empty(0, dtype=np.float64)
    parent, kind, creation, leaf_ids = _grow_kernel(ell, n, u)
    edges = np.arange(1, parent.size, dtype=np.int64)
    return GrowthTree(
        ell=ell,
        n=n,
        parent=parent,
        kind=kind,
        creation=creation,
        leaf_ids=leaf_ids,
        edges=edges,
    )


@njit(cache=True)
def _depths_from_parent(parent):
    nv = parent.shape[0]
    depth = np.full(nv, -1, np.int64)
    depth[0] = 0
    stack = np.empty(nv, np.int64)
    for v0 in range(nv):
        v = v0
        top = 0
        while depth[v] < 0:
            stack[top] = v
            top += 1
            v = parent[v]
        d = depth[v]
        while top > 0:
            top -= 1
            d += 1
            depth[stack[top]] = d
    return depth


def depth_profile(t: GrowthTree) -> np.ndarray:
    """Graph distance from the root for every vertex (one memoized pass)."""
    return _depths_from_parent(t.parent)


@dataclass
class SpannedSubtree:
    """The subtree spanned by the root and the first k leaves.

    mask flags the vertices lying on the union of root-to-leaf paths for
    leaves L_1..L_k; the graph metric is inherited from the host tree.
    """

    tree: GrowthTree
    k: int
    mask: np.ndarray

    @property
    def vertex_ids(self) -> np.ndarray:
        return np.nonzero(self.mask)[0]

    @property
    def n_vertices(self) -> int:
        return int(self.mask.sum())

    @property
    def edge_count(self) -> int:
        """Number of edges of the spanned subtree (M_k of the urn identities)."""
        return self.n_vertices - 1


def spanned_subtree(t: GrowthTree, k: int) -> SpannedSubtree:
    """Mark the union of root-to-leaf paths for the first k leaves."""
    if not 1 <= k <= t.n_leaves:
        raise ValueError(f"k must be in 1..{t.n_leaves}, got {k}")
    mask = np.zeros(t.n_vertices, dtype=bool)
    mask[0] = True
    parent = t.parent
    for leaf in t.leaf_ids[:k]:
        v = int(leaf)
        while not mask[v]:
            mask[v] = True
            v = int(parent[v])
    return SpannedSubtree(tree=t, k=k, mask=mask)


def branch_lengths(t: GrowthTree, k: int) -> np.ndarray:
    """Edge counts of the k branch paths of the spanned subtree.

    Branch 1 runs from the root to L_1; branch i >= 2 runs from the vertex
    that leaf L_i was originally attached to (which stays an ancestor of L_i
    forever, splits only ever insert vertices between) down to L_i.  The
    paths partition the spanned subtree's edges, so the entries sum to its
    edge count.
    """
    if not 1 <= k <= t.n_leaves:
        raise ValueError(f"k must be in 1..{t.n_leaves}, got {k}")
    parent = t.parent
    out = np.zeros(k, dtype=np.int64)
    for i in range(1, k + 1):
        leaf = int(t.leaf_ids[i - 1])
        # The leaf was created together with its original neighbor, which
        # got the preceding id.
        stop = 0 if i == 1 else leaf - 1
        steps = 0
        v = leaf
        while v != stop:
            v = int(parent[v])
            steps += 1
        out[i - 1] = steps
    return out


def recover_choices(t: GrowthTree) -> np.ndarray:
    """Reconstruct the edge choice (child id) made at each step 1..n.

    Splitting an edge replaces one child by another, so every vertex keeps
    at most two children at all times (a chosen-edge slot plus, on leaf
    steps, the hung leaf).  Undoing steps in reverse creation order places
    us in T(m) just before the undo, where the step-m vertex's non-leaf
    child is exactly the edge it split.  Audit utility: lets uniformity of
    the growth choices be tested without instrumenting grow().
    """
    parent = t.parent.copy()
    child_a = np.full(t.n_vertices, -1, dtype=np.int64)
    child_b = np.full(t.n_vertices, -1, dtype=np.int64)
    for v in range(1, t.n_vertices):
        p = parent[v]
        if child_a[p] < 0:
            child_a[p] = v
        else:
            child_b[p] = v
    choices = np.empty(t.n, dtype=np.int64)
    for m in range(t.n, 0, -1):
        vm = m + (m - 1) // t.ell + 1
        a, b = child_a[vm], child_b[vm]
        if m % t.ell == 0:
            # The leaf hung at step m has id vm + 1 and is still attached.
            c = b if a == vm + 1 else a
        else:
            # Exactly one child in T(m); the other slot is -1.
            c = max(a, b)
        choices[m - 1] = c
        q = parent[vm]
        parent[c] = q
        if child_a[q] == vm:
            child_a[q] = c
        else:
            child_b[q] = c
    return choices


def to_csv(t: GrowthTree, extra_comments: list[str] | None = None) -> str:
    """Serialize vertex rows; -1 stands in for 'no parent' / 'not a leaf'."""
    buf = io.StringIO()
    for line in extra_comments or []:
        buf.write(f"# {line}\n")
    buf.write(f"# treelab-growth ell={t.ell} n={t.n}\n")
    buf.write("vertex_id,parent_id,kind,creation_step,leaf_index\n")
    leaf_index = np.full(t.n_vertices, -1, dtype=np.int64)
    leaf_index[t.leaf_ids] = np.arange(1, t.n_leaves + 1)
    for v in range(t.n_vertices):
        buf.write(
            f"{v},{t.parent[v]},{KIND_NAMES[t.kind[v]]},"
            f"{t.creation[v]},{leaf_index[v]}\n"
        )
    return buf.getvalue()


def from_csv(text: str) -> GrowthTree:
    """Parse to_csv output back into a GrowthTree (inverse, field-for-field)."""
    ell = n = None
    rows = []
    header_seen = False
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts and parts[0] == "treelab-growth":
                meta = dict(p.split("=", 1) for p in parts[1:])
                ell = int(meta["ell"])
                n = int(meta["n"])
            continue
        if not header_seen:
            if line != "vertex_id,parent_id,kind,creation_step,leaf_index":
                raise ValueError(f"unexpected CSV header: {line!r}")
            header_seen = True
            continue
        rows.append(line.split(","))
    if ell is None or n is None:
        raise ValueError("missing treelab-growth metadata comment")
    nv = len(rows)
    if nv != n + n // ell + 2:
        raise ValueError(f"row count {nv} inconsistent with ell={ell}, n={n}")
    parent = np.empty(nv, dtype=np.int64)
    kind = np.empty(nv, dtype=np.uint8)
    creation = np.empty(nv, dtype=np.int64)
    leaf_pairs = []
    for row in rows:
        v = int(row[0])
        parent[v] = int(row[1])
        kind[v] = KIND_NAMES.index(row[2])
        creation[v] = int(row[3])
        li = int(row[4])
        if li >= 0:
            leaf_pairs.append((li, v))
    leaf_pairs.sort()
    leaf_ids = np.array([v for _, v in leaf_pairs], dtype=np.int64)
    return GrowthTree(
        ell=ell,
        n=n,
        parent=parent,
        kind=kind,
        creation=creation,
        leaf_ids=leaf_ids,
        edges=np.arange(1, nv, dtype=np.int64),
    )
