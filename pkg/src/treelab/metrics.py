"""Metric-measure comparisons between the discrete and continuum trees.

The two views of the same grown tree — vertices under the rescaled graph
metric, the skeleton under its length metric — are compared through explicit
correspondences and couplings: cell covers along the branches give
computable distortion and discrepancy bounds, pendant statistics measure
what the spanned subtree misses, and a brute-force solver certifies the
bounds on spaces small enough to enumerate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from numba import njit
from scipy.optimize import linprog

from .embellish import (
    EmbellishedTree,
    count_in_interval,
    embellish,
    marker_count,
    to_growth_tree,
)
from .growth import GrowthTree, spanned_subtree
from .samplers import RngStream, alpha_of, scale_c_of
from .skeleton import TreePoint, distance as skel_distance

__all__ = [
    "Correspondence",
    "CellCover",
    "ProjectedMeasure",
    "distortion_exact",
    "distortion_cover_bound",
    "cover_tree",
    "cover_report",
    "discrepancy",
    "ghp_upper_bound",
    "ghp_exact",
    "pendant_stats",
    "joint_profile_batch",
    "project_measure",
    "uniform_measure",
    "pendant_cover",
    "prokhorov_bound",
    "experiment_row",
    "EXPERIMENT_FIELDS",
]

_ALL_PAIRS_GUARD = 20_000


@dataclass(frozen=True)
class Correspondence:
    """A relation between two finite id sets covering both sides."""

    pairs: tuple[tuple[int, int], ...]
    left_size: int
    right_size: int

    def __post_init__(self) -> None:
        if len(self.pairs) > _ALL_PAIRS_GUARD:
            raise ValueError(
                f"{len(self.pairs)} pairs exceed the all-pairs guard "
                f"({_ALL_PAIRS_GUARD})"
            )
        left = {p[0] for p in self.pairs}
        right = {p[1] for p in self.pairs}
        if left != set(range(self.left_size)):
            raise ValueError("correspondence does not cover the left side")
        if right != set(range(self.right_size)):
            raise ValueError("correspondence does not cover the right side")


def distortion_exact(
    c: Correspondence,
    dl: Callable[[int, int], float],
    dr: Callable[[int, int], float],
) -> float:
    """max over pairs of pairs of |d_left - d_right| (all-pairs, guarded)."""
    worst = 0.0
    ps = c.pairs
    for a in range(len(ps)):
        xa, ya = ps[a]
        for b in range(a, len(ps)):
            xb, yb = ps[b]
            gap = abs(dl(xa, xb) - dr(ya, yb))
            if gap > worst:
                worst = gap
    return worst


# ---------------------------------------------------------------------------
# Cell covers of the skeleton spanned by the first k branches


@dataclass
class CellCover:
    """Disjoint interval cells covering branches 1..k of a skeleton.

    Each branch is cut root-outward at accumulated length eps, so every cell
    is a subinterval of one branch with length at most eps, the last cell of
    each branch closed at the leaf end.  rep[i] is the point of cell i
    closest to the root (its inner endpoint; for the first cell of branch 1
    that is the root itself).  vertex_idx[i] indexes the spanned-vertex
    table rows lying in cell i; counts[i] is the same number obtained
    independently by interval counting.
    """

    eps: float
    k: int
    branch: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    closed: np.ndarray
    reps: list[TreePoint]
    rep_droot: np.ndarray
    vertex_idx: list[np.ndarray]
    counts: np.ndarray
    table_vids: np.ndarray
    table_branch: np.ndarray
    table_offset: np.ndarray

    def __post_init__(self) -> None:
        length = self.hi - self.lo
        if length.size and length.max() > self.eps * (1 + 1e-12):
            raise ValueError("cell longer than eps")
        for i, idx in enumerate(self.vertex_idx):
            if idx.size != self.counts[i]:
                raise ValueError(
                    f"cell {i}: table membership ({idx.size}) and interval "
                    f"count ({self.counts[i]}) disagree"
                )

    @property
    def n_cells(self) -> int:
        return int(self.branch.size)

    @property
    def lengths(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def n_table_vertices(self) -> int:
        return int(self.table_vids.size)


def _branch_start_depths(e: EmbellishedTree, k: int) -> np.ndarray:
    """Length distance from the root to the start of branches 1..k (1-indexed)."""
    d = np.zeros(k + 1, dtype=np.float64)
    ab, ao = e.base.attach_branch, e.base.attach_offset
    for b in range(2, k + 1):
        d[b] = d[int(ab[b - 1])] + float(ao[b - 1])
    return d


def cover_tree(e: EmbellishedTree, k: int, eps: float) -> CellCover:
    """Cut branches 1..k into interval cells of length at most eps."""
    if not 1 <= k <= e.n_branches:
        raise ValueError(f"k must be in 1..{e.n_branches}, got {k}")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    lens = e.base.lengths

    t_vids: list[np.ndarray] = []
    t_branch: list[np.ndarray] = []
    t_off: list[np.ndarray] = []
    for b in range(1, k + 1):
        offs, vids, _ = e.branch_markers(b)
        if b == 1:
            offs = np.concatenate(([0.0], offs, [lens[0]]))
            vids = np.concatenate(([0], vids, [e.leaf_vids[0]]))
        else:
            offs = np.concatenate((offs, [lens[b - 1]]))
            vids = np.concatenate((vids, [e.leaf_vids[b - 1]]))
        t_off.append(offs)
        t_vids.append(vids)
        t_branch.append(np.full(offs.size, b, dtype=np.int64))
    table_off = np.concatenate(t_off)
    table_vids = np.concatenate(t_vids)
    table_branch = np.concatenate(t_branch)

    dstart = _branch_start_depths(e, k)
    cb: list[int] = []
    clo: list[float] = []
    chi: list[float] = []
    cclosed: list[bool] = []
    for b in range(1, k + 1):
        blen = float(lens[b - 1])
        nseg = max(1, int(np.ceil(blen / eps - 1e-12)))
        for j in range(nseg):
            lo = j * eps
            hi = min((j + 1) * eps, blen)
            last = j == nseg - 1
            if last:
                hi = blen
            cb.append(b)
            clo.append(lo)
            chi.append(hi)
            cclosed.append(last)

    branch = np.asarray(cb, dtype=np.int64)
    lo = np.asarray(clo, dtype=np.float64)
    hi = np.asarray(chi, dtype=np.float64)
    closed = np.asarray(cclosed, dtype=bool)

    reps = [TreePoint(int(b), float(x)) for b, x in zip(branch, lo)]
    rep_droot = dstart[branch] + lo

    vertex_idx: list[np.ndarray] = []
    counts = np.empty(branch.size, dtype=np.int64)
    for i in range(branch.size):
        b, a, z, cl = int(branch[i]), float(lo[i]), float(hi[i]), bool(closed[i])
        inb = table_branch == b
        upper = table_off <= z if cl else table_off < z
        vertex_idx.append(np.nonzero(inb & (table_off >= a) & upper)[0])
        counts[i] = count_in_interval(e, b, a, z, closed_end=cl)

    return CellCover(
        eps=eps,
        k=k,
        branch=branch,
        lo=lo,
        hi=hi,
        closed=closed,
        reps=reps,
        rep_droot=rep_droot,
        vertex_idx=vertex_idx,
        counts=counts,
        table_vids=table_vids,
        table_branch=table_branch,
        table_offset=table_off,
    )


def cover_report(
    e: EmbellishedTree, k: int, eps: float, cov: CellCover | None = None
) -> dict:
    """Distortion bound components for the cell-cover correspondence.

    The correspondence pairs every point of cell i with every tree vertex
    lying in cell i.  Writing M^(S) for the rescaled vertex count of a point
    set S and w_i for cell i's inner endpoint, the distortion is at most

        max_{i<=j} |M^([w_i,w_j)) - d(w_i,w_j)|  +  2 max_i |M^(A_i) - |A_i||
                                                 +  2 eps

    (pair term, cell deviation term, cell length term).  A coarser but
    self-contained variant replaces the last two terms by twice the largest
    rescaled cell count plus twice the largest cell length, bounding the
    detour through the cells directly; both are reported.
    """
    if cov is None:
        cov = cover_tree(e, k, eps)
    scale = scale_c_of(e.ell) / e.n ** alpha_of(e.ell)
    m_cells = cov.counts * scale
    lens = cov.lengths
    dev = float(np.abs(m_cells - lens).max())
    pair = 0.0
    reps = cov.reps
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            mc = marker_count(e, reps[i], reps[j]) * scale
            dl = skel_distance(e.base, reps[i], reps[j])
            gap = abs(mc - dl)
            if gap > pair:
                pair = gap
    bound = pair + 2.0 * dev + 2.0 * eps
    conservative = pair + 2.0 * float(m_cells.max()) + 2.0 * float(lens.max())
    return {
        "pair_term": pair,
        "cell_deviation": dev,
        "max_cell_count_scaled": float(m_cells.max()),
        "max_cell_length": float(lens.max()),
        "n_cells": cov.n_cells,
        "bound": bound,
        "bound_conservative": conservative,
    }


def distortion_cover_bound(
    e: EmbellishedTree, k: int, eps: float, cov: CellCover | None = None
) -> float:
    """Distortion upper bound from the eps-cell cover (see cover_report)."""
    return float(cover_report(e, k, eps, cov)["bound"])


# ---------------------------------------------------------------------------
# Measure comparison on a cover


def cell_vertex_masses(cov: CellCover, nu: "Mapping[int, float] | ProjectedMeasure") -> np.ndarray:
    """Mass that nu puts on the vertices of each cell."""
    if isinstance(nu, ProjectedMeasure):
        lookup = nu.as_dict()
    else:
        lookup = nu
    out = np.zeros(cov.n_cells, dtype=np.float64)
    for i, idx in enumerate(cov.vertex_idx):
        out[i] = sum(lookup.get(int(v), 0.0) for v in cov.table_vids[idx])
    return out


def discrepancy(
    cov: CellCover,
    nu: "Mapping[int, float] | ProjectedMeasure",
    mu_cell_masses: Sequence[float] | np.ndarray,
) -> float:
    """Sum over cells of |nu(vertices of cell) - mu(cell)|."""
    mu = np.asarray(mu_cell_masses, dtype=np.float64)
    if mu.shape != (cov.n_cells,):
        raise ValueError(
            f"expected {cov.n_cells} cell masses, got shape {mu.shape}"
        )
    return float(np.abs(cell_vertex_masses(cov, nu) - mu).sum())


def ghp_upper_bound(dis_half: float, disc: float, escaped_mass: float) -> float:
    """Combine half-distortion, discrepancy and escaped mass into one bound."""
    for name, v in (("dis_half", dis_half), ("disc", disc), ("escaped_mass", escaped_mass)):
        if v < 0:
            raise ValueError(f"{name} must be nonnegative, got {v}")
    return max(dis_half, disc, escaped_mass)


_GHP_EXACT_GUARD = 16


def _coupling_lp(mu: np.ndarray, nu: np.ndarray, off_rel: np.ndarray) -> float:
    """min over nonnegative pi of max(marginal defect of pi, pi outside R).

    The marginal defect is sum_i |mu_i - row_i(pi)| + sum_j |nu_j - col_j(pi)|,
    linearized with one slack variable per row and column.  off_rel flags the
    (i, j) entries outside the relation R.
    """
    nl, nr = mu.size, nu.size
    p = nl * nr
    nvar = p + nl + nr + 1
    cost = np.zeros(nvar)
    cost[-1] = 1.0
    rows: list[np.ndarray] = []
    rhs: list[float] = []

    row = np.zeros(nvar)
    row[p : p + nl + nr] = 1.0
    row[-1] = -1.0
    rows.append(row)
    rhs.append(0.0)

    row = np.zeros(nvar)
    row[:p][off_rel.ravel()] = 1.0
    row[-1] = -1.0
    rows.append(row)
    rhs.append(0.0)

    for i in range(nl):
        for sign in (1.0, -1.0):
            row = np.zeros(nvar)
            row[i * nr : (i + 1) * nr] = sign
            row[p + i] = -1.0
            rows.append(row)
            rhs.append(sign * mu[i])
    for j in range(nr):
        for sign in (1.0, -1.0):
            row = np.zeros(nvar)
            row[j : p : nr] = sign
            row[p + nl + j] = -1.0
            rows.append(row)
            rhs.append(sign * nu[j])

    res = linprog(
        cost,
        A_ub=np.asarray(rows),
        b_ub=np.asarray(rhs),
        bounds=[(0, None)] * nvar,
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"coupling LP failed: {res.message}")
    return float(res.fun)


def ghp_exact(
    dl: np.ndarray,
    mu: np.ndarray,
    dr: np.ndarray,
    nu: np.ndarray,
) -> float:
    """Exact measured-space distance by exhaustive correspondence search.

    Minimizes max(distortion/2, coupling defect, mass outside the relation)
    over every covering relation between the two point sets, solving the
    inner coupling problem as a linear program.  Only feasible for very
    small spaces: the product of the point counts is capped at 16.
    """
    dl = np.asarray(dl, dtype=np.float64)
    dr = np.asarray(dr, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    nl, nr = mu.size, nu.size
    if dl.shape != (nl, nl) or dr.shape != (nr, nr):
        raise ValueError("distance matrix shapes do not match the masses")
    p = nl * nr
    if p > _GHP_EXACT_GUARD:
        raise ValueError(
            f"{nl}x{nr} product space exceeds the exhaustive-search guard "
            f"({_GHP_EXACT_GUARD})"
        )

    # gap[a, b] = |dl(i_a, i_b) - dr(j_a, j_b)| for flat pair ids a, b.
    ii, jj = np.divmod(np.arange(p), nr)
    gap = np.abs(dl[np.ix_(ii, ii)] - dr[np.ix_(jj, jj)])

    row_bits = [sum(1 << (i * nr + j) for j in range(nr)) for i in range(nl)]
    col_bits = [sum(1 << (i * nr + j) for i in range(nl)) for j in range(nr)]

    best = np.inf
    for mask in range(1, 1 << p):
        if any(mask & rb == 0 for rb in row_bits):
            continue
        if any(mask & cb == 0 for cb in col_bits):
            continue
        sel = [a for a in range(p) if mask >> a & 1]
        dis_half = gap[np.ix_(sel, sel)].max() / 2.0
        if dis_half >= best:
            continue
        off_rel = np.ones(p, dtype=bool)
        off_rel[sel] = False
        val = max(dis_half, _coupling_lp(mu, nu, off_rel.reshape(nl, nr)))
        if val < best:
            best = val
    return float(best)


# ---------------------------------------------------------------------------
# Pendant subtrees: what the first-k-branches subtree misses


@njit(cache=True)
def _pendant_walk(parent, spanned):
    """Distance to the spanned set and pendant component top, per vertex.

    comp[v] is the first vertex of v's upward path whose parent is spanned
    (the whole pendant component hangs from that parent); spanned vertices
    get dist 0 and comp -1.  Memoized path walks, linear total work.
    """
    n = parent.shape[0]
    dist = np.full(n, -1, np.int64)
    comp = np.full(n, -1, np.int64)
    buf = np.empty(n, np.int64)
    for v0 in range(n):
        if spanned[v0]:
            dist[v0] = 0
            continue
        if dist[v0] >= 0:
            continue
        v = v0
        top = 0
        while not spanned[v] and dist[v] < 0:
            buf[top] = v
            top += 1
            v = parent[v]
        if spanned[v]:
            base_d = 0
            base_c = buf[top - 1]
        else:
            base_d = dist[v]
            base_c = comp[v]
        for i in range(top):
            u = buf[top - 1 - i]
            dist[u] = base_d + i + 1
            comp[u] = base_c
    return dist, comp


def pendant_stats(t: GrowthTree, k: int) -> dict:
    """Height and size extremes of the subtrees hanging off the spanned part.

    D_raw is the largest graph distance from any vertex to the subtree
    spanned by the root and leaves 1..k, D_scaled the same after the usual
    rescaling, and S_max the vertex count of the largest pendant component.
    """
    sp = spanned_subtree(t, k)
    scale = scale_c_of(t.ell) / t.n ** alpha_of(t.ell) if t.n > 0 else 0.0
    if sp.mask.all():
        return {"D_raw": 0, "D_scaled": 0.0, "S_max": 0, "n_pendant": 0}
    dist, comp = _pendant_walk(t.parent, sp.mask)
    outside = ~sp.mask
    d_raw = int(dist.max())
    sizes = np.bincount(comp[outside], minlength=t.n_vertices)
    return {
        "D_raw": d_raw,
        "D_scaled": d_raw * scale,
        "S_max": int(sizes.max()),
        "n_pendant": int(outside.sum()),
    }


@njit(cache=True)
def _joint_profile_kernel(parents, leaf_vids, k):
    reps, nv = parents.shape
    out = np.empty((reps, 4), np.int64)
    spanned = np.zeros(nv, np.bool_)
    for row in range(reps):
        par = parents[row]
        spanned[:] = False
        spanned[0] = True
        for i in range(k):
            v = leaf_vids[i]
            while not spanned[v]:
                spanned[v] = True
                v = par[v]
        dmax = 0
        smax = 0
        dist, comp = _pendant_walk(par, spanned)
        sizes = np.zeros(nv, np.int64)
        for v in range(nv):
            if not spanned[v]:
                if dist[v] > dmax:
                    dmax = dist[v]
                sizes[comp[v]] += 1
        for v in range(nv):
            if sizes[v] > smax:
                smax = sizes[v]
        d1 = 0
        v = leaf_vids[0]
        while par[v] >= 0:
            d1 += 1
            v = par[v]
        d2 = 0
        v = leaf_vids[1]
        while par[v] >= 0:
            d2 += 1
            v = par[v]
        out[row, 0] = d1
        out[row, 1] = d2
        out[row, 2] = dmax
        out[row, 3] = smax
    return out


def joint_profile_batch(parents: np.ndarray, ell: int, k: int = 1) -> np.ndarray:
    """(depth L1, depth L2, D_raw, S_max) for a batch of parent arrays.

    parents holds one tree per row (all grown with the same ell and n, so
    leaf j sits at vertex id (j-1)(ell+1)+1).  Row-by-row this matches
    depth_profile plus pendant_stats at the same k; batching exists so a
    Monte Carlo run over millions of small trees spends its time in one
    compiled loop rather than per-tree bookkeeping.
    """
    parents = np.ascontiguousarray(parents, dtype=np.int64)
    if parents.ndim != 2:
        raise ValueError("parents must be a 2-d array, one tree per row")
    nv = parents.shape[1]
    n_leaves = (nv - 2) // (ell + 1) + 1
    if n_leaves < 2:
        raise ValueError("need at least two leaves for the joint profile")
    if not 1 <= k <= n_leaves:
        raise ValueError(f"k must be in 1..{n_leaves}, got {k}")
    leaf_vids = np.arange(n_leaves, dtype=np.int64) * (ell + 1) + 1
    return _joint_profile_kernel(parents, leaf_vids, k)


@dataclass(frozen=True)
class ProjectedMeasure:
    """A probability measure carried by an explicit finite vertex set."""

    ids: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        if self.ids.shape != self.weights.shape:
            raise ValueError("ids and weights must have matching shapes")
        if self.weights.size and self.weights.min() < 0:
            raise ValueError("weights must be nonnegative")
        total = float(self.weights.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total}, not 1")

    def as_dict(self) -> dict[int, float]:
        return {int(v): float(w) for v, w in zip(self.ids, self.weights)}

    def dense(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=np.float64)
        out[self.ids] = self.weights
        return out


def project_measure(t: GrowthTree, k: int) -> ProjectedMeasure:
    """Push the uniform vertex measure onto the spanned subtree.

    Every vertex outside the spanned subtree moves to the spanned vertex its
    pendant component hangs from; each spanned vertex also keeps its own
    1/N.  Weights are integer counts over N, so they sum to 1 exactly.
    """
    sp = spanned_subtree(t, k)
    nv = t.n_vertices
    counts = np.zeros(nv, dtype=np.int64)
    counts[sp.mask] = 1
    if not sp.mask.all():
        _, comp = _pendant_walk(t.parent, sp.mask)
        proj = t.parent[comp[~sp.mask]]
        np.add.at(counts, proj, 1)
    ids = sp.vertex_ids
    return ProjectedMeasure(ids=ids, weights=counts[ids] / nv)


def uniform_measure(t: GrowthTree, k: int) -> ProjectedMeasure:
    """Uniform probability measure on the spanned subtree's vertices."""
    ids = spanned_subtree(t, k).vertex_ids
    return ProjectedMeasure(ids=ids, weights=np.full(ids.size, 1.0 / ids.size))


# ---------------------------------------------------------------------------
# Prokhorov bound between two measures on the spanned vertices


def _branch_chains(t: GrowthTree, k: int) -> list[np.ndarray]:
    """Root-to-leaf vertex chains of the k branch paths (disjoint, ordered).

    Chain 1 starts at the root; chain b >= 2 starts just after the vertex
    branch b glued to (which belongs to an earlier chain).
    """
    if not 1 <= k <= t.n_leaves:
        raise ValueError(f"k must be in 1..{t.n_leaves}, got {k}")
    parent = t.parent
    chains = []
    for b in range(1, k + 1):
        leaf = int(t.leaf_ids[b - 1])
        stop = 0 if b == 1 else leaf - 1
        acc = [leaf]
        v = leaf
        while True:
            v = int(parent[v])
            if v == stop:
                break
            acc.append(v)
        if b == 1:
            acc.append(0)
        chains.append(np.asarray(acc[::-1], dtype=np.int64))
    return chains


def pendant_cover(
    t: GrowthTree, k: int, eps: float
) -> tuple[list[np.ndarray], np.ndarray]:
    """Cover the spanned vertices by runs of rescaled diameter about eps.

    Each branch chain is cut into consecutive runs of q+1 vertices where q
    edges have rescaled length at most eps (at least one edge per run, so
    for eps below one edge length the actual diameter, which is returned
    per cell, exceeds eps).
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    scale = scale_c_of(t.ell) / t.n ** alpha_of(t.ell)
    q = max(1, int(np.floor(eps / scale + 1e-12)))
    cells: list[np.ndarray] = []
    for chain in _branch_chains(t, k):
        for s in range(0, chain.size, q + 1):
            cells.append(chain[s : s + q + 1])
    diams = np.asarray([(c.size - 1) * scale for c in cells], dtype=np.float64)
    return cells, diams


def prokhorov_bound(
    mass_a: Sequence[float] | np.ndarray,
    mass_b: Sequence[float] | np.ndarray,
    max_diameter: float,
) -> float:
    """Prokhorov distance bound from cell masses of two probability measures.

    If every cell has diameter at most t and the cell masses satisfy
    sum_i (a_i - b_i)_+ <= t, then for any set S the cells meeting S lie in
    the t-thickening of S, so a(S) <= sum over those cells of a_i <=
    b(thickening) + t; hence the Prokhorov distance is at most
    max(max cell diameter, sum of positive mass gaps), which this returns.
    """
    a = np.asarray(mass_a, dtype=np.float64)
    b = np.asarray(mass_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("cell mass vectors must have matching shapes")
    plus = float(np.clip(a - b, 0.0, None).sum())
    minus = float(np.clip(b - a, 0.0, None).sum())
    return max(float(max_diameter), max(plus, minus))


def masses_on_cells(
    pm: ProjectedMeasure, cells: list[np.ndarray], n_vertices: int
) -> np.ndarray:
    """Mass of pm on each cell of a vertex cover."""
    dense = pm.dense(n_vertices)
    return np.asarray([float(dense[c].sum()) for c in cells])


# ---------------------------------------------------------------------------
# One experiment replicate

EXPERIMENT_FIELDS = (
    "ell",
    "n",
    "k",
    "eps",
    "rep",
    "dis_bound",
    "discrepancy",
    "ghp_bound",
    "D_scaled",
    "S_max",
    "prokhorov_bound",
)


def experiment_row(
    ell: int, n: int, k: int, eps: float, rep: int, r: RngStream
) -> dict:
    """Grow one marked tree and evaluate every comparison bound on it."""
    e = embellish(ell, n, r)
    t = to_growth_tree(e)

    cov = cover_tree(e, k, eps)
    rep_dict = cover_report(e, k, eps, cov)
    dis_bound = rep_dict["bound"]

    nu_unif = uniform_measure(t, k)
    c_k = float(e.base.cuts.cuts[k - 1])
    mu_cells = cov.lengths / c_k
    disc = discrepancy(cov, nu_unif, mu_cells)
    ghp = ghp_upper_bound(dis_bound / 2.0, disc, 0.0)

    ps = pendant_stats(t, k)

    cells, diams = pendant_cover(t, k, eps)
    nu_bar = project_measure(t, k)
    ma = masses_on_cells(nu_bar, cells, t.n_vertices)
    mb = masses_on_cells(nu_unif, cells, t.n_vertices)
    prok = prokhorov_bound(ma, mb, float(diams.max()))

    return {
        "ell": ell,
        "n": n,
        "k": k,
        "eps": eps,
        "rep": rep,
        "dis_bound": dis_bound,
        "discrepancy": disc,
        "ghp_bound": ghp,
        "D_scaled": ps["D_scaled"],
        "S_max": ps["S_max"],
        "prokhorov_bound": prok,
    }
