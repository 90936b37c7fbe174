import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treelab.embellish import embellish, to_growth_tree
from treelab.growth import depth_profile, grow, spanned_subtree
from treelab.metrics import (
    CellCover,
    Correspondence,
    ProjectedMeasure,
    cell_vertex_masses,
    cover_report,
    cover_tree,
    discrepancy,
    distortion_cover_bound,
    distortion_exact,
    experiment_row,
    EXPERIMENT_FIELDS,
    ghp_exact,
    ghp_upper_bound,
    joint_profile_batch,
    masses_on_cells,
    pendant_cover,
    pendant_stats,
    project_measure,
    prokhorov_bound,
    uniform_measure,
)
from treelab.samplers import RngStream, alpha_of, scale_c_of
from treelab.skeleton import distance as skel_distance


# ---------------------------------------------------------------------------
# correspondences and exact distortion


def test_correspondence_requires_full_coverage():
    Correspondence(pairs=((0, 0), (1, 0)), left_size=2, right_size=1)
    with pytest.raises(ValueError):
        Correspondence(pairs=((0, 0),), left_size=2, right_size=1)
    with pytest.raises(ValueError):
        Correspondence(pairs=((0, 0), (1, 1)), left_size=2, right_size=3)


def test_distortion_exact_hand_case():
    # left: two points at distance 2; right: two points at distance 5
    c = Correspondence(pairs=((0, 0), (1, 1)), left_size=2, right_size=2)
    dl = lambda a, b: 0.0 if a == b else 2.0
    dr = lambda a, b: 0.0 if a == b else 5.0
    assert distortion_exact(c, dl, dr) == 3.0
    cc = Correspondence(pairs=((0, 0), (0, 1), (1, 1)), left_size=2, right_size=2)
    # (0,0) vs (0,1): |0 - 5| = 5 dominates
    assert distortion_exact(cc, dl, dr) == 5.0


# ---------------------------------------------------------------------------
# interval covers of the continuum tree


@pytest.fixture
def marked():
    return embellish(2, 20, RngStream(100, 0))


def test_cover_cells_partition_each_branch(marked):
    e = marked
    k = e.n_branches
    cov = cover_tree(e, k, 0.3)
    assert cov.n_cells >= k
    for b in range(1, k + 1):
        sel = cov.branch == b
        lo, hi = cov.lo[sel], cov.hi[sel]
        order = np.argsort(lo)
        assert lo[order][0] == 0.0
        assert hi[order][-1] == pytest.approx(e.base.lengths[b - 1])
        assert np.allclose(hi[order][:-1], lo[order][1:])
        assert (cov.closed[sel]).sum() == 1  # only the leaf cell is closed
    assert cov.lengths.max() <= 0.3 * (1 + 1e-12)


def test_cover_counts_every_table_vertex_once(marked):
    e = marked
    cov = cover_tree(e, e.n_branches, 0.25)
    total = sum(len(ix) for ix in cov.vertex_idx)
    assert total == cov.n_table_vertices
    assert cov.counts.sum() == cov.n_table_vertices
    # root + every marker + every leaf is in the table exactly once
    assert cov.n_table_vertices == 1 + e.n + e.n_branches


def test_cover_huge_eps_gives_one_cell_per_branch(marked):
    e = marked
    cov = cover_tree(e, e.n_branches, 1e9)
    assert cov.n_cells == e.n_branches


@given(
    seed=st.integers(min_value=0, max_value=999),
    eps_mul=st.floats(min_value=0.05, max_value=2.0),
)
@settings(max_examples=25, deadline=None)
def test_cover_structural_property(seed, eps_mul):
    e = embellish(2, 12, RngStream(seed, 1))
    eps = eps_mul * float(e.base.total_length) / 6
    cov = cover_tree(e, e.n_branches, eps)
    assert cov.counts.sum() == 1 + e.n + e.n_branches
    assert cov.lengths.min() > 0


def test_cover_report_keys_and_bound_shape(marked):
    rep = cover_report(marked, 2, 0.4)
    assert rep["bound"] == pytest.approx(
        rep["pair_term"] + 2 * rep["cell_deviation"] + 2 * 0.4
    )
    assert rep["bound_conservative"] >= rep["pair_term"]
    assert distortion_cover_bound(marked, 2, 0.4) == rep["bound"]


def test_cover_bound_dominates_exact_distortion():
    # Build the vertex<->cell correspondence explicitly and compare the
    # bound against the true distortion it is supposed to dominate.
    e = embellish(2, 64, RngStream(7, 2))
    t = to_growth_tree(e)
    k = 3
    eps = 0.45
    cov = cover_tree(e, k, eps)
    assert all(len(ix) > 0 for ix in cov.vertex_idx), "seed must fill every cell"

    scale = scale_c_of(2) / 64 ** alpha_of(2)
    d = depth_profile(t)

    def lca_dist(u, v):
        anc = {}
        w, dep = u, 0
        while w >= 0:
            anc[w] = dep
            w = int(t.parent[w])
            dep += 1
        w = v
        while w not in anc:
            w = int(t.parent[w])
        return (d[u] - d[w]) + (d[v] - d[w])

    vids = []
    for ix in cov.vertex_idx:
        vids.extend(int(v) for v in cov.table_vids[ix])
    vid_pos = {v: i for i, v in enumerate(sorted(set(vids)))}
    pairs = []
    for ci, ix in enumerate(cov.vertex_idx):
        for v in cov.table_vids[ix]:
            pairs.append((ci, vid_pos[int(v)]))
    corr = Correspondence(
        pairs=tuple(pairs), left_size=cov.n_cells, right_size=len(vid_pos)
    )
    inv = {i: v for v, i in vid_pos.items()}
    dis = distortion_exact(
        corr,
        lambda a, b: skel_distance(e.base, cov.reps[a], cov.reps[b]),
        lambda a, b: scale * lca_dist(inv[a], inv[b]),
    )
    assert dis <= distortion_cover_bound(e, k, eps, cov)


# ---------------------------------------------------------------------------
# measures, discrepancy, Prokhorov machinery


def test_projected_measure_validation():
    with pytest.raises(ValueError):
        ProjectedMeasure(ids=np.array([0, 1]), weights=np.array([0.6, 0.6]))
    with pytest.raises(ValueError):
        ProjectedMeasure(ids=np.array([0]), weights=np.array([-1.0]))


def test_project_measure_conserves_mass_and_support():
    t = grow(2, 30, RngStream(8, 0))
    for k in (1, 2, t.n_leaves):
        pm = project_measure(t, k)
        sp = set(spanned_subtree(t, k).vertex_ids.tolist())
        assert set(pm.ids.tolist()) == sp
        assert pm.weights.sum() == pytest.approx(1.0)
        # each weight is an integer multiple of 1/N
        assert np.allclose(pm.weights * t.n_vertices, np.round(pm.weights * t.n_vertices))
    full = project_measure(t, t.n_leaves)
    um = uniform_measure(t, t.n_leaves)
    # projecting onto everything spanned still differs from uniform unless
    # the spanned subtree is the whole tree
    assert full.weights.sum() == pytest.approx(um.weights.sum())


def test_discrepancy_trivials(marked):
    cov = cover_tree(marked, 2, 0.5)
    nu = cell_vertex_masses(cov, {int(v): 1.0 / 3 for v in cov.table_vids[:3]})
    assert discrepancy(cov, {}, nu) == pytest.approx(nu.sum())
    t = to_growth_tree(marked)
    um = uniform_measure(t, 2)
    masses = cell_vertex_masses(cov, um)
    assert discrepancy(cov, um, masses) == 0.0
    with pytest.raises(ValueError):
        discrepancy(cov, um, masses[:-1])


def test_ghp_upper_bound_combines_and_validates():
    assert ghp_upper_bound(0.2, 0.5, 0.1) == 0.5
    assert ghp_upper_bound(0.0, 0.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        ghp_upper_bound(-0.1, 0.0, 0.0)


def test_ghp_exact_unit_cases():
    one = np.zeros((1, 1))
    two = np.array([[0.0, 1.0], [1.0, 0.0]])
    # identical spaces -> 0
    assert ghp_exact(one, np.array([1.0]), one, np.array([1.0])) == pytest.approx(0.0)
    assert ghp_exact(
        two, np.array([0.5, 0.5]), two, np.array([0.5, 0.5])
    ) == pytest.approx(0.0)
    # swapping which point carries the mass is an isometry -> 0
    assert ghp_exact(
        two, np.array([1.0, 0.0]), two, np.array([0.0, 1.0])
    ) == pytest.approx(0.0, abs=1e-9)
    # unit segment vs a single point: half the distortion
    assert ghp_exact(
        two, np.array([0.5, 0.5]), one, np.array([1.0])
    ) == pytest.approx(0.5)
    # moving half the mass across a unit gap costs 1/3
    assert ghp_exact(
        two, np.array([1.0, 0.0]), two, np.array([0.5, 0.5])
    ) == pytest.approx(1 / 3, abs=1e-8)


def test_ghp_exact_guard():
    d = np.zeros((5, 5))
    with pytest.raises(ValueError):
        ghp_exact(d, np.full(5, 0.2), d, np.full(5, 0.2))


def test_ghp_bound_dominates_exact_on_coupled_instance():
    e = embellish(2, 48, RngStream(12, 0))
    t = to_growth_tree(e)
    k, eps = 1, 0.9
    cov = cover_tree(e, k, eps)
    rep = cover_report(e, k, eps, cov)
    c1 = float(e.base.cuts.cuts[k - 1])
    mu_cells = cov.lengths / c1
    nu = uniform_measure(t, k)
    disc = discrepancy(cov, nu, mu_cells)
    bound = ghp_upper_bound(rep["bound"] / 2, disc, 0.0)

    # exact value between the two discretized sides
    scale = scale_c_of(2) / 48 ** alpha_of(2)
    d = depth_profile(t)
    ids = spanned_subtree(t, k).vertex_ids
    # spanned subtree at k=1 is the root-to-leaf path, so depth differences
    # are the graph distances
    dr = scale * np.abs(d[ids][:, None] - d[ids][None, :]).astype(np.float64)
    dl = np.empty((cov.n_cells, cov.n_cells))
    for i in range(cov.n_cells):
        for j in range(cov.n_cells):
            dl[i, j] = skel_distance(e.base, cov.reps[i], cov.reps[j])
    if cov.n_cells * ids.size <= 16:
        exact = ghp_exact(dl, mu_cells, dr, nu.weights)
        assert exact <= bound + 1e-9


# ---------------------------------------------------------------------------
# pendant subtrees


def test_pendant_stats_trivial_when_all_spanned():
    t = grow(2, 4, RngStream(1, 1))
    ps = pendant_stats(t, t.n_leaves)
    assert ps["D_raw"] == 0
    assert ps["S_max"] == 0
    assert ps["n_pendant"] == 0


def test_pendant_stats_small_hand_case():
    # find a tree where exactly one leaf hangs off the k=1 path and check
    # the numbers directly
    t = grow(2, 4, RngStream(3, 0))
    ps = pendant_stats(t, 1)
    mask = spanned_subtree(t, 1).mask
    assert ps["n_pendant"] == int((~mask).sum())
    assert ps["D_scaled"] == pytest.approx(
        ps["D_raw"] * scale_c_of(2) / 4 ** alpha_of(2)
    )
    assert ps["S_max"] >= ps["D_raw"]  # a height-d subtree has >= d vertices


def test_joint_profile_batch_matches_per_tree_stats():
    ell, n, reps = 2, 10, 40
    trees = [grow(ell, n, RngStream(60, i)) for i in range(reps)]
    parents = np.stack([t.parent for t in trees])
    out = joint_profile_batch(parents, ell, k=1)
    for i, t in enumerate(trees):
        d = depth_profile(t)
        ps = pendant_stats(t, 1)
        assert out[i, 0] == d[t.leaf_ids[0]]
        assert out[i, 1] == d[t.leaf_ids[1]]
        assert out[i, 2] == ps["D_raw"]
        assert out[i, 3] == ps["S_max"]


def test_joint_profile_batch_validates_input():
    with pytest.raises(ValueError):
        joint_profile_batch(np.zeros(5, dtype=np.int64), 2)
    t = grow(1, 2, RngStream(0, 0))
    with pytest.raises(ValueError):
        joint_profile_batch(t.parent[None, :], 1, k=5)


def test_pendant_cover_partitions_spanned_vertices():
    t = grow(2, 40, RngStream(9, 9))
    k = 2
    cells, diams = pendant_cover(t, k, 0.4)
    allv = np.concatenate(cells)
    assert sorted(allv.tolist()) == sorted(
        spanned_subtree(t, k).vertex_ids.tolist()
    )
    scale = scale_c_of(2) / 40 ** alpha_of(2)
    for cell, dm in zip(cells, diams):
        assert dm == pytest.approx((len(cell) - 1) * scale)


def test_prokhorov_bound_cases():
    assert prokhorov_bound([0.5, 0.5], [0.5, 0.5], 0.3) == 0.3
    assert prokhorov_bound([1.0, 0.0], [0.0, 1.0], 0.2) == 1.0
    assert prokhorov_bound([0.7, 0.3], [0.5, 0.5], 0.1) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        prokhorov_bound([0.5], [0.5, 0.5], 0.1)


def test_masses_on_cells_sums_to_total():
    t = grow(2, 30, RngStream(14, 0))
    k = 2
    cells, _ = pendant_cover(t, k, 0.5)
    pm = project_measure(t, k)
    masses = masses_on_cells(pm, cells, t.n_vertices)
    assert masses.sum() == pytest.approx(1.0)
    um = uniform_measure(t, k)
    assert masses_on_cells(um, cells, t.n_vertices).sum() == pytest.approx(1.0)


def test_experiment_row_fields_and_sanity():
    row = experiment_row(2, 128, 3, 0.7, 0, RngStream(21, 5))
    assert tuple(row) == EXPERIMENT_FIELDS
    assert row["ell"] == 2 and row["n"] == 128 and row["k"] == 3
    assert row["dis_bound"] > 0
    assert 0 <= row["discrepancy"] <= 2
    assert row["ghp_bound"] <= max(row["dis_bound"] / 2, row["discrepancy"]) + 1e-12
    assert row["prokhorov_bound"] > 0
    assert row["S_max"] >= 0
