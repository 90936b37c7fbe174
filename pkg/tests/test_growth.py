import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treelab.growth import (
    GrowthTree,
    branch_lengths,
    depth_profile,
    from_csv,
    grow,
    recover_choices,
    spanned_subtree,
    to_csv,
)
from treelab.samplers import RngStream


def _brute_depth(parent, v):
    d = 0
    while parent[v] >= 0:
        v = parent[v]
        d += 1
    return d


@given(
    ell=st.integers(min_value=1, max_value=4),
    n=st.integers(min_value=0, max_value=40),
    seed=st.integers(min_value=0, max_value=10**6),
)
@settings(max_examples=60, deadline=None)
def test_grow_structural_invariants(ell, n, seed):
    t = grow(ell, n, RngStream(seed, 0))
    nv = n + n // ell + 2
    assert t.n_vertices == nv
    assert t.parent[0] == -1
    assert t.kind[0] == 0
    # exactly one root; every other vertex walks up to it (splits rewire
    # old vertices under newer internal ones, so parent ids may exceed
    # child ids — only reachability is invariant)
    child = np.arange(1, nv)
    assert np.all(t.parent[child] >= 0)
    assert np.all(t.parent[child] < nv)
    for v in range(1, nv):
        w, hops = v, 0
        while t.parent[w] >= 0:
            w = int(t.parent[w])
            hops += 1
            assert hops <= nv
        assert w == 0
    # leaves appear at vertex ids 1, ell+2, 2(ell+1)+1, ...
    assert np.array_equal(t.leaf_ids, np.arange(t.n_leaves) * (ell + 1) + 1)
    assert np.all(t.kind[t.leaf_ids] == 2)
    # edge slot i holds child id i+1
    assert np.array_equal(t.edges, np.arange(1, nv))
    # leaves have no children
    assert not np.intersect1d(t.parent[child], t.leaf_ids).size


def test_grow_rejects_bad_args():
    with pytest.raises(ValueError):
        grow(0, 5, RngStream(0, 0))
    with pytest.raises(ValueError):
        grow(2, -1, RngStream(0, 0))


def test_depth_profile_matches_brute_force():
    t = grow(2, 60, RngStream(5, 1))
    d = depth_profile(t)
    for v in range(t.n_vertices):
        assert d[v] == _brute_depth(t.parent, v)


def test_spanned_subtree_is_union_of_root_paths():
    t = grow(3, 45, RngStream(9, 0))
    for k in (1, 2, t.n_leaves):
        s = spanned_subtree(t, k)
        expect = {0}
        for leaf in t.leaf_ids[:k]:
            v = int(leaf)
            while v >= 0:
                expect.add(v)
                v = int(t.parent[v])
        assert set(s.vertex_ids.tolist()) == expect
        assert s.edge_count == len(expect) - 1


def test_branch_lengths_partition_spanned_edges():
    t = grow(2, 50, RngStream(2, 7))
    for k in (1, 3, t.n_leaves):
        bl = branch_lengths(t, k)
        assert bl.shape == (k,)
        assert np.all(bl >= 1)
        assert bl.sum() == spanned_subtree(t, k).edge_count


def test_branch_one_is_root_to_first_leaf():
    t = grow(2, 30, RngStream(4, 4))
    assert branch_lengths(t, 1)[0] == depth_profile(t)[t.leaf_ids[0]]


def test_recover_choices_replays_growth():
    # Re-running the chain with the recovered choices must rebuild the
    # identical parent array.
    ell, n = 2, 25
    t = grow(ell, n, RngStream(13, 0))
    choices = recover_choices(t)
    parent = np.full(t.n_vertices, -1, dtype=np.int64)
    kind = np.zeros(t.n_vertices, dtype=np.uint8)
    parent[1] = 0
    kind[1] = 2
    nxt = 2
    for m in range(1, n + 1):
        c = int(choices[m - 1])
        v = nxt
        nxt += 1
        # split the edge above c: v takes c's place below c's old parent
        parent[v] = parent[c]
        parent[c] = v
        kind[v] = 1
        if m % ell == 0:
            leaf = nxt
            nxt += 1
            parent[leaf] = v
            kind[leaf] = 2
    # vertex ids in t are creation-ordered the same way, but the split
    # inserts v between c and its parent; compare the resulting arrays.
    assert np.array_equal(parent, t.parent)
    assert np.array_equal(kind, t.kind)


def test_csv_round_trip():
    t = grow(2, 17, RngStream(21, 3))
    s = to_csv(t, extra_comments=["anything goes here"])
    u = from_csv(s)
    assert u.ell == t.ell and u.n == t.n
    assert np.array_equal(u.parent, t.parent)
    assert np.array_equal(u.kind, t.kind)
    assert np.array_equal(u.creation, t.creation)
    assert np.array_equal(u.leaf_ids, t.leaf_ids)


def test_zero_step_tree():
    t = grow(3, 0, RngStream(0, 0))
    assert t.n_vertices == 2
    assert t.n_leaves == 1
    assert depth_profile(t)[1] == 1
