"""Line-breaking real trees: branches glued at uniform points, exact metric.

A skeleton is built from a cut sequence by cutting the half-line at
0 < C_1 < C_2 < ... and gluing the k-th segment (length C_k - C_{k-1}) to a
point chosen uniformly by length on the union of the earlier branches.  The
root sits at offset 0 of branch 1.  Points are addressed as
(branch, offset); a junction's canonical address lives on the branch it was
glued onto, while (child, 0) is an alias for the same physical point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .samplers import CutSequence, RngStream, sample_cuts

__all__ = [
    "Skeleton",
    "TreePoint",
    "build_skeleton",
    "distance",
    "distance_to_root",
    "sample_point",
    "mean_root_distance",
    "to_json",
    "from_json",
]


@dataclass(frozen=True)
class TreePoint:
    """A point of the skeleton: 1-based branch index plus offset along it."""

    branch: int
    offset: float


@dataclass
class Skeleton:
    """Finite line-breaking tree with K branches.

    lengths[b-1] is branch b's length (Delta C_b), attach_branch[b-1] the
    1-based branch it glues onto (-1 for branch 1), attach_offset[b-1] the
    offset of the gluing point on that branch.  root_depth[b-1] caches the
    distance from the root to branch b's offset-0 end.
    """

    cuts: CutSequence
    attach_branch: np.ndarray
    attach_offset: np.ndarray
    lengths: np.ndarray = field(init=False)
    root_depth: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        K = len(self.cuts)
        self.attach_branch = np.asarray(self.attach_branch, dtype=np.int64)
        self.attach_offset = np.asarray(self.attach_offset, dtype=np.float64)
        if self.attach_branch.shape != (K,) or self.attach_offset.shape != (K,):
            raise ValueError("attachment arrays must have one entry per branch")
        self.lengths = np.diff(self.cuts.cuts, prepend=0.0)
        if K and (self.attach_branch[0] != -1 or self.attach_offset[0] != 0.0):
            raise ValueError("branch 1 must carry attach_branch -1, offset 0")
        depth = np.zeros(K, dtype=np.float64)
        for b in range(2, K + 1):
            ab = int(self.attach_branch[b - 1])
            if not 1 <= ab < b:
                raise ValueError(f"branch {b} attaches to invalid branch {ab}")
            off = float(self.attach_offset[b - 1])
            if not 0.0 <= off < self.lengths[ab - 1]:
                raise ValueError(
                    f"branch {b} attach offset {off} outside [0, {self.lengths[ab-1]})"
                )
            depth[b - 1] = depth[ab - 1] + off
        self.root_depth = depth

    @property
    def ell(self) -> int:
        return self.cuts.ell

    @property
    def n_branches(self) -> int:
        return len(self.cuts)

    @property
    def total_length(self) -> float:
        return float(self.cuts.cuts[-1]) if len(self.cuts) else 0.0

    def validate_point(self, p: TreePoint) -> None:
        if not 1 <= p.branch <= self.n_branches:
            raise ValueError(f"branch index {p.branch} out of range")
        if not 0.0 <= p.offset <= self.lengths[p.branch - 1]:
            raise ValueError(
                f"offset {p.offset} outside branch {p.branch} of length "
                f"{self.lengths[p.branch - 1]}"
            )

    def canonical(self, p: TreePoint) -> TreePoint:
        """Resolve junction aliases: (b, 0) for b > 1 lives on the parent branch."""
        branch, offset = p.branch, p.offset
        while branch > 1 and offset == 0.0:
            offset = float(self.attach_offset[branch - 1])
            branch = int(self.attach_branch[branch - 1])
        return TreePoint(branch, offset)


def build_skeleton(
    ell: int, K: int, r: RngStream, cuts: CutSequence | None = None
) -> Skeleton:
    """Draw cuts (unless given) and glue each branch at a uniform point.

    The gluing point of branch k+1 is uniform by length on branches 1..k:
    a single uniform times C_k lands in the global coordinate [0, C_k), and
    the cut array itself is the prefix-sum table locating the branch.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if cuts is None:
        cuts = sample_cuts(ell, K, r)
    elif len(cuts) != K:
        raise ValueError(f"cuts has {len(cuts)} entries, expected K={K}")
    carr = cuts.cuts
    attach_branch = np.full(K, -1, dtype=np.int64)
    attach_offset = np.zeros(K, dtype=np.float64)
    for b in range(2, K + 1):
        g = r.uniform() * carr[b - 2]
        # side='right' keeps the offset strictly below the branch length.
        idx = int(np.searchsorted(carr[: b - 1], g, side="right"))
        attach_branch[b - 1] = idx + 1
        attach_offset[b - 1] = g - (carr[idx - 1] if idx > 0 else 0.0)
    return Skeleton(cuts=cuts, attach_branch=attach_branch, attach_offset=attach_offset)


def distance(s: Skeleton, a: TreePoint, b: TreePoint) -> float:
    """Intrinsic path length between two points.

    Walk whichever point sits on the higher-indexed branch up through its
    gluing junction (a branch's index always exceeds its parent's), then
    measure along the common branch.
    """
    s.validate_point(a)
    s.validate_point(b)
    ba, xa = a.branch, a.offset
    bb, xb = b.branch, b.offset
    d = 0.0
    while ba != bb:
        if ba > bb:
            d += xa
            xa = float(s.attach_offset[ba - 1])
            ba = int(s.attach_branch[ba - 1])
        else:
            d += xb
            xb = float(s.attach_offset[bb - 1])
            bb = int(s.attach_branch[bb - 1])
    return d + abs(xa - xb)


def distance_to_root(s: Skeleton, a: TreePoint) -> float:
    """Distance to offset 0 of branch 1 (cached per-branch depths)."""
    s.validate_point(a)
    return float(s.root_depth[a.branch - 1]) + a.offset


def sample_point(s: Skeleton, r: RngStream) -> TreePoint:
    """Uniform-by-length point; cut boundaries resolve to the smaller branch."""
    g = r.uniform() * s.total_length
    carr = s.cuts.cuts
    idx = int(np.searchsorted(carr, g, side="left"))
    base = carr[idx - 1] if idx > 0 else 0.0
    return TreePoint(idx + 1, float(g - base))


def mean_root_distance(s: Skeleton) -> float:
    """Length-measure average of distance_to_root, by per-branch integration.

    Branch b contributes integral of (root_depth_b + t) dt over [0, len_b],
    i.e. len_b * root_depth_b + len_b^2 / 2.
    """
    lens = s.lengths
    return float((lens * s.root_depth + 0.5 * lens * lens).sum() / s.total_length)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def to_json(s: Skeleton) -> str:
    """Serialize with reals as 17-significant-digit decimal strings
    (bit-exact round trip)."""
    doc = {
        "ell": s.ell,
        "cuts": [_fmt(c) for c in s.cuts.cuts],
        "branches": [
            {
                "len": _fmt(s.lengths[b]),
                "attach_branch": int(s.attach_branch[b]),
                "attach_offset": _fmt(s.attach_offset[b]),
            }
            for b in range(s.n_branches)
        ],
    }
    return json.dumps(doc, sort_keys=True)


def from_json(text: str) -> Skeleton:
    """Parse to_json output; malformed JSON is reported with its byte offset."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"malformed skeleton JSON at byte {e.pos}: {e.msg}") from e
    cuts = CutSequence(
        ell=int(doc["ell"]),
        cuts=np.array([float(c) for c in doc["cuts"]], dtype=np.float64),
    )
    branches = doc["branches"]
    attach_branch = np.array(
        [int(b["attach_branch"]) for b in branches], dtype=np.int64
    )
    attach_offset = np.array(
        [float(b["attach_offset"]) for b in branches], dtype=np.float64
    )
    s = Skeleton(cuts=cuts, attach_branch=attach_branch, attach_offset=attach_offset)
    lens = np.array([float(b["len"]) for b in branches])
    if not np.array_equal(lens, s.lengths):
        raise ValueError("branch lengths inconsistent with cuts")
    return s
