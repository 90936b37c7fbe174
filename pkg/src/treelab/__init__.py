"""Simulation laboratory for inhomogeneously grown random trees.

A growth chain splits a uniform edge at every step and hangs a new leaf
every ell-th step; rescaled by c / n**alpha its vertex set converges to a
line-breaking real tree.  This package samples both sides, couples them
exactly through marker-decorated skeletons, exposes the urn processes that
govern the subtree counts, and verifies the distributional identities with
exact small-case enumeration plus pre-registered statistical checks.

Submodules
----------
samplers     counter-based random streams, cut sequences, Gamma/Dirichlet/Beta
growth       the combinatorial chain: growing, depth profiles, spanned subtrees
skeleton     line-breaking real trees: gluing, distances, uniform sampling
embellish    marker-decorated skeletons coupled to the chain, tracked points
urns         infinite-color, immigration, classical and modified urns
metrics      covers, distortion/discrepancy bounds, pendant and Prokhorov stats
statharness  exact enumeration oracles and statistical test kernels
cli          command-line front end and the experiment/check runner
"""

__version__ = "0.1.0"

from .samplers import (
    CutSequence,
    RngStream,
    alpha_of,
    derive_stream_id,
    sample_cuts,
    scale_c_of,
)
from .growth import (
    GrowthTree,
    branch_lengths,
    depth_profile,
    grow,
    recover_choices,
    spanned_subtree,
)
from .skeleton import Skeleton, TreePoint, build_skeleton, sample_point
from .embellish import (
    EmbellishedTree,
    XCoupling,
    build_x_coupling,
    embellish,
    marker_count,
    pendant_distance_sample,
    to_growth_tree,
)
from .urns import (
    run_classical,
    run_imm_urn,
    run_infinite_urn,
    run_mod_urn,
    two_stage_sample,
    urn_moment_scan,
)
from .metrics import (
    CellCover,
    Correspondence,
    ProjectedMeasure,
    cover_tree,
    discrepancy,
    distortion_cover_bound,
    distortion_exact,
    ghp_exact,
    ghp_upper_bound,
    pendant_stats,
    project_measure,
    prokhorov_bound,
)
from .statharness import (
    ExactLaw,
    TestReport,
    enumerate_growth,
    enumerate_urn,
    exact_law_test,
    exponent_fit,
    ks_distance_test,
    two_sample_test,
)

__all__ = [
    "__version__",
    "CutSequence",
    "RngStream",
    "alpha_of",
    "derive_stream_id",
    "sample_cuts",
    "scale_c_of",
    "GrowthTree",
    "branch_lengths",
    "depth_profile",
    "grow",
    "recover_choices",
    "spanned_subtree",
    "Skeleton",
    "TreePoint",
    "build_skeleton",
    "sample_point",
    "EmbellishedTree",
    "XCoupling",
    "build_x_coupling",
    "embellish",
    "marker_count",
    "pendant_distance_sample",
    "to_growth_tree",
    "run_classical",
    "run_imm_urn",
    "run_infinite_urn",
    "run_mod_urn",
    "two_stage_sample",
    "urn_moment_scan",
    "CellCover",
    "Correspondence",
    "ProjectedMeasure",
    "cover_tree",
    "discrepancy",
    "distortion_cover_bound",
    "distortion_exact",
    "ghp_exact",
    "ghp_upper_bound",
    "pendant_stats",
    "project_measure",
    "prokhorov_bound",
    "ExactLaw",
    "TestReport",
    "enumerate_growth",
    "enumerate_urn",
    "exact_law_test",
    "exponent_fit",
    "ks_distance_test",
    "two_sample_test",
]
