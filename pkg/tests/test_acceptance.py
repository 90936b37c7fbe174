"""Acceptance gate: one test per advertised guarantee, full-size parameters.

Each test prints a single PASS/FAIL line (visible with -s, and mirrored by
pytest's own -v output) together with the measured wall time.  Seeds are
pinned so every run is reproducible; replication counts are the designed
full sizes, so this module is much slower than the rest of the suite.
"""

import json
import time
from fractions import Fraction

import numpy as np
import pytest

from treelab.cli import (
    ExperimentConfig,
    experiment_coupling,
    experiment_exponent,
    experiment_urnmoments,
    run_cli,
    suite_distributional,
    suite_oracle,
    suite_tails,
    suite_urn,
)
from treelab.growth import branch_lengths
from treelab.samplers import alpha_of
from treelab.statharness import enumerate_growth, enumerate_urn

SEED = 3


def _line(name: str, ok: bool, detail: str, t0: float) -> None:
    print(f"{'PASS' if ok else 'FAIL'}  {name}  [{detail}]  ({time.perf_counter() - t0:.1f}s)")


# ---------------------------------------------------------------------------


def test_c1_exact_joint_law_against_both_samplers():
    # (depth of leaf 1, depth of leaf 2, pendant depth, pendant size) at
    # ell=2, n=4: exhaustive law vs 1e6 draws from each sampling route.
    t0 = time.perf_counter()
    reports = suite_oracle(2, 4, 10**6, SEED, 1)
    ok = all(r.passed for r in reports)
    ps = ", ".join(f"{r.name.split(':')[0]} p={r.statistic:.4f}" for r in reports)
    _line("joint law at (ell=2, n=4), both routes, 1e6 draws", ok, ps, t0)
    assert ok, [r.name for r in reports if not r.passed]


def test_c2_branch_law_exact_equality_and_two_stage():
    t0 = time.perf_counter()
    mismatches = []
    for n in range(1, 7):
        lg = enumerate_growth(
            2, n, lambda t: tuple(int(x) for x in branch_lengths(t, t.n_leaves))
        )
        lu = enumerate_urn("infinite", 2, {}, n, lambda s: s)
        if lg.outcomes != lu.outcomes:
            mismatches.append(n)
        assert all(isinstance(p, Fraction) for p in lg.outcomes.values())
    reports = suite_urn(2, 10**5, SEED, 1)
    ok = not mismatches and all(r.passed for r in reports)
    two = [r for r in reports if "two-stage" in r.name][0]
    _line(
        "branch-count law: exact growth==urn for n<=6, two-stage pair at 1e5",
        ok,
        f"exact equal n=1..6; (M,U) chi2 p={two.statistic:.4f}",
        t0,
    )
    assert ok, (mismatches, [r.name for r in reports if not r.passed])


def test_c3_distributional_suite_full_size():
    t0 = time.perf_counter()
    reports = suite_distributional(2, 10**5, SEED, 1)
    ok = all(r.passed for r in reports)
    worst = min(
        (r for r in reports if r.op == ">"), key=lambda r: r.statistic / r.threshold
    )
    _line(
        "cut/fragment/marker/exchangeability laws at 1e5",
        ok,
        f"{len(reports)} checks; tightest p={worst.statistic:.4f}",
        t0,
    )
    assert ok, [r.name for r in reports if not r.passed]


def test_c4_height_exponent_recovers_alpha():
    t0 = time.perf_counter()
    cfg = ExperimentConfig(
        command="exponent",
        ells=(1, 2, 3),
        n_grid=tuple(2**p for p in range(10, 21)),
        k_schedule="n15",
        eps_schedule="kinv",
        reps=32,
        seed=SEED,
        out="",
    )
    rows = experiment_exponent(cfg, 1)
    slopes = {ell: next(r["slope"] for r in rows if r["ell"] == ell) for ell in (1, 2, 3)}
    errs = {ell: abs(s - alpha_of(ell)) for ell, s in slopes.items()}
    ok = all(e <= 0.05 for e in errs.values())
    _line(
        "median-height log-log slope = alpha +- 0.05 for ell in {1,2,3}",
        ok,
        ", ".join(f"ell={l}: {s:.3f} vs {alpha_of(l):.3f}" for l, s in slopes.items()),
        t0,
    )
    assert ok, errs


@pytest.fixture(scope="module")
def coupling_rows():
    cfg = ExperimentConfig(
        command="coupling",
        ells=(2,),
        n_grid=(2**12, 2**15, 2**18),
        k_schedule="n15",
        eps_schedule="kinv",
        reps=64,
        seed=SEED,
        out="",
    )
    t0 = time.perf_counter()
    rows = experiment_coupling(cfg, 1)
    print(f"(coupling experiment: 3 sizes x 64 reps in {time.perf_counter() - t0:.1f}s)")
    return rows


def _medians(rows, field):
    out = []
    for n in (2**12, 2**15, 2**18):
        vals = [r[field] / (n if field == "S_max" else 1) for r in rows if r["n"] == n]
        out.append(float(np.median(vals)))
    return out


def test_c5_skeleton_bounds_decrease(coupling_rows):
    t0 = time.perf_counter()
    dis = _medians(coupling_rows, "dis_bound")
    disc = _medians(coupling_rows, "discrepancy")
    ok = dis[0] > dis[1] > dis[2] and disc[0] > disc[1] > disc[2]
    _line(
        "median distortion bound and discrepancy strictly decrease over n",
        ok,
        f"dis {dis[0]:.3f}>{dis[1]:.3f}>{dis[2]:.3f}; disc {disc[0]:.4f}>{disc[1]:.4f}>{disc[2]:.4f}",
        t0,
    )
    assert ok, (dis, disc)


def test_c6_pendant_and_prokhorov_decrease(coupling_rows):
    t0 = time.perf_counter()
    d = _medians(coupling_rows, "D_scaled")
    pk = _medians(coupling_rows, "prokhorov_bound")
    sm = _medians(coupling_rows, "S_max")  # scaled by n inside _medians
    ok = (
        d[0] > d[1] > d[2]
        and pk[0] > pk[1] > pk[2]
        and sm[0] > sm[1] > sm[2]
    )
    _line(
        "median pendant depth, Prokhorov bound, pendant mass strictly decrease",
        ok,
        f"D {d[0]:.3f}>{d[1]:.3f}>{d[2]:.3f}; prok {pk[0]:.3f}>{pk[1]:.3f}>{pk[2]:.3f}; "
        f"S/n {sm[0]:.4f}>{sm[1]:.4f}>{sm[2]:.4f}",
        t0,
    )
    assert ok, (d, pk, sm)


def test_c7_tail_and_event_bounds():
    t0 = time.perf_counter()
    reports = suite_tails(2, SEED, reps_tail=10**6, reps_event=10**4, workers=1)
    ok = all(r.passed for r in reports)
    vacuous = [r.name for r in reports if r.detail.get("vacuous_bound")]
    _line(
        "concentration/tail bounds at 1e6 (tails) and 1e4 (events)",
        ok,
        f"{len(reports)} checks; vacuous bounds flagged: {len(vacuous)}",
        t0,
    )
    for name in vacuous:
        print(f"      note: bound vacuous at these parameters -> {name}")
    assert ok, [r.name for r in reports if not r.passed]


def test_c8_urn_moment_slopes():
    t0 = time.perf_counter()
    cfg = ExperimentConfig(
        command="urnmoments",
        ells=(2,),
        n_grid=tuple(2**p for p in range(10, 15)),
        k_schedule="n15",
        eps_schedule="kinv",
        reps=2000,
        seed=SEED,
        out="",
        ks=(32, 64, 128, 256),
    )
    rows, slopes = experiment_urnmoments(cfg, 1)
    alpha = alpha_of(2)
    n_max = str(2**14)
    bad = []
    for model, k_target in (("U", -alpha), ("M", 1 / (2 + 1))):
        fits = slopes[f"{model}_ell2"]
        for k, fit in fits["in_n"].items():
            if abs(fit["slope"] - alpha) > 0.05:
                bad.append(f"{model} in n at k={k}: {fit['slope']:.3f}")
        sk = fits["in_k"][n_max]["slope"]
        if abs(sk - k_target) > 0.07:
            bad.append(f"{model} in k at n={n_max}: {sk:.3f} vs {k_target:.3f}")
    u_k = slopes["U_ell2"]["in_k"][n_max]["slope"]
    m_k = slopes["M_ell2"]["in_k"][n_max]["slope"]
    ok = not bad
    _line(
        "urn moment slopes: n-exponent alpha+-0.05, k-exponents -alpha/+1/(ell+1)+-0.07",
        ok,
        f"U in k: {u_k:.3f} (want {-alpha:.3f}); M in k: {m_k:.3f} (want {1/3:.3f})",
        t0,
    )
    assert ok, bad


def test_c9_reports_identical_across_worker_counts(tmp_path):
    t0 = time.perf_counter()
    cases = [
        ("check", ["check", "--suite", "oracle", "--ell", "2", "--n", "4",
                   "--reps", "4000", "--seed", str(SEED)]),
        ("check", ["check", "--suite", "urn", "--ell", "2",
                   "--reps", "3000", "--seed", str(SEED)]),
        ("check", ["check", "--suite", "distributional", "--ell", "2",
                   "--reps", "20000", "--seed", str(SEED)]),
        ("check", ["check", "--suite", "tails", "--ell", "2",
                   "--reps", "100000", "--seed", str(SEED)]),
        ("experiment", ["experiment", "coupling", "--ell", "2", "--npow", "8:10",
                        "--reps", "8", "--seed", str(SEED)]),
        ("experiment", ["experiment", "exponent", "--ell", "2", "--npow", "8:12",
                        "--reps", "8", "--seed", str(SEED)]),
    ]
    diffs = []
    for i, (kind, args) in enumerate(cases):
        blobs = []
        for w in (1, 3):
            out = tmp_path / f"case{i}_w{w}.{'json' if kind == 'check' else 'csv'}"
            code = run_cli(args + ["--workers", str(w), "--out", str(out)])
            assert code in (0, 1)
            blobs.append(out.read_bytes())
        if blobs[0] != blobs[1]:
            diffs.append(args[:2])
    ok = not diffs
    _line(
        "same seed -> byte-identical reports for 1 vs 3 workers (6 cases)",
        ok,
        "4 check suites + 2 experiments",
        t0,
    )
    assert ok, diffs
