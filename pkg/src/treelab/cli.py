"""Command-line front end: sampling, pre-registered check suites, experiments.

Subcommands: grow, linebreak, couple, urn, check, experiment.  Every output
file starts with version / config-hash / seed metadata and is byte-identical
for a fixed (config, seed) regardless of worker count: replicates are cut
into fixed-size chunks, each chunk owns a random stream derived from its
index alone, and one collector writes results in chunk order.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from . import __version__
from .embellish import edge_lengths, embellish, to_growth_tree
from .embellish import to_json as embellished_to_json
from .growth import branch_lengths, depth_profile, grow, spanned_subtree
from .growth import to_csv as growth_to_csv
from .metrics import experiment_row, joint_profile_batch, pendant_stats
from .metrics import EXPERIMENT_FIELDS
from .samplers import CutSequence, RngStream, alpha_of, derive_stream_id
from .skeleton import build_skeleton
from .skeleton import to_json as skeleton_to_json
from .statharness import (
    TestReport,
    concentration_check,
    enumerate_growth,
    enumerate_urn,
    event_frequency_F,
    exact_law_test,
    exponent_fit,
    ks_distance_test,
    two_sample_test,
)
from .urns import run_classical, run_imm_urn, run_infinite_urn, run_mod_urn
from .urns import two_stage_sample, urn_moment_scan

# Stream domains: every subcommand/suite derives its streams from its own
# constant, so no two commands ever share randomness.
(
    _D_GROW,
    _D_LINEBREAK,
    _D_COUPLE,
    _D_URN,
    _D_ORACLE_GROW,
    _D_ORACLE_EMB,
    _D_URN_EXACT,
    _D_URN_MC_GROW,
    _D_URN_MC_URN,
    _D_DIST,
    _D_TAILS,
    _D_EXPONENT,
    _D_COUPLING,
    _D_URNMOM,
) = range(1, 15)

_CHUNK = 1024

K_SCHEDULES = {
    "n15": lambda n: max(1, math.ceil(n ** 0.2)),
    "n110": lambda n: max(1, math.ceil(n ** 0.1)),
}

EPS_SCHEDULES = {
    "kinv": lambda k, ell: float(k) ** (-1.0 / (ell + 1)),
    "kinv12": lambda k, ell: float(k) ** (-1.0 / (12 * (ell + 1))),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run: grids, schedules, replication and output."""

    command: str
    ells: tuple[int, ...]
    n_grid: tuple[int, ...]
    k_schedule: str
    eps_schedule: str
    reps: int
    seed: int
    out: str
    fmt: str = "csv"
    ks: tuple[int, ...] = (4, 8, 16, 32)

    def __post_init__(self) -> None:
        if not self.ells:
            raise ValueError("ell grid must be nonempty")
        if not self.n_grid:
            raise ValueError("n grid must be nonempty")
        if not self.ks or any(k < 1 for k in self.ks):
            raise ValueError(f"k grid must be nonempty positive ints, got {self.ks}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if self.k_schedule not in K_SCHEDULES:
            raise ValueError(f"unknown k schedule {self.k_schedule!r}")
        if self.eps_schedule not in EPS_SCHEDULES:
            raise ValueError(f"unknown eps schedule {self.eps_schedule!r}")


# ---------------------------------------------------------------------------
# Output plumbing


def _config_hash(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _meta(cfg: dict) -> dict:
    return {
        "version": __version__,
        "config_hash": _config_hash(cfg),
        "seed": cfg.get("seed", 0),
        "config": dict(cfg),
    }


def _comment_lines(cfg: dict) -> list[str]:
    m = _meta(cfg)
    return [
        f"version {m['version']}",
        f"config {m['config_hash']}",
        f"seed {m['seed']}",
    ]


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _write_csv(path: str, fieldnames, rows, cfg: dict) -> None:
    lines = [f"# {c}" for c in _comment_lines(cfg)]
    lines.append(",".join(fieldnames))
    for row in rows:
        lines.append(",".join(_fmt_cell(row[f]) for f in fieldnames))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _report_doc(reports: list[TestReport], cfg: dict) -> dict:
    return {"meta": _meta(cfg), "reports": [r.to_dict() for r in reports]}


def _print_reports(reports: list[TestReport]) -> None:
    for r in reports:
        flag = "PASS" if r.passed else "FAIL"
        print(
            f"{flag}  {r.name}: statistic {r.statistic:.6g} "
            f"{r.op} threshold {r.threshold:.6g} (n={r.sample_size})"
        )


# ---------------------------------------------------------------------------
# Worker pool: tasks are plain tuples handled by a module-level runner, so
# the result of a run depends only on (seed, task list), never on scheduling.


def _run_task(task: tuple):
    kind = task[0]
    if kind == "oracle":
        _, route, ell, n, k, seed, chunk_id, count = task
        return _oracle_chunk(route, ell, n, k, seed, chunk_id, count)
    if kind == "urn_pair":
        _, route, ell, k, n, seed, chunk_id, count = task
        return _urn_pair_chunk(route, ell, k, n, seed, chunk_id, count)
    if kind == "exp_row":
        _, ell, n, k, eps, rep, seed = task
        r = RngStream(seed, derive_stream_id(_D_COUPLING, ell, n, rep))
        return experiment_row(ell, n, k, eps, rep, r)
    if kind == "height":
        _, ell, n, reps, seed = task
        return _height_median(ell, n, reps, seed)
    raise ValueError(f"unknown task kind {kind!r}")


def _map_tasks(tasks: list[tuple], workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_run_task, tasks))


def _chunk_specs(reps: int, chunk: int = _CHUNK) -> list[tuple[int, int]]:
    return [(cid, min(chunk, reps - cid * chunk)) for cid in range((reps + chunk - 1) // chunk)]


# ---------------------------------------------------------------------------
# Suite: oracle (exact joint law of the small tree vs both samplers)


def _joint_stat(t) -> tuple[int, int, int, int]:
    d = depth_profile(t)
    ps = pendant_stats(t, 1)
    l1, l2 = int(t.leaf_ids[0]), int(t.leaf_ids[1])
    return (int(d[l1]), int(d[l2]), ps["D_raw"], ps["S_max"])


def _oracle_chunk(route: str, ell: int, n: int, k: int, seed: int, chunk_id: int, count: int):
    dom = _D_ORACLE_GROW if route == "growth" else _D_ORACLE_EMB
    r = RngStream(seed, derive_stream_id(dom, ell, n, chunk_id))
    nv = n + n // ell + 2
    parents = np.empty((count, nv), dtype=np.int64)
    if route == "growth":
        for j in range(count):
            parents[j] = grow(ell, n, r).parent
    else:
        for j in range(count):
            parents[j] = to_growth_tree(embellish(ell, n, r)).parent
    return joint_profile_batch(parents, ell, k)


def suite_oracle(ell: int, n: int, reps: int, seed: int, workers: int) -> list[TestReport]:
    """Exact joint law (leaf depths, pendant height, pendant size) vs Monte Carlo."""
    law = enumerate_growth(ell, n, _joint_stat)
    reports = []
    for route, label in (("growth", "growth chain"), ("coupled", "coupled construction")):
        tasks = [
            ("oracle", route, ell, n, 1, seed, cid, cnt)
            for cid, cnt in _chunk_specs(reps)
        ]
        samples = np.vstack(_map_tasks(tasks, workers))
        reports.append(
            exact_law_test(
                f"joint profile law, {label} (ell={ell}, n={n})",
                samples,
                law,
                seed=seed,
            )
        )
    return reports


# ---------------------------------------------------------------------------
# Suite: urn (growth/urn correspondence)


def _urn_pair_chunk(route: str, ell: int, k: int, n: int, seed: int, chunk_id: int, count: int):
    dom = _D_URN_MC_GROW if route == "growth" else _D_URN_MC_URN
    r = RngStream(seed, derive_stream_id(dom, ell, k, n, chunk_id))
    out = np.empty((count, 2), dtype=np.int64)
    if route == "growth":
        for j in range(count):
            t = grow(ell, n, r)
            out[j, 0] = spanned_subtree(t, k).edge_count
            out[j, 1] = branch_lengths(t, k)[k - 1]
    else:
        for j in range(count):
            out[j] = two_stage_sample(ell, k, n, r)
    return out


def suite_urn(ell: int, reps: int, seed: int, workers: int) -> list[TestReport]:
    """Branch counts: exact growth/urn equality, then the two-stage sampler."""
    reports = []
    for n in (4, 6):
        law_growth = enumerate_growth(
            ell, n, lambda t: tuple(int(x) for x in branch_lengths(t, t.n_leaves))
        )
        law_urn = enumerate_urn("infinite", ell, {}, n, lambda state: state)
        equal = law_growth.outcomes == law_urn.outcomes
        reports.append(
            TestReport(
                name=f"branch-count law: growth enumeration == urn enumeration (ell={ell}, n={n})",
                statistic=1.0 if equal else 0.0,
                threshold=0.5,
                op=">",
                passed=equal,
                sample_size=len(law_growth.outcomes),
                seed=seed,
                detail={"comparison": "exact rational equality"},
            )
        )
    k, n = 2, 40
    chunks = _chunk_specs(reps)
    a = np.vstack(_map_tasks([("urn_pair", "growth", ell, k, n, seed, cid, cnt) for cid, cnt in chunks], workers))
    b = np.vstack(_map_tasks([("urn_pair", "urn", ell, k, n, seed, cid, cnt) for cid, cnt in chunks], workers))
    reports.append(
        two_sample_test(
            f"(M, U) pair at ell={ell}, k={k}, n={n}: growth vs two-stage urn",
            a,
            b,
            seed=seed,
        )
    )
    return reports


# ---------------------------------------------------------------------------
# Suite: distributional (cut laws, Dirichlet fragmentation, marker Binomials,
# de Finetti)


def suite_distributional(ell: int, reps: int, seed: int, workers: int) -> list[TestReport]:
    reports = []

    # Cut magnitudes: C_k**(ell+1) is a sum of k unit exponentials.
    for k in (1, 5, 20):
        r = RngStream(seed, derive_stream_id(_D_DIST, ell, 1, k))
        g = r.exponential((reps, k)).sum(axis=1)
        reports.append(
            ks_distance_test(
                f"cut law: C_{k}^(ell+1) vs Gamma({k},1)",
                g,
                sps.gamma(k).cdf,
                0.01,
                seed=seed,
            )
        )

    # Edge fragmentation: with n = 2*ell markers the skeleton has K = 3
    # branches, and the n + K edge lengths over C_K are a flat Dirichlet;
    # check all first and second moments within 3 sigma.
    r = RngStream(seed, derive_stream_id(_D_DIST, ell, 2, 0))
    n_frag = 2 * ell
    dim = n_frag + 3
    X = np.empty((reps, dim))
    for i in range(reps):
        e = embellish(ell, n_frag, r)
        X[i] = edge_lengths(e) / float(e.base.cuts.cuts[-1])
    zs = []
    mean_t = 1.0 / dim
    se = X.std(axis=0, ddof=1) / math.sqrt(reps)
    zs.extend(np.abs(X.mean(axis=0) - mean_t) / se)
    second_t = np.full((dim, dim), 1.0 / (dim * (dim + 1)))
    np.fill_diagonal(second_t, 2.0 / (dim * (dim + 1)))
    prods = X[:, :, None] * X[:, None, :]
    se2 = prods.std(axis=0, ddof=1) / math.sqrt(reps)
    se2[se2 == 0.0] = np.inf  # diagonal of a 2-dim product can be degenerate
    zs.extend((np.abs(prods.mean(axis=0) - second_t) / se2).ravel())
    reports.append(
        TestReport(
            name=f"edge fragmentation Dirichlet moments (ell={ell}, K=3)",
            statistic=float(np.max(zs)),
            threshold=3.0,
            op="<",
            passed=bool(np.max(zs) < 3.0),
            sample_size=reps,
            seed=seed,
            detail={
                "moments_checked": len(zs),
                "note": "max |z| over ~50 moments; exceeds 3 with ~14% chance "
                "even under the true law, so rerun marginal failures at "
                "higher reps before reading anything into them",
            },
        )
    )

    # Marker increments on a frozen skeleton: stage j adds Binomial(ell,
    # |S|/C_j) markers to a fixed segment, independently across stages.
    n6 = 3 * ell
    frozen = CutSequence(ell=ell, cuts=1.0 + 0.55 * np.arange(4))
    s_hi = 0.8
    r = RngStream(seed, derive_stream_id(_D_DIST, ell, 3, 0))
    n_stages = 3
    stages = np.arange(n6) // ell
    incs = np.empty((reps, n_stages), dtype=np.int64)
    for i in range(reps):
        e = embellish(ell, n6, r, cuts=frozen)
        on_seg = (e.branch_of_step[1:] == 1) & (e.offset_of_step[1:] < s_hi)
        incs[i] = np.bincount(stages[on_seg], minlength=n_stages)
    carr = frozen.cuts
    for j in range(n_stages):
        p = s_hi / float(carr[j])
        obs = np.bincount(incs[:, j], minlength=ell + 1)
        expected = reps * np.array([sps.binom.pmf(x, ell, p) for x in range(ell + 1)])
        chi = sps.chisquare(obs, expected * (obs.sum() / expected.sum()))
        reports.append(
            TestReport(
                name=f"marker increment stage {j + 1} vs Binomial({ell}, {p:.4f})",
                statistic=float(chi.pvalue),
                threshold=0.001,
                op=">",
                passed=bool(chi.pvalue > 0.001),
                sample_size=reps,
                seed=seed,
            )
        )
    table = np.zeros((ell + 1, ell + 1), dtype=np.int64)
    for a_, b_ in incs[:, :2]:
        table[a_, b_] += 1
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    chi2 = sps.chi2_contingency(table)
    reports.append(
        TestReport(
            name="marker increments independent across stages 1,2",
            statistic=float(chi2.pvalue),
            threshold=0.001,
            op=">",
            passed=bool(chi2.pvalue > 0.001),
            sample_size=reps,
            seed=seed,
        )
    )

    # de Finetti: classical (1,1) urn white counts are 1 + Binomial(m, U)
    # with U uniform.
    m = 30
    r = RngStream(seed, derive_stream_id(_D_DIST, ell, 4, 0))
    a = np.empty(reps, dtype=np.int64)
    for i in range(reps):
        a[i] = run_classical(1, 1, m, r)
    r2 = RngStream(seed, derive_stream_id(_D_DIST, ell, 4, 1))
    mix = r2.uniform(reps)
    b = 1 + (r2.uniform((reps, m)) < mix[:, None]).sum(axis=1)
    reports.append(
        two_sample_test(
            f"de Finetti: classical (1,1) urn after {m} draws vs Beta-Binomial",
            a,
            b.astype(np.int64),
            seed=seed,
        )
    )
    return reports


# ---------------------------------------------------------------------------
# Suite: tails (cut tail bound, regularity event, segment concentration)


def suite_tails(
    ell: int,
    seed: int,
    reps_tail: int = 10**6,
    reps_event: int = 10**4,
    workers: int = 1,
) -> list[TestReport]:
    reports = []
    # P(|C_k^(ell+1) - k| >= k^(3/4)) <= 2 exp(-sqrt(k)/4) for k >= (7/3)^4.
    for k in (50, 100, 200):
        r = RngStream(seed, derive_stream_id(_D_TAILS, ell, 1, k))
        hits = 0
        done = 0
        while done < reps_tail:
            mreps = min(200_000, reps_tail - done)
            g = r.exponential((mreps, k)).sum(axis=1)
            hits += int((np.abs(g - k) >= k**0.75).sum())
            done += mreps
        freq = hits / reps_tail
        bound = 2.0 * math.exp(-math.sqrt(k) / 4.0)
        reports.append(
            TestReport(
                name=f"cut tail at k={k}: frequency <= 2 exp(-sqrt(k)/4)",
                statistic=freq,
                threshold=bound,
                op="<",
                passed=bool(freq <= bound),
                sample_size=reps_tail,
                seed=seed,
                detail={"inequality": "<="},
            )
        )

    # Reciprocal-cut bracket: 1/C_k within (1 -+ 2 k^(-1/4)/(ell+1)) of
    # k^(-1/(ell+1)) except on the same tail event.
    k = 100
    r = RngStream(seed, derive_stream_id(_D_TAILS, ell, 2, k))
    g = r.exponential((10**5, k)).sum(axis=1)
    inv_c = g ** (-1.0 / (ell + 1))
    center = float(k) ** (-1.0 / (ell + 1))
    half = 2.0 / (ell + 1) * k ** (-0.25)
    freq_in = float(
        ((inv_c > center * (1 - half)) & (inv_c < center * (1 + half))).mean()
    )
    lower = 1.0 - 2.0 * math.exp(-math.sqrt(k) / 4.0)
    reports.append(
        TestReport(
            name=f"reciprocal cut bracket at k={k}",
            statistic=freq_in,
            threshold=lower,
            op=">",
            passed=bool(freq_in >= lower),
            sample_size=10**5,
            seed=seed,
            detail={"inequality": ">="},
        )
    )

    # Regularity event frequency vs its analytic lower bound (vacuous for
    # small k; reported, not hidden).
    r = RngStream(seed, derive_stream_id(_D_TAILS, ell, 3, 0))
    d = event_frequency_F(ell, 64, 2**15, reps_event, r)
    reports.append(
        TestReport(
            name=f"regularity event frequency at ell={ell}, k=64, n=2^15",
            statistic=d["frequency"],
            threshold=d["bound"],
            op=">",
            passed=d["passed"],
            sample_size=reps_event,
            seed=seed,
            detail={"vacuous_bound": d["vacuous"], "inequality": ">="},
        )
    )

    # Segment concentration: scaled marker count on a fixed root segment.
    r = RngStream(seed, derive_stream_id(_D_TAILS, ell, 4, 0))
    n, kc = 2**14, 32
    eps_floor = 80.0 * alpha_of(ell) * kc ** (1.0 / (ell + 1)) * n ** (-0.25)
    d = concentration_check(ell, kc, n, (0.0, 0.5), eps_floor * 1.05, reps_event, r)
    reports.append(
        TestReport(
            name=f"segment concentration at ell={ell}, k={kc}, n=2^14",
            statistic=d["frequency"],
            threshold=d["bound"],
            op="<",
            passed=d["passed"],
            sample_size=reps_event,
            seed=seed,
            detail={
                "vacuous_bound": d["vacuous"],
                "eps": d["eps"],
                "eps_floor": d["eps_floor"],
                "inequality": "<=",
            },
        )
    )
    # The scaled count's mean carries a genuine O(n^(-2 alpha)) finite-n bias
    # (boundary terms of the harmonic cut sum), so compare relatively rather
    # than against the Monte Carlo standard error, which is much smaller.
    rel = abs(d["mhat_mean"] / d["segment_length"] - 1.0)
    reports.append(
        TestReport(
            name="segment scaled count mean matches its length to 2%",
            statistic=float(rel),
            threshold=0.02,
            op="<",
            passed=bool(rel < 0.02),
            sample_size=reps_event,
            seed=seed,
            detail={
                "mhat_mean": d["mhat_mean"],
                "mhat_stderr": d["mhat_stderr"],
                "segment_length": d["segment_length"],
            },
        )
    )
    return reports


SUITES = {
    "oracle": "exact joint law of the small tree vs both samplers",
    "urn": "growth/urn correspondence, exact and Monte Carlo",
    "distributional": "cut, Dirichlet, Binomial-increment and de Finetti laws",
    "tails": "tail bounds, regularity event, segment concentration",
}


def run_suite(
    suite: str, ell: int, n: int, reps: int, seed: int, workers: int
) -> list[TestReport]:
    if suite == "oracle":
        return suite_oracle(ell, n, reps, seed, workers)
    if suite == "urn":
        return suite_urn(ell, reps, seed, workers)
    if suite == "distributional":
        return suite_distributional(ell, reps, seed, workers)
    if suite == "tails":
        return suite_tails(ell, seed, reps_tail=max(reps, 10**4), reps_event=max(reps // 100, 10**3), workers=workers)
    raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")


# ---------------------------------------------------------------------------
# Experiments


def _height_median(ell: int, n: int, reps: int, seed: int) -> float:
    r = RngStream(seed, derive_stream_id(_D_EXPONENT, ell, n))
    hs = np.empty(reps, dtype=np.int64)
    for i in range(reps):
        hs[i] = int(depth_profile(grow(ell, n, r)).max())
    return float(np.median(hs))


def experiment_exponent(cfg: ExperimentConfig, workers: int) -> list[dict]:
    rows: list[dict] = []
    for ell in cfg.ells:
        tasks = [("height", ell, n, cfg.reps, cfg.seed) for n in cfg.n_grid]
        medians = _map_tasks(tasks, workers)
        fit = exponent_fit(list(zip(cfg.n_grid, medians)))
        for n, med in zip(cfg.n_grid, medians):
            rows.append(
                {
                    "ell": ell,
                    "n": n,
                    "reps": cfg.reps,
                    "median_height": med,
                    "slope": fit["slope"],
                    "stderr": fit["stderr"],
                    "alpha": alpha_of(ell),
                }
            )
    return rows


EXPONENT_FIELDS = ("ell", "n", "reps", "median_height", "slope", "stderr", "alpha")


def experiment_coupling(cfg: ExperimentConfig, workers: int) -> list[dict]:
    k_of = K_SCHEDULES[cfg.k_schedule]
    eps_of = EPS_SCHEDULES[cfg.eps_schedule]
    tasks = []
    for ell in cfg.ells:
        for n in cfg.n_grid:
            k = k_of(n)
            eps = eps_of(k, ell)
            for rep in range(cfg.reps):
                tasks.append(("exp_row", ell, n, k, eps, rep, cfg.seed))
    return _map_tasks(tasks, workers)


def experiment_urnmoments(cfg: ExperimentConfig, workers: int) -> tuple[list[dict], dict]:
    rows: list[dict] = []
    slopes: dict = {}
    ks = list(cfg.ks)
    ns = list(cfg.n_grid)
    for ell in cfg.ells:
        need = max(ks) * ell
        usable = [n for n in ns if n >= need]
        if len(set(usable)) < 3:
            raise ValueError(
                f"urnmoments at ell={ell} needs at least 3 grid sizes >= {need}"
            )
        grid = {"ell": ell, "k": ks, "n": usable, "reps": cfg.reps}
        for model in ("U", "M"):
            r = RngStream(cfg.seed, derive_stream_id(_D_URNMOM, ell, 1 if model == "U" else 2))
            scan = urn_moment_scan(model, 1, grid, r)
            rows.extend(scan["rows"])
            slopes[f"{model}_ell{ell}"] = {
                "in_n": {str(k): v for k, v in scan["slopes"]["in_n"].items()},
                "in_k": {str(n): v for n, v in scan["slopes"]["in_k"].items()},
            }
    return rows, slopes


URNMOM_FIELDS = ("model", "ell", "p", "k", "n", "t", "mean", "stderr", "reps")

EXPERIMENTS = {
    "exponent": "median-height scaling slope per ell",
    "coupling": "distortion/discrepancy/pendant/Prokhorov bounds over an n grid",
    "urnmoments": "urn moment scans with log-log slopes",
}


# ---------------------------------------------------------------------------
# Argument parsing and dispatch


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x != "")


def _parse_npow(text: str) -> tuple[int, ...]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return tuple(2**p for p in range(int(lo), int(hi) + 1))
    return tuple(2 ** int(p) for p in text.split(","))


def _default_seed() -> int:
    return int(os.environ.get("TREELAB_SEED", "0"))


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="treelab",
        description="Grow random trees, build their continuum limits, and check the laws that couple them.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grow", help="sample the growth chain, write a parent-array CSV")
    g.add_argument("--ell", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=_default_seed())
    g.add_argument("--out", required=True)

    lb = sub.add_parser("linebreak", help="sample a line-breaking skeleton, write JSON")
    lb.add_argument("--ell", type=int, required=True)
    lb.add_argument("--k", type=int, required=True, help="number of branches")
    lb.add_argument("--seed", type=int, default=_default_seed())
    lb.add_argument("--out", required=True)

    cp = sub.add_parser("couple", help="sample a marker-decorated skeleton, write JSON (optionally the grown tree too)")
    cp.add_argument("--ell", type=int, required=True)
    cp.add_argument("--n", type=int, required=True)
    cp.add_argument("--seed", type=int, default=_default_seed())
    cp.add_argument("--out", required=True)
    cp.add_argument("--growth-out", default=None, help="also write the coupled tree as a parent CSV")

    u = sub.add_parser("urn", help="run one urn trajectory, write the final counts as CSV")
    u.add_argument("--model", choices=("infinite", "immigration", "classical", "modified"), required=True)
    u.add_argument("--ell", type=int, default=2)
    u.add_argument("--steps", type=int, required=True)
    u.add_argument("--b", type=int, default=1, help="initial black count (two-color models)")
    u.add_argument("--w", type=int, default=1, help="initial white count (two-color models)")
    u.add_argument("--mode", default="black-immigration", choices=("none", "black-immigration", "chosen-color-bonus"))
    u.add_argument("--seed", type=int, default=_default_seed())
    u.add_argument("--out", required=True)

    c = sub.add_parser("check", help="run a pre-registered check suite")
    c.add_argument("--suite", choices=sorted(SUITES), required=True)
    c.add_argument("--ell", type=int, default=2)
    c.add_argument("--n", type=int, default=4, help="tree size for the oracle suite")
    c.add_argument("--reps", type=int, default=10**5)
    c.add_argument("--seed", type=int, default=_default_seed())
    c.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    c.add_argument("--out", default=None, help="write the TestReport JSON here")

    e = sub.add_parser("experiment", help="run a replicated experiment, write a CSV table")
    e.add_argument("name", choices=sorted(EXPERIMENTS))
    e.add_argument("--ell", default="2", help="comma-separated ell grid")
    e.add_argument("--npow", default="10:20", help="powers of two, lo:hi or comma list")
    e.add_argument("--k-schedule", default="n15", choices=sorted(K_SCHEDULES))
    e.add_argument("--eps-schedule", default="kinv", choices=sorted(EPS_SCHEDULES))
    e.add_argument("--ks", default="4,8,16,32", help="urnmoments: comma-separated k grid")
    e.add_argument("--reps", type=int, default=32)
    e.add_argument("--seed", type=int, default=_default_seed())
    e.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    e.add_argument("--out", required=True)
    e.add_argument("--slopes-out", default=None, help="urnmoments: write fitted slopes JSON here")
    return p


def run_cli(argv: list[str] | None = None) -> int:
    """Parse and dispatch; 0 on success, 1 on failed checks, 2 on usage errors."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if (exc.code or 0) == 0 else 2
    try:
        return _dispatch(args)
    except ValueError as exc:
        print(f"treelab {args.command}: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "grow":
        cfg = {"command": "grow", "ell": args.ell, "n": args.n, "seed": args.seed}
        r = RngStream(args.seed, derive_stream_id(_D_GROW, args.ell, args.n))
        t = grow(args.ell, args.n, r)
        with open(args.out, "w") as fh:
            fh.write(growth_to_csv(t, extra_comments=_comment_lines(cfg)))
        print(f"wrote {t.n_vertices} vertices to {args.out}")
        return 0

    if args.command == "linebreak":
        cfg = {"command": "linebreak", "ell": args.ell, "k": args.k, "seed": args.seed}
        r = RngStream(args.seed, derive_stream_id(_D_LINEBREAK, args.ell, args.k))
        s = build_skeleton(args.ell, args.k, r)
        doc = json.loads(skeleton_to_json(s))
        doc["meta"] = _meta(cfg)
        _write_json(args.out, doc)
        print(f"wrote {args.k}-branch skeleton to {args.out}")
        return 0

    if args.command == "couple":
        cfg = {"command": "couple", "ell": args.ell, "n": args.n, "seed": args.seed}
        r = RngStream(args.seed, derive_stream_id(_D_COUPLE, args.ell, args.n))
        e = embellish(args.ell, args.n, r)
        doc = json.loads(embellished_to_json(e))
        doc["meta"] = _meta(cfg)
        _write_json(args.out, doc)
        wrote = [args.out]
        if args.growth_out:
            t = to_growth_tree(e)
            with open(args.growth_out, "w") as fh:
                fh.write(growth_to_csv(t, extra_comments=_comment_lines(cfg)))
            wrote.append(args.growth_out)
        print(f"wrote coupled tree (n={args.n}) to {', '.join(wrote)}")
        return 0

    if args.command == "urn":
        cfg = {
            "command": "urn", "model": args.model, "ell": args.ell,
            "steps": args.steps, "b": args.b, "w": args.w, "mode": args.mode,
            "seed": args.seed,
        }
        model_idx = ("infinite", "immigration", "classical", "modified").index(args.model)
        r = RngStream(args.seed, derive_stream_id(_D_URN, model_idx, args.steps))
        rows: list[dict]
        if args.model == "infinite":
            res = run_infinite_urn(args.ell, args.steps, r)
            rows = [
                {"color": i + 1, "count": int(cnt)}
                for i, cnt in enumerate(res.counts)
            ]
            fields = ("color", "count")
        elif args.model == "immigration":
            res = run_imm_urn(args.ell, args.b, args.w, args.steps, args.mode, r)
            rows = [{"white": res.white, "black": res.black}]
            fields = ("white", "black")
        elif args.model == "classical":
            white = run_classical(args.b, args.w, args.steps, r)
            rows = [{"white": white, "black": args.b + args.steps - (white - args.w)}]
            fields = ("white", "black")
        else:
            res = run_mod_urn(args.ell, args.b, args.w, args.steps, r)
            # Color 0 is black (the spanned edges); 1.. are pendant components.
            rows = [{"color": 0, "count": res.black}] + [
                {"color": i + 1, "count": int(cnt)}
                for i, cnt in enumerate(res.colors)
            ]
            fields = ("color", "count")
        _write_csv(args.out, fields, rows, cfg)
        print(f"wrote {args.model} urn state after {args.steps} steps to {args.out}")
        return 0

    if args.command == "check":
        cfg = {
            "command": "check", "suite": args.suite, "ell": args.ell,
            "n": args.n, "reps": args.reps, "seed": args.seed,
        }
        reports = run_suite(args.suite, args.ell, args.n, args.reps, args.seed, args.workers)
        _print_reports(reports)
        if args.out:
            _write_json(args.out, _report_doc(reports, cfg))
            print(f"wrote {len(reports)} reports to {args.out}")
        return 0 if all(r.passed for r in reports) else 1

    if args.command == "experiment":
        ells = _parse_ints(args.ell)
        n_grid = _parse_npow(args.npow)
        cfg_obj = ExperimentConfig(
            command=args.name,
            ells=ells,
            n_grid=n_grid,
            k_schedule=args.k_schedule,
            eps_schedule=args.eps_schedule,
            reps=args.reps,
            seed=args.seed,
            out=args.out,
            ks=_parse_ints(args.ks),
        )
        cfg = {
            "command": args.name, "ells": list(ells), "n_grid": list(n_grid),
            "k_schedule": args.k_schedule, "eps_schedule": args.eps_schedule,
            "reps": args.reps, "seed": args.seed,
        }
        if args.name == "urnmoments":
            cfg["ks"] = list(cfg_obj.ks)
        if args.name == "exponent":
            rows = experiment_exponent(cfg_obj, args.workers)
            _write_csv(args.out, EXPONENT_FIELDS, rows, cfg)
        elif args.name == "coupling":
            rows = experiment_coupling(cfg_obj, args.workers)
            _write_csv(args.out, EXPERIMENT_FIELDS, rows, cfg)
        else:
            rows, slopes = experiment_urnmoments(cfg_obj, args.workers)
            _write_csv(args.out, URNMOM_FIELDS, rows, cfg)
            if args.slopes_out:
                _write_json(args.slopes_out, {"meta": _meta(cfg), "slopes": slopes})
        print(f"wrote {len(rows)} rows to {args.out}")
        return 0

    raise AssertionError("unreachable")


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
