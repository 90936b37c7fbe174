"""Exact-law oracles, statistical test kernels, and concentration checks.

The enumerators here are the ground truth for small cases: they walk every
choice path of the growth chain (equally likely by construction) or run an
exact state-space dynamic program over urn configurations with Fraction
probabilities.  They deliberately re-implement the transition rules rather
than calling the simulation kernels, so a bug in either side surfaces as a
law mismatch instead of being shared.

Statistical comparisons are pre-registered: discrete laws meet chi-square
tests, continuous ones meet Kolmogorov-Smirnov, and p-value thresholds are
fixed at module level (0.001) rather than tuned per test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import stats

from .samplers import RngStream, alpha_of, scale_c_of
from .growth import GrowthTree

__all__ = [
    "ExactLaw",
    "TestReport",
    "enumerate_growth",
    "enumerate_urn",
    "two_sample_test",
    "exact_law_test",
    "ks_distance_test",
    "exponent_fit",
    "event_frequency_F",
    "concentration_check",
    "PVALUE_THRESHOLD",
]

PVALUE_THRESHOLD = 0.001
_PATH_BUDGET = 10**7
_STATE_BUDGET = 10**6


@dataclass(frozen=True)
class ExactLaw:
    """A finitely supported law with exact rational probabilities."""

    outcomes: dict

    def __post_init__(self) -> None:
        total = sum(self.outcomes.values(), Fraction(0))
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if any(p < 0 for p in self.outcomes.values()):
            raise ValueError("negative probability")

    def support(self) -> list:
        return sorted(self.outcomes)

    def probabilities(self) -> np.ndarray:
        return np.array([float(self.outcomes[o]) for o in self.support()])

    def mean(self):
        """Exact mean for scalar integer outcomes."""
        return sum(Fraction(o) * p for o, p in self.outcomes.items())


@dataclass
class TestReport:
    """Outcome of one pre-registered statistical check."""

    name: str
    statistic: float
    threshold: float
    op: str  # ">" for p-values, "<" for distances
    passed: bool
    sample_size: int
    seed: int
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "op": self.op,
            "passed": self.passed,
            "sample_size": self.sample_size,
            "seed": self.seed,
            "detail": self.detail,
        }


def _report(name, statistic, threshold, op, sample_size, seed, **detail):
    passed = statistic > threshold if op == ">" else statistic < threshold
    return TestReport(
        name=name,
        statistic=float(statistic),
        threshold=float(threshold),
        op=op,
        passed=bool(passed),
        sample_size=int(sample_size),
        seed=int(seed),
        detail=detail,
    )


# ---------------------------------------------------------------------------
# Exact enumeration oracles.


def enumerate_growth(
    ell: int, n: int, statistic: Callable[[GrowthTree], object]
) -> ExactLaw:
    """Exact law of statistic(T(n)) by walking every choice path.

    At step m the chain has m + (m-1)//ell edges to choose from, so the path
    count is the product of those counts and every path has equal
    probability.  The transition is re-implemented here with plain lists
    (ids creation-ordered, split rewires the old child) independently of the
    sampling kernel.
    """
    if ell < 1 or n < 0:
        raise ValueError(f"need ell >= 1 and n >= 0, got ({ell}, {n})")
    counts = [m + (m - 1) // ell for m in range(1, n + 1)]
    total_paths = math.prod(counts)
    if total_paths > _PATH_BUDGET:
        raise ValueError(
            f"enumeration budget exceeded: {total_paths} paths > {_PATH_BUDGET}"
        )

    parent = [-1, 0]
    kind = [0, 2]
    creation = [0, 0]
    leaf_ids = [1]
    acc: dict = {}

    def build() -> GrowthTree:
        nv = len(parent)
        return GrowthTree(
            ell=ell,
            n=n,
            parent=np.array(parent, dtype=np.int64),
            kind=np.array(kind, dtype=np.uint8),
            creation=np.array(creation, dtype=np.int64),
            leaf_ids=np.array(leaf_ids, dtype=np.int64),
            edges=np.arange(1, nv, dtype=np.int64),
        )

    def recurse(m: int) -> None:
        if m > n:
            value = statistic(build())
            acc[value] = acc.get(value, 0) + 1
            return
        leaf_step = m % ell == 0
        v = len(parent)
        for c in range(1, counts[m - 1] + 1):
            old = parent[c]
            parent.append(old)
            parent[c] = v
            kind.append(1)
            creation.append(m)
            if leaf_step:
                parent.append(v)
                kind.append(2)
                creation.append(m)
                leaf_ids.append(v + 1)
            recurse(m + 1)
            if leaf_step:
                leaf_ids.pop()
                parent.pop()
                kind.pop()
                creation.pop()
            parent.pop()
            kind.pop()
            creation.pop()
            parent[c] = old

    recurse(1)
    return ExactLaw(
        outcomes={v: Fraction(c, total_paths) for v, c in acc.items()}
    )


def enumerate_urn(
    model: str,
    ell: int,
    params: dict,
    t: int,
    statistic: Callable[[tuple], object],
) -> ExactLaw:
    """Exact law of statistic(final state) via a state-space DP.

    Models and their states:
      "infinite": state = tuple of color counts (color injected after every
                  ell-th draw); starts ((1,)).
      "classical": state = (black, white); params {"b", "w"}.
      "imm": state = (black, white) with every-ell-th-step extra ball;
             params {"b", "w", "mode"} (mode as in run_imm_urn).
      "mod": state = (black, colors tuple); params {"b", "w"}.

    Probabilities stay exact Fractions throughout.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if model == "infinite":
        states = {(1,): Fraction(1)}
    elif model in ("classical", "imm"):
        states = {(int(params["b"]), int(params["w"])): Fraction(1)}
    elif model == "mod":
        states = {(int(params["b"]), (int(params["w"]),)): Fraction(1)}
    else:
        raise ValueError(f"unknown model {model!r}")
    mode = params.get("mode", "black-immigration") if model == "imm" else None

    for s in range(1, t + 1):
        bonus_step = model != "classical" and ell >= 1 and s % ell == 0
        nxt: dict = {}

        def put(state, p):
            nxt[state] = nxt.get(state, Fraction(0)) + p

        for state, prob in states.items():
            if model == "infinite":
                counts = state
                tot = sum(counts)
                for i, c in enumerate(counts):
                    if c == 0:
                        continue
                    new = list(counts)
                    new[i] += 1
                    if bonus_step:
                        new.append(1)
                    put(tuple(new), prob * Fraction(c, tot))
            elif model in ("classical", "imm"):
                b, w = state
                tot = b + w
                for drew_white in (False, True):
                    c = w if drew_white else b
                    if c == 0:
                        continue
                    nb, nw = (b, w + 1) if drew_white else (b + 1, w)
                    if bonus_step and model == "imm":
                        if mode == "black-immigration":
                            nb += 1
                        elif mode == "chosen-color-bonus":
                            if drew_white:
                                nw += 1
                            else:
                                nb += 1
                        else:
                            raise ValueError(f"unknown mode {mode!r}")
                    put((nb, nw), prob * Fraction(c, tot))
            else:  # mod
                b, colors = state
                tot = b + sum(colors)
                if b > 0:
                    nc = colors + (1,) if bonus_step else colors
                    put((b + 1, nc), prob * Fraction(b, tot))
                for i, c in enumerate(colors):
                    if c == 0:
                        continue
                    new = list(colors)
                    new[i] += 2 if bonus_step else 1
                    put((b, tuple(new)), prob * Fraction(c, tot))
        states = nxt
        if len(states) > _STATE_BUDGET:
            raise ValueError(
                f"state budget exceeded at step {s}: {len(states)} states"
            )

    acc: dict = {}
    for state, prob in states.items():
        value = statistic(state)
        acc[value] = acc.get(value, Fraction(0)) + prob
    return ExactLaw(outcomes=acc)


# ---------------------------------------------------------------------------
# Statistical test kernels.


def _as_outcome_array(samples) -> list:
    """Normalize discrete samples to a list of hashable outcomes."""
    arr = np.asarray(samples)
    if arr.ndim == 1:
        return [int(x) for x in arr]
    return [tuple(int(x) for x in row) for row in arr]


def _merge_small_cells(labels, expected_list, observed_lists, min_expected=5.0):
    """Pool outcomes whose expected count falls below min_expected.

    Outcomes are sorted by expected count ascending and pooled into a single
    rest bucket until every remaining cell (including the rest bucket)
    clears the floor.  Deterministic given the inputs.
    """
    order = sorted(range(len(labels)), key=lambda i: (expected_list[i], str(labels[i])))
    pooled = []
    rest_exp = 0.0
    rest_obs = [0.0] * len(observed_lists)
    kept = []
    for i in order:
        if expected_list[i] < min_expected or (rest_exp and rest_exp < min_expected):
            rest_exp += expected_list[i]
            for j, obs in enumerate(observed_lists):
                rest_obs[j] += obs[i]
        else:
            kept.append(i)
    cells_exp = [expected_list[i] for i in kept]
    cells_obs = [[obs[i] for i in kept] for obs in observed_lists]
    if rest_exp > 0:
        cells_exp.append(rest_exp)
        for j in range(len(observed_lists)):
            cells_obs[j].append(rest_obs[j])
    return np.array(cells_exp), [np.array(o) for o in cells_obs]


def exact_law_test(
    name: str,
    samples,
    law: ExactLaw,
    threshold: float = PVALUE_THRESHOLD,
    seed: int = -1,
) -> TestReport:
    """Chi-square goodness of fit of discrete samples against an exact law."""
    outcomes = _as_outcome_array(samples)
    n = len(outcomes)
    support = law.support()
    index = {o: i for i, o in enumerate(support)}
    observed = np.zeros(len(support) + 1)
    for o in outcomes:
        observed[index.get(o, len(support))] += 1
    expected = np.array([float(law.outcomes[o]) * n for o in support] + [0.0])
    if observed[-1] > 0:
        # Sampled an outcome of probability zero: certain failure.
        return _report(name, 0.0, threshold, ">", n, seed,
                       impossible_outcomes=int(observed[-1]))
    exp_cells, (obs_cells,) = _merge_small_cells(
        support, list(expected[:-1]), [list(observed[:-1])]
    )
    if len(exp_cells) < 2:
        # Law is (effectively) a point mass and all samples matched it.
        return _report(name, 1.0, threshold, ">", n, seed, cells=1)
    stat, pvalue = stats.chisquare(obs_cells, exp_cells * (n / exp_cells.sum()))
    return _report(name, pvalue, threshold, ">", n, seed,
                   chi2=float(stat), cells=len(exp_cells))


def two_sample_test(
    name: str,
    a,
    b=None,
    exact: ExactLaw | None = None,
    threshold: float = PVALUE_THRESHOLD,
    seed: int = -1,
) -> TestReport:
    """Compare samples a against samples b or an exact law.

    Discrete data (integer dtype or tuple-valued) meets a chi-square
    contingency / goodness-of-fit test; continuous data meets a two-sample
    Kolmogorov-Smirnov test.  The statistic reported is the p-value.
    """
    if (b is None) == (exact is None):
        raise ValueError("provide exactly one of b= or exact=")
    if exact is not None:
        return exact_law_test(name, a, exact, threshold, seed)
    arr_a = np.asarray(a)
    arr_b = np.asarray(b)
    discrete = (
        arr_a.ndim > 1
        or np.issubdtype(arr_a.dtype, np.integer)
        and np.issubdtype(arr_b.dtype, np.integer)
    )
    if not discrete:
        stat, pvalue = stats.ks_2samp(arr_a, arr_b, method="asymp")
        return _report(name, pvalue, threshold, ">", arr_a.size + arr_b.size,
                       seed, ks=float(stat))
    oa = _as_outcome_array(arr_a)
    ob = _as_outcome_array(arr_b)
    support = sorted(set(oa) | set(ob))
    index = {o: i for i, o in enumerate(support)}
    ca = np.zeros(len(support))
    cb = np.zeros(len(support))
    for o in oa:
        ca[index[o]] += 1
    for o in ob:
        cb[index[o]] += 1
    # Pool on combined counts so the merge is symmetric in a and b.
    pooled = ca + cb
    exp_cells, (ma, mb) = _merge_small_cells(
        support, list(pooled), [list(ca), list(cb)], min_expected=10.0
    )
    if len(exp_cells) < 2:
        return _report(name, 1.0, threshold, ">", len(oa) + len(ob), seed, cells=1)
    stat, pvalue, dof, _ = stats.chi2_contingency(np.vstack([ma, mb]))
    return _report(name, pvalue, threshold, ">", len(oa) + len(ob), seed,
                   chi2=float(stat), dof=int(dof), cells=len(exp_cells))


def ks_distance_test(
    name: str,
    samples,
    cdf_or_samples,
    threshold: float,
    seed: int = -1,
) -> TestReport:
    """Kolmogorov-Smirnov distance check (statistic compared as '<')."""
    arr = np.asarray(samples, dtype=np.float64)
    if callable(cdf_or_samples):
        stat = stats.kstest(arr, cdf_or_samples).statistic
        n = arr.size
    else:
        other = np.asarray(cdf_or_samples, dtype=np.float64)
        stat = stats.ks_2samp(arr, other, method="asymp").statistic
        n = arr.size + other.size
    return _report(name, stat, threshold, "<", n, seed)


def exponent_fit(points) -> dict:
    """Least-squares slope of log y against log x.

    points: iterable of (x, y) with x, y > 0 and at least three distinct x.
    Returns {"slope", "intercept", "stderr"} where stderr is the usual
    OLS standard error of the slope (0.0 for a perfect fit).
    """
    pts = [(float(x), float(y)) for x, y in points]
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("exponent_fit needs strictly positive coordinates")
    xs = np.log([x for x, _ in pts])
    ys = np.log([y for _, y in pts])
    if np.unique(xs).size < 3:
        raise ValueError("exponent_fit needs at least three distinct x values")
    n = xs.size
    xm = xs.mean()
    ym = ys.mean()
    sxx = float(((xs - xm) ** 2).sum())
    slope = float(((xs - xm) * (ys - ym)).sum() / sxx)
    intercept = float(ym - slope * xm)
    resid = ys - (intercept + slope * xs)
    dof = max(n - 2, 1)
    stderr = float(np.sqrt(max(resid @ resid, 0.0) / dof / sxx))
    return {"slope": slope, "intercept": intercept, "stderr": stderr}


# ---------------------------------------------------------------------------
# Concentration-event checks for the cut sequence and marker counts.


def f_event_bound(ell: int, k: int, n: int) -> float:
    """Lower bound 1 - 2 sum_{m=k}^{floor(n/ell)} exp(-sqrt(m)/4) for the
    regularity event's probability.  May be negative (vacuous) for small k."""
    ms = np.arange(k, n // ell + 1, dtype=np.float64)
    return float(1.0 - 2.0 * np.exp(-np.sqrt(ms) / 4.0).sum())


def event_frequency_F(
    ell: int, k: int, n: int, reps: int, r: RngStream, chunk: int = 256
) -> dict:
    """Empirical frequency of the cut-sequence regularity event.

    The event asks that (i) the harmonic sum of 1/C_m for m = k..floor(n/ell)
    lies within (n/ell)^alpha * (1/alpha +- 5 n^(-1/4)) and (ii) C_k sits
    within 10 k^(1/(ell+1) - 1/4) of its typical value k^(1/(ell+1)).
    Reported alongside the analytic lower bound on its probability, which is
    flagged vacuous when negative.
    """
    if ell < 1 or k < 1 or reps < 1:
        raise ValueError("need ell >= 1, k >= 1, reps >= 1")
    n_cuts = n // ell
    if n_cuts < k:
        raise ValueError(f"degenerate range: floor(n/ell)={n_cuts} < k={k}")
    a = alpha_of(ell)
    center = (n / ell) ** a
    lo = center * (1.0 / a - 5.0 / n**0.25)
    hi = center * (1.0 / a + 5.0 / n**0.25)
    ck_dev = 10.0 * k ** (1.0 / (ell + 1) - 0.25)
    ck_center = k ** (1.0 / (ell + 1))
    hits = 0
    done = 0
    while done < reps:
        m = min(chunk, reps - done)
        e = r.exponential((m, n_cuts))
        cuts = np.cumsum(e, axis=1) ** (1.0 / (ell + 1))
        hs = (1.0 / cuts[:, k - 1 :]).sum(axis=1)
        ok = (hs >= lo) & (hs <= hi)
        ok &= np.abs(cuts[:, k - 1] - ck_center) < ck_dev
        hits += int(ok.sum())
        done += m
    freq = hits / reps
    bound = f_event_bound(ell, k, n)
    return {
        "ell": ell,
        "k": k,
        "n": n,
        "reps": reps,
        "frequency": freq,
        "bound": bound,
        "vacuous": bound < 0.0,
        "passed": freq >= bound,
        "seed": r.seed,
        "stream_id": r.stream_id,
    }


def concentration_check(
    ell: int,
    k: int,
    n: int,
    segment: tuple[float, float],
    eps: float,
    reps: int,
    r: RngStream,
    chunk: int = 128,
) -> dict:
    """Check the marker-count concentration inequality on a root segment.

    A base skeleton's first k cuts are drawn once and held fixed; the
    segment (f_lo, f_hi) is the sub-interval [f_lo*C_1, f_hi*C_1) of the
    first branch.  Each replicate then redraws the later cuts and all n
    markers, counts the vertices landing on the segment, and records whether
    the scaled count misses |S| by eps or more while the regularity event
    holds.  That joint frequency is compared against the Gaussian-type bound
    2 exp(-eps^2 n^alpha / (32 c k^(1/(ell+1)))).
    """
    if not (0.0 <= segment[0] < segment[1] <= 1.0):
        raise ValueError(f"segment must satisfy 0 <= lo < hi <= 1, got {segment}")
    if n // ell < k:
        raise ValueError(f"need floor(n/ell) >= k, got {n // ell} < {k}")
    # Markers of step m land uniformly on the first 1 + (m-1)//ell branches,
    # so the last (possibly partial) stage needs one cut beyond floor(n/ell)
    # when ell does not divide n.
    n_cuts = (n - 1) // ell + 1
    n_harm = n // ell  # the regularity event's harmonic sum stops here
    a = alpha_of(ell)
    c = scale_c_of(ell)
    eps_min = 80.0 * a * k ** (1.0 / (ell + 1)) * n ** (-0.25)
    if eps <= eps_min:
        raise ValueError(
            f"eps={eps} not above the validity floor {eps_min:.6g}"
        )
    base = np.cumsum(r.exponential(k))
    fixed_cuts = base ** (1.0 / (ell + 1))
    c1 = fixed_cuts[0]
    s_lo, s_hi = segment[0] * c1, segment[1] * c1
    s_len = s_hi - s_lo
    scale = c / n**a

    center = (n / ell) ** a
    lo_f = center * (1.0 / a - 5.0 / n**0.25)
    hi_f = center * (1.0 / a + 5.0 / n**0.25)
    ck_dev = 10.0 * k ** (1.0 / (ell + 1) - 0.25)
    ck_center = k ** (1.0 / (ell + 1))
    f_fixed_ok = abs(fixed_cuts[-1] - ck_center) < ck_dev

    stage_idx = (np.arange(n) // ell).astype(np.int64)  # 0-based cut index per step
    root_in = 1 if s_lo == 0.0 else 0

    hits = 0
    sum_mhat = 0.0
    sum_mhat2 = 0.0
    done = 0
    while done < reps:
        m = min(chunk, reps - done)
        extra = r.exponential((m, n_cuts - k)) if n_cuts > k else np.empty((m, 0))
        totals = base[-1] + np.cumsum(extra, axis=1)
        cuts = np.empty((m, n_cuts))
        cuts[:, :k] = fixed_cuts
        cuts[:, k:] = totals ** (1.0 / (ell + 1))
        u = r.uniform((m, n))
        pos = u * cuts[:, stage_idx]
        counts = ((pos >= s_lo) & (pos < s_hi)).sum(axis=1) + root_in
        mhat = scale * counts
        sum_mhat += float(mhat.sum())
        sum_mhat2 += float((mhat * mhat).sum())
        dev_ok = np.abs(mhat - s_len) >= eps
        hs = (1.0 / cuts[:, k - 1 : n_harm]).sum(axis=1)
        f_ok = (hs >= lo_f) & (hs <= hi_f) & f_fixed_ok
        hits += int((dev_ok & f_ok).sum())
        done += m
    freq = hits / reps
    bound = 2.0 * math.exp(-(eps**2) * n**a / (32.0 * c * k ** (1.0 / (ell + 1))))
    mean = sum_mhat / reps
    var = max(sum_mhat2 / reps - mean * mean, 0.0)
    return {
        "ell": ell,
        "k": k,
        "n": n,
        "segment": [segment[0], segment[1]],
        "segment_length": s_len,
        "eps": eps,
        "eps_floor": eps_min,
        "reps": reps,
        "frequency": freq,
        "bound": bound,
        "vacuous": bound < 1.0 / reps,
        "passed": freq <= bound,
        "mhat_mean": mean,
        "mhat_stderr": float(np.sqrt(var / reps)),
        "seed": r.seed,
        "stream_id": r.stream_id,
    }
