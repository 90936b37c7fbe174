"""Pólya urn models mirroring the growth chain's branch and pendant laws.

Four urns live here:

* the infinite-colors urn — draw-and-duplicate, with a new color injected
  after every ell-th draw; color i tracks the edge count of the i-th branch
  path of the growth chain, exactly;
* the two-color immigration urn — white tracks the spanned subtree's edge
  count when black immigrates every ell-th draw ("black-immigration" mode),
  and is the bonus-duplication urn of the pendant analysis in
  "chosen-color-bonus" mode;
* the classical two-color urn — the conditional law of one branch given the
  spanned total;
* the multicolor pendant urn — color i tracks the vertex count of the i-th
  pendant component hanging off the spanned subtree, with black for the
  spanned edges themselves.

All draw loops run in numba over pre-drawn uniforms; color selection uses a
Fenwick tree so a full trajectory costs O(t log colors).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .samplers import RngStream

__all__ = [
    "InfiniteUrn",
    "ImmUrn",
    "ModUrn",
    "run_infinite_urn",
    "run_imm_urn",
    "run_classical",
    "run_mod_urn",
    "two_stage_sample",
    "urn_moment_scan",
]


@dataclass
class InfiniteUrn:
    """Final state of the infinite-colors urn: counts[i-1] is color i."""

    ell: int
    counts: np.ndarray
    time: int

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def n_colors(self) -> int:
        return int(self.counts.size)


@dataclass
class ImmUrn:
    """Final state of a two-color urn with an every-ell-th-step bonus rule."""

    ell: int
    black: int
    white: int
    time: int

    @property
    def total(self) -> int:
        return self.black + self.white


@dataclass
class ModUrn:
    """Final state of the pendant-component urn.

    colors[i-1] counts color i (the i-th pendant component, in appearance
    order); first_seen[i-1] is the draw index at which it appeared (0 for
    color 1, present at the start).
    """

    ell: int
    black: int
    colors: np.ndarray
    first_seen: np.ndarray
    time: int

    @property
    def total(self) -> int:
        return self.black + int(self.colors.sum())


# ---------------------------------------------------------------------------
# Fenwick tree primitives (1-based indices) for weighted color selection.


@njit(cache=True)
def _fen_add(fen, i, delta):
    n = fen.shape[0] - 1
    while i <= n:
        fen[i] += delta
        i += i & (-i)


@njit(cache=True)
def _fen_prefix(fen, i):
    s = 0
    while i > 0:
        s += fen[i]
        i -= i & (-i)
    return s


@njit(cache=True)
def _fen_find(fen, target):
    """Smallest index whose prefix sum exceeds target (0-based target)."""
    n = fen.shape[0] - 1
    pos = 0
    bit = 1
    while bit * 2 <= n:
        bit *= 2
    rem = target
    while bit > 0:
        nxt = pos + bit
        if nxt <= n and fen[nxt] <= rem:
            pos = nxt
            rem -= fen[nxt]
        bit >>= 1
    return pos + 1


@njit(cache=True)
def _infinite_urn_kernel(ell, n, u, kmax, checkpoints):
    """Run the infinite-colors urn to time n.

    Returns (counts at n, snapshots) where snapshots[j, i] = count of color
    i+1 (i < kmax) right after step checkpoints[j].  Total ball count before
    step m is m + floor((m-1)/ell), deterministically, so the uniform u[m-1]
    is mapped straight to a ball index.
    """
    p_final = n // ell + 1
    fen = np.zeros(p_final + 1, np.int64)
    _fen_add(fen, 1, 1)
    total = 1
    p = 1
    n_checks = checkpoints.shape[0]
    snaps = np.zeros((n_checks, kmax), np.int64)
    j = 0
    while j < n_checks and checkpoints[j] == 0:
        snaps[j, 0] = 1
        j += 1
    for m in range(1, n + 1):
        target = int(u[m - 1] * total)
        if target >= total:
            target = total - 1
        c = _fen_find(fen, target)
        _fen_add(fen, c, 1)
        total += 1
        if m % ell == 0:
            p += 1
            _fen_add(fen, p, 1)
            total += 1
        while j < n_checks and checkpoints[j] == m:
            prev = 0
            for i in range(1, min(kmax, p) + 1):
                cur = _fen_prefix(fen, i)
                snaps[j, i - 1] = cur - prev
                prev = cur
            j += 1
    counts = np.empty(p, np.int64)
    prev = 0
    for i in range(1, p + 1):
        cur = _fen_prefix(fen, i)
        counts[i - 1] = cur - prev
        prev = cur
    return counts, snaps


def run_infinite_urn(ell: int, n: int, r: RngStream) -> InfiniteUrn:
    """Draw-and-duplicate for n steps; a new color enters after step m
    whenever ell divides m.  Starts from a single ball of color 1."""
    if ell < 1:
        raise ValueError(f"ell must be a positive integer, got {ell}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    u = r.uniform(n) if n > 0 else np.empty(0, dtype=np.float64)
    counts, _ = _infinite_urn_kernel(
        ell, n, u, 1, np.empty(0, dtype=np.int64)
    )
    return InfiniteUrn(ell=ell, counts=counts, time=n)


_IMM_MODES = {"none": 0, "black-immigration": 1, "chosen-color-bonus": 2}


@njit(cache=True)
def _two_color_kernel(white0, black0, t, ell, mode, u):
    w = white0
    b = black0
    for s in range(1, t + 1):
        tot = w + b
        drew_white = u[s - 1] * tot < w
        if drew_white:
            w += 1
        else:
            b += 1
        if ell > 0 and s % ell == 0:
            if mode == 1:
                b += 1
            elif mode == 2:
                if drew_white:
                    w += 1
                else:
                    b += 1
    return w, b


def run_imm_urn(
    ell: int, b: int, w: int, t: int, mode: str, r: RngStream
) -> ImmUrn:
    """Two-color draw-and-duplicate with an every-ell-th-step extra ball.

    mode "black-immigration": the extra ball is always black (white then
    tracks the spanned-subtree edge count of the growth chain).
    mode "chosen-color-bonus": the extra ball repeats the color just drawn
    (the bonus urn whose white marginal matches the largest-pendant urn).
    """
    if mode not in ("black-immigration", "chosen-color-bonus"):
        raise ValueError(f"unknown mode {mode!r}")
    if ell < 1:
        raise ValueError(f"ell must be a positive integer, got {ell}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if b < 0 or w < 0 or b + w < 1:
        raise ValueError(f"need nonnegative counts with b + w >= 1, got ({b}, {w})")
    u = r.uniform(t) if t > 0 else np.empty(0, dtype=np.float64)
    wf, bf = _two_color_kernel(w, b, t, ell, _IMM_MODES[mode], u)
    return ImmUrn(ell=ell, black=int(bf), white=int(wf), time=t)


def run_classical(b: int, w: int, m: int, r: RngStream) -> int:
    """Classical draw-and-duplicate for m steps; returns the white count."""
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    if b < 0 or w < 0 or b + w < 1:
        raise ValueError(f"need nonnegative counts with b + w >= 1, got ({b}, {w})")
    u = r.uniform(m) if m > 0 else np.empty(0, dtype=np.float64)
    wf, _ = _two_color_kernel(w, b, m, 0, 0, u)
    return int(wf)


@njit(cache=True)
def _mod_urn_kernel(ell, b0, w0, t, u):
    """Pendant-component urn.

    Slot 1 of the Fenwick tree is black (spanned edges); slots 2.. are the
    pendant colors in appearance order.  Every draw duplicates the drawn
    ball; on draws at times divisible by ell, a black draw opens a fresh
    color with one ball, any other draw adds a second ball of its color.
    """
    max_colors = t // ell + 1
    fen = np.zeros(max_colors + 2, np.int64)
    _fen_add(fen, 1, b0)
    _fen_add(fen, 2, w0)
    total = b0 + w0
    p = 1  # pendant colors so far
    first_seen = np.zeros(max_colors, np.int64)
    for s in range(1, t + 1):
        target = int(u[s - 1] * total)
        if target >= total:
            target = total - 1
        c = _fen_find(fen, target)
        _fen_add(fen, c, 1)
        total += 1
        if s % ell == 0:
            if c == 1:
                p += 1
                _fen_add(fen, p + 1, 1)
                first_seen[p - 1] = s
                total += 1
            else:
                _fen_add(fen, c, 1)
                total += 1
    black = _fen_prefix(fen, 1)
    colors = np.empty(p, np.int64)
    prev = black
    for i in range(2, p + 2):
        cur = _fen_prefix(fen, i)
        colors[i - 2] = cur - prev
        prev = cur
    return black, colors, first_seen[:p]


def run_mod_urn(ell: int, b: int, w: int, t: int, r: RngStream) -> ModUrn:
    """Urn tracking pendant-component sizes over the spanned subtree.

    Starts with b black balls (spanned edges) and w balls of color 1 (the
    initial pendant component).  Color i's final count equals the vertex
    count of the i-th pendant component in the growth-chain picture.
    """
    if ell < 1:
        raise ValueError(f"ell must be a positive integer, got {ell}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if b < 0 or w < 1:
        raise ValueError(f"need b >= 0 and w >= 1, got ({b}, {w})")
    u = r.uniform(t) if t > 0 else np.empty(0, dtype=np.float64)
    black, colors, first_seen = _mod_urn_kernel(ell, b, w, t, u)
    return ModUrn(
        ell=ell,
        black=int(black),
        colors=colors,
        first_seen=first_seen,
        time=t,
    )


def two_stage_sample(ell: int, k: int, n: int, r: RngStream) -> tuple[int, int]:
    """Sample (spanned edge count, k-th branch edge count) hierarchically.

    Stage one draws the spanned total M as the white count of the
    black-immigration urn started at (b=1, w=(ell+1)k) and run for n - k*ell
    steps; stage two draws the branch count U conditionally as the white
    count of a classical urn with b=(k-1)(ell+1), w=1 run for the number of
    post-birth spanned-edge additions, M - (k-1)(ell+1) - 1.
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if n < k * ell:
        raise ValueError(f"need n >= k*ell, got n={n}, k={k}, ell={ell}")
    m_urn = run_imm_urn(ell, 1, (ell + 1) * k, n - k * ell, "black-immigration", r)
    m_val = m_urn.white
    u_val = run_classical((k - 1) * (ell + 1), 1, m_val - (k - 1) * (ell + 1) - 1, r)
    return m_val, u_val


def urn_moment_scan(
    model: str, p: int, grid: dict, r: RngStream
) -> dict:
    """Empirical p-th moments over a (k, n) grid, with log-log slopes.

    model: "U" (branch count U_k(n)), "M" (spanned count M_k(n)) — both read
    off infinite-urn trajectories — "classical" (white count after m draws),
    or "W" (chosen-color-bonus white count after t draws).

    grid keys: for U/M: ell, k (list), n (list); for classical: b, w,
    m (list); for W: ell, b, w, t (list).  Plus reps (replicates).

    Common random numbers: each replicate runs one trajectory to the largest
    time and snapshots every grid cell from it, so cross-cell comparisons
    share all randomness (recorded in the metadata).  Constants are never
    estimated — only slopes of log-mean against log n and log k are fitted.
    """
    from .statharness import exponent_fit

    if p < 1:
        raise ValueError(f"moment order p must be >= 1, got {p}")
    reps = int(grid["reps"])
    rows: list[dict] = []
    meta = {
        "model": model,
        "p": p,
        "reps": reps,
        "common_random_numbers": "one trajectory per replicate serves every grid cell",
        "seed": r.seed,
        "stream_id": r.stream_id,
    }
    if model in ("U", "M"):
        ell = int(grid["ell"])
        ks = sorted(int(k) for k in grid["k"])
        ns = sorted(int(n) for n in grid["n"])
        kmax = max(ks)
        if min(ns) < kmax * ell:
            raise ValueError("grid needs n >= k*ell for every cell")
        checkpoints = np.array(ns, dtype=np.int64)
        acc = np.zeros((len(ns), len(ks)), dtype=np.float64)
        acc2 = np.zeros((len(ns), len(ks)), dtype=np.float64)
        for rep in range(reps):
            rr = r.spawn(rep)
            u = rr.uniform(ns[-1])
            _, snaps = _infinite_urn_kernel(ell, ns[-1], u, kmax, checkpoints)
            for j in range(len(ns)):
                pref = np.cumsum(snaps[j])
                for i, k in enumerate(ks):
                    val = pref[k - 1] if model == "M" else snaps[j, k - 1]
                    x = float(val) ** p
                    acc[j, i] += x
                    acc2[j, i] += x * x
        for j, n in enumerate(ns):
            for i, k in enumerate(ks):
                mean = acc[j, i] / reps
                var = max(acc2[j, i] / reps - mean * mean, 0.0)
                rows.append(
                    {
                        "model": model, "ell": ell, "p": p, "k": k, "n": n,
                        "t": n - k * ell, "mean": mean,
                        "stderr": float(np.sqrt(var / reps)), "reps": reps,
                    }
                )
        slopes: dict = {"in_n": {}, "in_k": {}}
        for i, k in enumerate(ks):
            pts = [(n, acc[j, i] / reps) for j, n in enumerate(ns)]
            slopes["in_n"][k] = exponent_fit(pts)
        for j, n in enumerate(ns):
            pts = [(k, acc[j, i] / reps) for i, k in enumerate(ks)]
            slopes["in_k"][n] = exponent_fit(pts)
        return {"rows": rows, "slopes": slopes, "meta": meta}
    if model == "classical":
        b, w = int(grid["b"]), int(grid["w"])
        ms = sorted(int(m) for m in grid["m"])
        vals = np.zeros((len(ms), reps), dtype=np.float64)
        for rep in range(reps):
            rr = r.spawn(rep)
            u = rr.uniform(ms[-1])
            wc = float(w)
            bc = float(b)
            j = 0
            while j < len(ms) and ms[j] == 0:
                vals[j, rep] = wc
                j += 1
            for s in range(1, ms[-1] + 1):
                if u[s - 1] * (wc + bc) < wc:
                    wc += 1
                else:
                    bc += 1
                while j < len(ms) and ms[j] == s:
                    vals[j, rep] = wc
                    j += 1
        meta.update({"b": b, "w": w})
        slopes = {"in_m": None}
        pts = []
        for j, m in enumerate(ms):
            mean = float(np.mean(vals[j] ** p))
            sd = float(np.std(vals[j] ** p))
            rows.append(
                {
                    "model": model, "ell": -1, "p": p, "k": -1, "n": -1,
                    "t": m, "mean": mean,
                    "stderr": sd / np.sqrt(reps), "reps": reps,
                }
            )
            pts.append((m, mean))
        slopes["in_m"] = exponent_fit(pts)
        return {"rows": rows, "slopes": slopes, "meta": meta}
    if model == "W":
        ell = int(grid["ell"])
        b, w = int(grid["b"]), int(grid["w"])
        ts = sorted(int(t) for t in grid["t"])
        vals = np.zeros((len(ts), reps), dtype=np.float64)
        for rep in range(reps):
            rr = r.spawn(rep)
            u = rr.uniform(ts[-1]) if ts[-1] > 0 else np.empty(0)
            for j, t in enumerate(ts):
                wf, _ = _two_color_kernel(w, b, t, ell, 2, u[:t])
                vals[j, rep] = wf
        meta.update({"ell": ell, "b": b, "w": w})
        pts = []
        for j, t in enumerate(ts):
            mean = float(np.mean(vals[j] ** p))
            sd = float(np.std(vals[j] ** p))
            rows.append(
                {
                    "model": model, "ell": ell, "p": p, "k": -1, "n": -1,
                    "t": t, "mean": mean,
                    "stderr": sd / np.sqrt(reps), "reps": reps,
                }
            )
            pts.append((t, mean))
        slopes = {"in_t": exponent_fit(pts)}
        return {"rows": rows, "slopes": slopes, "meta": meta}
    raise ValueError(f"unknown model {model!r}")
