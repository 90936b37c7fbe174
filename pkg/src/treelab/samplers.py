"""Reproducible random sources and the continuum cut-sequence sampler.

Every random quantity in the package flows through an RngStream, a thin
wrapper around a counter-based generator keyed by (seed, stream_id).  Two
streams with the same key replay bit-identically; streams with different
keys are independent for all practical purposes, which is what lets
replicates be farmed out to workers without any coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RngStream",
    "CutSequence",
    "derive_stream_id",
    "sample_exponential",
    "sample_dirichlet",
    "sample_beta",
    "sample_gamma_int",
    "sample_cuts",
]

_MASK64 = (1 << 64) - 1


def derive_stream_id(*indices: int) -> int:
    """Mix a tuple of small indices into a single 64-bit stream id.

    splitmix64-style finalizer applied to each index in turn; collisions
    between distinct short tuples are not a practical concern.
    """
    x = 0x9E3779B97F4A7C15
    for idx in indices:
        x = (x ^ (int(idx) & _MASK64)) & _MASK64
        x = (x * 0xBF58476D1CE4E5B9) & _MASK64
        x ^= x >> 27
        x = (x * 0x94D049BB133111EB) & _MASK64
        x ^= x >> 31
    return x


@dataclass
class RngStream:
    """Counter-based random stream keyed by (seed, stream_id).

    The key feeds a Philox4x64 generator, so state is (key, counter) and
    identical keys replay identical draw sequences regardless of platform
    or how many other streams exist.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        key = np.array(
            [self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64
        )
        self._gen = np.random.Generator(np.random.Philox(key=key))

    # Bulk draw primitives used by the simulation kernels.

    def uniform(self, size=None):
        """Uniform(0, 1) draws (scalar float when size is None)."""
        if size is None:
            return float(self._gen.random())
        return self._gen.random(size)

    def exponential(self, size=None):
        """Rate-1 exponential draws (scalar float when size is None)."""
        if size is None:
            return float(self._gen.standard_exponential())
        return self._gen.standard_exponential(size)

    def spawn(self, *indices: int) -> "RngStream":
        """Child stream with a stream id derived from this one's id and indices."""
        return RngStream(self.seed, derive_stream_id(self.stream_id, *indices))


@dataclass(frozen=True)
class CutSequence:
    """Increasing cut points 0 < C_1 < C_2 < ... of a line-breaking process.

    C_k^(ell+1) is a sum of k rate-1 exponentials, so consecutive cuts
    delimit the branch lengths Delta C_k = C_k - C_{k-1} of the continuum
    tree with index ell.
    """

    ell: int
    cuts: np.ndarray

    def __post_init__(self) -> None:
        if self.ell < 1:
            raise ValueError(f"ell must be a positive integer, got {self.ell}")
        cuts = np.asarray(self.cuts, dtype=np.float64)
        object.__setattr__(self, "cuts", cuts)
        if cuts.ndim != 1:
            raise ValueError("cuts must be a one-dimensional array")
        if cuts.size and (cuts[0] <= 0.0 or np.any(np.diff(cuts) <= 0.0)):
            raise ValueError("cuts must be strictly increasing and positive")

    def __len__(self) -> int:
        return int(self.cuts.size)

    @property
    def spacings(self) -> np.ndarray:
        """Branch lengths Delta C_k, k = 1..K (Delta C_1 = C_1)."""
        return np.diff(self.cuts, prepend=0.0)


def sample_exponential(r: RngStream) -> float:
    """One rate-1 exponential draw."""
    return r.exponential()


def sample_gamma_int(shape: int, r: RngStream, size=None):
    """Gamma(shape, 1) draws for integer shape, as a sum of exponentials.

    Deliberately avoids the generator's rejection-sampling gamma so that the
    draw count per variate is fixed and replay stays schedule-independent.
    """
    if shape != int(shape) or shape < 1:
        raise ValueError(f"shape must be a positive integer, got {shape}")
    shape = int(shape)
    if size is None:
        return float(np.sum(r.exponential(shape)))
    return r.exponential((int(size), shape)).sum(axis=1)


def sample_dirichlet(k: int, r: RngStream) -> np.ndarray:
    """One draw from the flat Dirichlet on the (k-1)-simplex.

    Normalized rate-1 exponentials; k = 1 returns the degenerate (1.0,).
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    g = r.exponential(k)
    return g / g.sum()


def sample_beta(a: float, b: float, r: RngStream) -> float:
    """One Beta(a, b) draw.

    Beta(a, 1) and Beta(1, b) use the exact inverse CDF (a single uniform);
    integer (a, b) use the two-gamma ratio with sum-of-exponential gammas.
    Other parameter combinations are outside this package's needs and raise.
    """
    if a <= 0 or b <= 0:
        raise ValueError(f"beta parameters must be positive, got ({a}, {b})")
    if b == 1:
        return r.uniform() ** (1.0 / a)
    if a == 1:
        return 1.0 - r.uniform() ** (1.0 / b)
    if a == int(a) and b == int(b):
        x = sample_gamma_int(int(a), r)
        y = sample_gamma_int(int(b), r)
        return x / (x + y)
    raise ValueError(
        f"beta({a}, {b}) unsupported: need integer parameters or a unit parameter"
    )


def sample_cuts(ell: int, K: int, r: RngStream) -> CutSequence:
    """Cut sequence C_1 < ... < C_K with C_k = (E_1 + ... + E_k)^(1/(ell+1))."""
    if ell < 1:
        raise ValueError(f"ell must be a positive integer, got {ell}")
    if K < 0:
        raise ValueError(f"K must be nonnegative, got {K}")
    totals = np.cumsum(r.exponential(K))
    cuts = totals ** (1.0 / (ell + 1))
    return CutSequence(ell=ell, cuts=cuts)


def alpha_of(ell: int) -> float:
    """Scaling exponent ell / (ell + 1)."""
    return ell / (ell + 1)


def scale_c_of(ell: int) -> float:
    """Scaling constant ell^alpha / (ell + 1) multiplying n^(-alpha)."""
    a = alpha_of(ell)
    return math.pow(ell, a) / (ell + 1)
