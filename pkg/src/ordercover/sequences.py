"""Extremal point sequences and monotone-subsequence oracles.

A sequence of points in Z^d counts as monotone when every coordinate is
monotone on it, each coordinate choosing its own direction.  Classic
Erdos-Szekeres machinery says any m^(2^d)+1 points contain a monotone
subsequence of length m+1, and the bound is tight: ``build_tight_sequence``
produces m^(2^d) points with no monotone subsequence of length m+1,
every coordinate a permutation of 1..N.

The construction is recursive.  In one dimension (N = m^2, 0-based)

    x[a*m + b] = a*m + (m - b - 1)          a, b in 0..m-1,

i.e. m descending runs of m values with ascending run minima.  To add a
dimension, take the (d-1)-dimensional sequence y of length M = m^(2^(d-1))
and blow it up quadratically to N = M^2 points:

    x[a*M + b][k] = y[a][k] * M + y[b][k]   for the first d-1 coordinates,
    x[a*M + b][d] = a*M + (M - b - 1)       for the new one.

Everything is built over 0..N-1 and shifted by one on output.

``longest_monotone_subsequence`` is the verification oracle: a chain DP
per direction pattern (2^d of them, non-strict coordinate comparisons).
``has_monotone_of_length`` answers the decision question and has a fast
path for length 3 when no coordinate carries ties: a triple i<j<k is
monotone exactly when every coordinate of the middle point lies strictly
between the outer two, so it suffices to scan middles and compare the
below/above classification of earlier and later points.
"""

from dataclasses import dataclass
from itertools import product
from typing import NamedTuple

import numpy as np

#: Construction sizes are capped so downstream rank arrays stay in int32.
CAPACITY_LIMIT = 2**31


class CapacityError(ValueError):
    """Requested construction exceeds the supported size."""


@dataclass(frozen=True)
class PointSequence:
    """A finite sequence of integer points of common dimension d."""

    d: int
    points: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        for p in self.points:
            if len(p) != self.d:
                raise ValueError(f"point {p!r} does not have dimension {self.d}")

    def __len__(self) -> int:
        return len(self.points)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=np.int64).reshape(len(self.points), self.d)

    def is_permutation_grid(self) -> bool:
        """True when every coordinate's values are a rearrangement of 1..N."""
        n = len(self.points)
        if n == 0:
            return True
        arr = self.to_array()
        target = np.arange(1, n + 1)
        return all(np.array_equal(np.sort(arr[:, k]), target) for k in range(self.d))

    def to_json_dict(self) -> dict:
        return {"d": self.d, "points": [list(p) for p in self.points]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "PointSequence":
        if not isinstance(data, dict) or "d" not in data or "points" not in data:
            raise ValueError('sequence JSON needs keys "d" and "points"')
        return cls(data["d"], tuple(tuple(p) for p in data["points"]))


class MonotoneSubsequence(NamedTuple):
    length: int
    indices: tuple[int, ...]
    directions: tuple[int, ...]  # +1 ascending / -1 descending per coordinate


def tight_sequence_size(m: int, d: int) -> int:
    """N = m^(2^d), guarded against runaway sizes."""
    if m < 1 or d < 1:
        raise ValueError(f"need m >= 1 and d >= 1, got m={m}, d={d}")
    n = m
    for _ in range(d):
        n = n * n
        if n > CAPACITY_LIMIT:
            raise CapacityError(f"m^(2^d) = {m}^{2**d} exceeds the capacity limit {CAPACITY_LIMIT}")
    return n


def build_tight_sequence(m: int, d: int) -> PointSequence:
    """m^(2^d) points in dimension d with no monotone subsequence of length m+1."""
    tight_sequence_size(m, d)
    base = np.empty(m * m, dtype=np.int64)
    for a in range(m):
        base[a * m : (a + 1) * m] = a * m + np.arange(m - 1, -1, -1)
    coords = [base]
    for _ in range(d - 1):
        big = len(coords[0])
        blown = [(c[:, None] * big + c[None, :]).ravel() for c in coords]
        fresh = (np.arange(big)[:, None] * big + np.arange(big - 1, -1, -1)[None, :]).ravel()
        coords = blown + [fresh]
    pts = np.stack(coords, axis=1) + 1
    return PointSequence(d, tuple(map(tuple, pts.tolist())))


def longest_monotone_subsequence(seq: PointSequence) -> MonotoneSubsequence:
    """Longest subsequence monotone in every coordinate, maximised over the
    2^d direction patterns (non-strict comparisons); returns one witness."""
    pts = seq.to_array()
    n = len(pts)
    if n == 0:
        return MonotoneSubsequence(0, (), (1,) * seq.d)
    best = MonotoneSubsequence(1, (0,), (1,) * seq.d)
    for pattern in product((1, -1), repeat=seq.d):
        adj = pts * np.asarray(pattern, dtype=np.int64)
        lengths = np.ones(n, dtype=np.int64)
        parent = np.full(n, -1, dtype=np.int64)
        for j in range(1, n):
            ok = np.flatnonzero((adj[:j] <= adj[j]).all(axis=1))
            if ok.size:
                i = ok[np.argmax(lengths[ok])]
                if lengths[i] + 1 > lengths[j]:
                    lengths[j] = lengths[i] + 1
                    parent[j] = i
        end = int(np.argmax(lengths))
        if lengths[end] > best.length:
            chain = []
            while end >= 0:
                chain.append(end)
                end = int(parent[end])
            best = MonotoneSubsequence(len(chain), tuple(reversed(chain)), pattern)
    return best


_SWEEP_KERNELS: dict[str, object] = {}


def _sweep_kernels():
    """Compile (once, lazily) the middle-sweep kernels.

    For each middle j, classify every other point t by the bitmask of
    coordinates where t's value lies below j's; a monotone triple through
    j pairs an earlier point with a later point of exactly complementary
    class.  The four-column form is written branchlessly so it
    vectorises; lower dimensions are padded up to it.
    """
    if _SWEEP_KERNELS:
        return _SWEEP_KERNELS
    from numba import njit

    @njit(cache=True)
    def sweep4(c0, c1, c2, c3):
        n = c0.shape[0]
        for j in range(1, n - 1):
            v0 = c0[j]
            v1 = c1[j]
            v2 = c2[j]
            v3 = c3[j]
            pre = 0
            for t in range(j):
                c = (
                    (c0[t] < v0)
                    | ((c1[t] < v1) << 1)
                    | ((c2[t] < v2) << 2)
                    | ((c3[t] < v3) << 3)
                )
                pre |= 1 << c
            for t in range(j + 1, n):
                c = (
                    (c0[t] < v0)
                    | ((c1[t] < v1) << 1)
                    | ((c2[t] < v2) << 2)
                    | ((c3[t] < v3) << 3)
                )
                if (pre >> (15 ^ c)) & 1:
                    return True
        return False

    @njit(cache=True)
    def sweep_any(cols):
        d, n = cols.shape
        full = (1 << d) - 1
        for j in range(1, n - 1):
            pre = 0
            for t in range(j):
                c = 0
                for k in range(d):
                    if cols[k, t] < cols[k, j]:
                        c |= 1 << k
                pre |= 1 << c
            for t in range(j + 1, n):
                c = 0
                for k in range(d):
                    if cols[k, t] < cols[k, j]:
                        c |= 1 << k
                if (pre >> (full ^ c)) & 1:
                    return True
        return False

    _SWEEP_KERNELS["sweep4"] = sweep4
    _SWEEP_KERNELS["sweep_any"] = sweep_any
    return _SWEEP_KERNELS


def _has_strict_middle_triple(pts: np.ndarray) -> bool:
    """Exists i<j<k with every coordinate of j strictly between i's and k's?

    Requires tie-free columns.  Dimensions below four are padded with
    copies of the (strictly increasing) index coordinate, which is
    between-satisfied by every i<j<k and so changes nothing.
    """
    n, d = pts.shape
    if n < 3:
        return False
    kernels = _sweep_kernels()
    dtype = np.int32 if int(np.abs(pts).max()) < 2**31 else np.int64
    if d <= 4:
        idx = np.arange(n, dtype=dtype)
        cols = [np.ascontiguousarray(pts[:, k], dtype=dtype) for k in range(d)]
        cols += [idx] * (4 - d)
        return bool(kernels["sweep4"](*cols))
    return bool(kernels["sweep_any"](np.ascontiguousarray(pts.T, dtype=dtype)))


def _has_chain_of_length(pts: np.ndarray, d: int, target: int) -> bool:
    # DP with early exit once some chain reaches the target length.
    n = len(pts)
    for pattern in product((1, -1), repeat=d):
        adj = pts * np.asarray(pattern, dtype=np.int64)
        lengths = np.ones(n, dtype=np.int64)
        for j in range(1, n):
            ok = (adj[:j] <= adj[j]).all(axis=1)
            if ok.any():
                lengths[j] = 1 + int(lengths[:j][ok].max())
                if lengths[j] >= target:
                    return True
    return False


def has_monotone_of_length(seq: PointSequence, length: int) -> bool:
    """Decision form of the oracle: is there a monotone subsequence this long?"""
    if length < 1:
        raise ValueError("length must be >= 1")
    n = len(seq.points)
    if length <= 2:
        # Any one point, and any two points, are monotone in every coordinate.
        return n >= length
    pts = seq.to_array()
    if length == 3 and all(len(np.unique(pts[:, k])) == n for k in range(seq.d)):
        return _has_strict_middle_triple(pts)
    return _has_chain_of_length(pts, seq.d, length)


@dataclass(frozen=True)
class GuaranteeCheckReport:
    """Outcome of stress-testing the m+1 guarantee on random sequences."""

    m: int
    d: int
    n_points: int
    trials: int
    seed: int
    failures: tuple[int, ...]  # trial indices lacking a length-(m+1) subsequence
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "d": self.d,
            "n_points": self.n_points,
            "trials": self.trials,
            "seed": self.seed,
            "failures": list(self.failures),
            "pass": self.passed,
        }


def random_permutation_grid(n: int, d: int, seed) -> PointSequence:
    """n points whose coordinates are independent random permutations of 1..n."""
    rng = np.random.default_rng(seed)
    cols = [rng.permutation(n) + 1 for _ in range(d)]
    pts = np.stack(cols, axis=1)
    return PointSequence(d, tuple(map(tuple, pts.tolist())))


def es_guarantee_check(m: int, d: int, trials: int, seed: int) -> GuaranteeCheckReport:
    """Assert that ``trials`` random sequences of m^(2^d)+1 points each contain
    a monotone subsequence of length m+1.  Deterministic per seed."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = tight_sequence_size(m, d) + 1
    failures = []
    for t in range(trials):
        seq = random_permutation_grid(n, d, [seed, t])
        if not has_monotone_of_length(seq, m + 1):
            failures.append(t)
    return GuaranteeCheckReport(
        m=m,
        d=d,
        n_points=n,
        trials=trials,
        seed=seed,
        failures=tuple(failures),
        passed=not failures,
    )
