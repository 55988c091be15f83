"""Exact walk counting by dynamic programming, plus empirical growth estimation.

Counts are Python integers throughout.  Orthant counts for d <= 2 run on dense
object-dtype numpy arrays over the reachable box; higher dimensions and partially
constrained regions use a sparse position map.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CapacityError, InsufficientDataError, UnsupportedError
from .stepset import StepSet

DEFAULT_NMAX_2D = 24
DEFAULT_NMAX_3D = 16
MEMORY_CAP = 10_000_000  # positions held by one DP layer


def default_nmax(dimension: int) -> int:
    return DEFAULT_NMAX_2D if dimension <= 2 else DEFAULT_NMAX_3D


@dataclass
class CountSeries:
    region: str  # "orthant-<d>", "halfspace(<normal>)", "excursion-<d>"
    counts: list[int]
    stepset: StepSet
    normal: tuple[int, ...] | None = None

    @property
    def n_max(self) -> int:
        return len(self.counts) - 1

    def fekete_floor(self) -> float:
        """max_n q_n^(1/n) over n >= 1; 0 if every term vanishes."""
        return max((_nth_root(q, n) for n, q in enumerate(self.counts) if n >= 1 and q > 0), default=0.0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "count", "count_root"])
        for n, q in enumerate(self.counts):
            root = "" if n == 0 else f"{_nth_root(q, n):.12g}"
            w.writerow([n, str(q), root])
        return buf.getvalue()


def _nth_root(q: int, n: int) -> float:
    if q == 0:
        return 0.0
    return math.exp(_log_int(q) / n)


def _log_int(q: int) -> float:
    """log of an arbitrarily large positive int without float overflow."""
    bits = q.bit_length()
    if bits < 1000:
        return math.log(q)
    shift = bits - 60
    return math.log(q >> shift) + shift * math.log(2)


def _check_capacity(positions: int, cap: int):
    if positions > cap:
        raise CapacityError(f"DP needs {positions} positions per layer, above the memory cap of {cap}")


def _dense_orthant(S: StepSet, n_max: int, cap: int) -> tuple[list[int], list[int]]:
    d = S.dimension
    reach = n_max * max(1, max(max(v) for v in S.vectors)) + 1
    _check_capacity(reach**d, cap)
    grid = np.zeros((reach,) * d, dtype=object)
    grid[(0,) * d] = 1
    totals, origin = [1], [1]
    for _ in range(n_max):
        nxt = np.zeros_like(grid)
        for v, m in S.steps:
            src = tuple(slice(max(0, -c), reach - max(0, c)) for c in v)
            dst = tuple(slice(max(0, c), reach - max(0, -c)) for c in v)
            nxt[dst] += grid[src] * m if m != 1 else grid[src]
        grid = nxt
        totals.append(int(grid.sum()))
        origin.append(int(grid[(0,) * d]))
    return totals, origin


def _sparse_region(
    S: StepSet, n_max: int, constrained: Sequence[bool], cap: int
) -> tuple[list[int], list[int]]:
    d = S.dimension
    layer: Counter = Counter({(0,) * d: 1})
    totals, origin = [1], [1]
    for _ in range(n_max):
        nxt: Counter = Counter()
        for pos, c in layer.items():
            for v, m in S.steps:
                q = tuple(a + b for a, b in zip(pos, v))
                if any(flag and x < 0 for flag, x in zip(constrained, q)):
                    continue
                nxt[q] += c * m
        _check_capacity(len(nxt), cap)
        layer = nxt
        totals.append(sum(layer.values()))
        origin.append(layer.get((0,) * d, 0))
    return totals, origin


def count_region(S: StepSet, n_max: int, constrained: Sequence[bool], cap: int = MEMORY_CAP) -> list[int]:
    """Counts of walks keeping coordinate k >= 0 for every k flagged in ``constrained``."""
    if len(constrained) != S.dimension:
        raise ValueError("one constraint flag per coordinate")
    return _sparse_region(S, n_max, constrained, cap)[0]


def _check_nmax(n_max: int):
    if n_max < 1:
        raise ValueError("n_max must be at least 1")


def count_orthant(S: StepSet, n_max: int | None = None, cap: int = MEMORY_CAP) -> CountSeries:
    """Exact counts q_0..q_N of walks confined to the nonnegative orthant."""
    n_max = default_nmax(S.dimension) if n_max is None else n_max
    _check_nmax(n_max)
    if S.dimension <= 2:
        totals, _ = _dense_orthant(S, n_max, cap)
    else:
        totals, _ = _sparse_region(S, n_max, (True,) * S.dimension, cap)
    return CountSeries(f"orthant-{S.dimension}", totals, S)


def count_excursions(S: StepSet, n_max: int | None = None, cap: int = MEMORY_CAP) -> CountSeries:
    """Orthant walks that end back at the origin."""
    n_max = default_nmax(S.dimension) if n_max is None else n_max
    _check_nmax(n_max)
    if S.dimension <= 2:
        _, origin = _dense_orthant(S, n_max, cap)
    else:
        _, origin = _sparse_region(S, n_max, (True,) * S.dimension, cap)
    return CountSeries(f"excursion-{S.dimension}", origin, S)


def count_halfspace(
    S: StepSet, normal: Sequence[int], n_max: int | None = None, cap: int = MEMORY_CAP
) -> CountSeries:
    """Walks whose running inner product with an integer normal stays >= 0.

    The walk only matters through its projected height, so the DP runs on 1D heights.
    """
    n_max = default_nmax(S.dimension) if n_max is None else n_max
    _check_nmax(n_max)
    normal = tuple(normal)
    if len(normal) != S.dimension:
        raise UnsupportedError("normal dimension does not match the step set")
    if any(not float(c).is_integer() for c in normal):
        raise UnsupportedError("half-space enumeration needs an integer normal")
    normal = tuple(int(c) for c in normal)
    if any(c < 0 for c in normal) or not any(normal):
        raise UnsupportedError("normal components must be >= 0 and not all zero")
    heights: Counter = Counter()
    for v, m in S.steps:
        heights[sum(a * b for a, b in zip(v, normal))] += m
    layer: Counter = Counter({0: 1})
    totals = [1]
    for _ in range(n_max):
        nxt: Counter = Counter()
        for h, c in layer.items():
            for a, m in heights.items():
                if h + a >= 0:
                    nxt[h + a] += c * m
        _check_capacity(len(nxt), cap)
        layer = nxt
        totals.append(sum(layer.values()))
    return CountSeries(f"halfspace({','.join(map(str, normal))})", totals, S, normal)


def brute_force_counts(S: StepSet, n_max: int, constrained: Sequence[bool] | None = None) -> list[int]:
    """Exhaustive oracle: check every one of the |S|^n step sequences, n <= n_max.

    Deliberately independent of the DP: no aggregation by position.  Sequences are
    generated in numpy chunks keyed by their first steps to bound memory.
    """
    d = S.dimension
    if constrained is None:
        constrained = (True,) * d
    mask = np.array(constrained, dtype=bool)
    vecs = np.array(S.vectors, dtype=np.int64)
    mults = np.array([m for _, m in S.steps], dtype=object)
    k = len(vecs)
    out = [1]
    for n in range(1, n_max + 1):
        total = 0
        head = min(n, max(0, n - 6))  # enumerate the first `head` steps in Python
        tail = n - head
        tail_idx = np.array(list(itertools.product(range(k), repeat=tail)), dtype=np.int64).reshape(-1, tail)
        tail_steps = vecs[tail_idx]  # (rows, tail, d)
        for prefix in itertools.product(range(k), repeat=head):
            start = np.zeros(d, dtype=np.int64)
            ok_prefix = True
            for idx in prefix:
                start = start + vecs[idx]
                if np.any(start[mask] < 0):
                    ok_prefix = False
                    break
            if not ok_prefix:
                continue
            paths = start + np.cumsum(tail_steps, axis=1)
            valid = np.all(paths[:, :, mask] >= 0, axis=(1, 2)) if tail else np.array([True])
            if not valid.any():
                continue
            weight_prefix = 1
            for idx in prefix:
                weight_prefix *= mults[idx]
            if all(m == 1 for m in mults):
                total += int(valid.sum()) * weight_prefix
            else:
                w = np.prod(mults[tail_idx[valid]], axis=1) if tail else np.array([1], dtype=object)
                total += int(sum(w)) * weight_prefix
        out.append(total)
    return out


@dataclass(frozen=True)
class GrowthEstimate:
    estimate: float
    log_k: float
    alpha: float
    c: float
    fekete_floor: float
    indices: tuple[int, ...] = field(default=())


def estimate_growth(series: CountSeries, min_terms: int = 12) -> GrowthEstimate:
    """Least-squares fit of log q_n ~ n log K + alpha log n + c over the last half of the series.

    When the odd-indexed terms vanish the even subsequence is used instead.
    """
    counts = series.counts
    idx = [n for n in range(1, len(counts)) if counts[n] > 0]
    if len(idx) < min_terms:
        raise InsufficientDataError(f"need at least {min_terms} nonzero terms, have {len(idx)}")
    if all(counts[n] == 0 for n in range(1, len(counts), 2)):
        idx = [n for n in idx if n % 2 == 0]
    N = len(counts) - 1
    lo = N - math.ceil(N / 2)
    window = [n for n in idx if n > lo]
    if len(window) < 3:
        raise InsufficientDataError("too few nonzero terms in the fitting window")
    n = np.array(window, dtype=float)
    y = np.array([_log_int(counts[k]) for k in window])
    A = np.column_stack([n, np.log(n), np.ones_like(n)])
    (log_k, alpha, c), *_ = np.linalg.lstsq(A, y, rcond=None)
    return GrowthEstimate(
        estimate=math.exp(log_k),
        log_k=float(log_k),
        alpha=float(alpha),
        c=float(c),
        fekete_floor=series.fekete_floor(),
        indices=tuple(window),
    )
