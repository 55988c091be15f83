"""Lower bounds (shuffle, rotation, excursions, enumeration) and the per-model ledger.

Lower bounds need certified growth constants for smaller models.  A model is
certified here when one of its walls is implied by the other (its quarter-plane
walks are then exactly half-plane walks), when its excursion growth meets its best
half-plane bound, or when a shuffle of two certified parts meets that bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .certificates import GrowthBound
from .enumeration import CountSeries, count_orthant
from .errors import LedgerIntegrityError, NoCriticalPointError, PreconditionError, UnsupportedError
from .halfplane import angle_normal, best_upper_bound, critical_point, half_plane_growth, project
from .stepset import StepSet, compass_string, format_stepset

INTEGRITY_TOL = 1e-9
RESOLVE_TOL = 1e-9
SEARCH_DEPTH = 2


def shuffle_bound(S1: StepSet, K1: float, S2: StepSet, K2: float) -> GrowthBound:
    """K1 + K2 <= K for the multiset union S1 + S2 (shuffles of the two walk classes)."""
    if S1.dimension != S2.dimension:
        raise UnsupportedError("shuffled step sets must share their dimension")
    first, second = sorted([(S1, K1), (S2, K2)], key=lambda p: (format_stepset(p[0]), p[1]))
    union = S1.union(S2)
    return GrowthBound(
        value=K1 + K2,
        kind="lower",
        tag="partition",
        detail=f"shuffle {compass_string(first[0])} (K={first[1]:.12g}) with "
        f"{compass_string(second[0])} (K={second[1]:.12g})",
        model=union,
        data={"parts": (format_stepset(first[0]), format_stepset(second[0])), "values": (first[1], second[1])},
    )


def _axis_index(axis) -> int:
    if isinstance(axis, str):
        return {"x": 0, "y": 1, "z": 2}[axis.lower()]
    return int(axis)


def rotate(S: StepSet, step: Sequence[int], axis) -> StepSet:
    """Replace ``step`` by the step with coordinate ``axis`` increased by one."""
    k = _axis_index(axis)
    step = tuple(step)
    if step not in S:
        raise PreconditionError(f"step {step} not in the step set")
    if S.multiplicity(step) != 1:
        raise PreconditionError(f"step {step} has multiplicity {S.multiplicity(step)}; rotate a simple step")
    new = tuple(c + (j == k) for j, c in enumerate(step))
    if new in S:
        raise PreconditionError(f"rotated step {new} already present")
    rest = [(v, m) for v, m in S.steps if v != step]
    return StepSet(S.dimension, tuple(rest) + ((new, 1),))


def rotation_relation(S: StepSet, step: Sequence[int], axis, lower_on_S: float) -> GrowthBound:
    """Transfer a lower bound on K_S to T = S with one step rotated (K_S <= K_T)."""
    T = rotate(S, step, axis)
    name = "xyz"[_axis_index(axis)] if _axis_index(axis) < 3 else str(axis)
    return GrowthBound(
        value=lower_on_S,
        kind="lower",
        tag="rotation",
        detail=f"{compass_string(S)} ->_r {compass_string(T)} (r_{name} on {tuple(step)})",
        model=T,
        data={"source": format_stepset(S), "step": tuple(step), "axis": name},
    )


def excursion_floor(S: StepSet) -> GrowthBound:
    """P(alpha, beta), the growth of excursions, which are a subclass of all walks."""
    cp = critical_point(S)
    if not cp.converged:
        raise NoCriticalPointError("no interior critical point: excursion floor unavailable")
    return GrowthBound(
        value=cp.inventory_value,
        kind="lower",
        tag="excursion",
        detail=f"P at critical point {tuple(round(c, 12) for c in cp.coordinates)}",
        model=S,
        data={"critical_point": cp.coordinates},
    )


def implied_wall(S: StepSet) -> int | None:
    """Index of a wall implied by the other one (2D), or None.

    The x-wall is implied when i - c*j >= 0 for every step and some c >= 0: then
    x >= c*y >= 0 along any walk that keeps y >= 0.  Symmetrically for y.
    """
    if S.dimension != 2:
        return None
    for k in (0, 1):
        lo, hi = Fraction(0), None
        feasible = True
        for v, _ in S.steps:
            a, b = v[k], v[1 - k]
            if b == 0:
                feasible &= a >= 0
            elif b > 0:
                hi = Fraction(a, b) if hi is None else min(hi, Fraction(a, b))
            else:
                lo = max(lo, Fraction(a, b))
        if feasible and (hi is None or lo <= hi):
            return k
    return None


def half_plane_certificate(S: StepSet) -> GrowthBound | None:
    """Exact growth when one wall is implied: the model is a half-plane model."""
    k = implied_wall(S)
    if k is None:
        return None
    theta = 0.0 if k == 0 else math.pi / 2
    value = half_plane_growth(project(S, angle_normal(theta)))
    other = "y" if k == 0 else "x"
    return GrowthBound(
        value=value,
        kind="lower",
        tag="half-plane",
        detail=f"{'xy'[k]}-wall implied by the {other}-wall: walks are {other} >= 0 half-plane walks",
        model=S,
        data={"theta": theta},
    )


def _partitions(S: StepSet):
    """Unordered splits of the multiset S into two non-empty sub-multisets."""
    steps = S.steps
    seen = set()

    def rec(i, left, right):
        if i == len(steps):
            if left and right:
                key = frozenset([tuple(left), tuple(right)])
                if key not in seen:
                    seen.add(key)
                    yield StepSet(S.dimension, tuple(left)), StepSet(S.dimension, tuple(right))
            return
        v, m = steps[i]
        for k in range(m + 1):
            yield from rec(
                i + 1,
                left + ([(v, k)] if k else []),
                right + ([(v, m - k)] if m - k else []),
            )

    yield from rec(0, [], [])


@lru_cache(maxsize=None)
def certified_growth(S: StepSet, depth: int = SEARCH_DEPTH) -> GrowthBound | None:
    """A lower bound on K_S that provably equals K_S, or None."""
    if S.dimension != 2:
        return None
    hp = half_plane_certificate(S)
    if hp is not None:
        return hp
    upper = best_upper_bound(S, check_essential=False).value
    try:
        exc = excursion_floor(S)
        if exc.value >= upper - RESOLVE_TOL:
            return exc
    except NoCriticalPointError:
        pass
    if depth > 0:
        sh = shuffle_search(S, depth)
        if sh is not None and sh.value >= upper - RESOLVE_TOL:
            return sh
    return None


def shuffle_search(S: StepSet, depth: int = SEARCH_DEPTH) -> GrowthBound | None:
    """Best shuffle lower bound over all 2-partitions whose parts are certified."""
    best = None
    for A, B in _partitions(S):
        ka = certified_growth(A, depth - 1)
        if ka is None:
            continue
        kb = certified_growth(B, depth - 1)
        if kb is None:
            continue
        cand = shuffle_bound(A, ka.value, B, kb.value)
        if best is None or cand.value > best.value:
            best = cand
    return best


def rotation_search(T: StepSet, depth: int = SEARCH_DEPTH) -> GrowthBound | None:
    """Best lower bound on T obtained by rotating one step of a certified model into T."""
    best = None
    for t, m in T.steps:
        if m != 1:
            continue
        for k in range(T.dimension):
            s = tuple(c - (j == k) for j, c in enumerate(t))
            if s in T:
                continue
            S = StepSet(T.dimension, tuple((v, mm) for v, mm in T.steps if v != t) + ((s, 1),))
            cert = certified_growth(S, depth - 1)
            if cert is None:
                continue
            cand = rotation_relation(S, s, k, cert.value)
            if best is None or cand.value > best.value:
                best = cand
    return best


def enumeration_floor(series: CountSeries) -> GrowthBound:
    """max_n q_n^(1/n): orthant counts are supermultiplicative, so this is a lower bound."""
    value = series.fekete_floor()
    return GrowthBound(
        value=value,
        kind="lower",
        tag="enumeration-floor",
        detail=f"max q_n^(1/n) over n <= {series.n_max}",
        model=series.stepset,
        data={"n_max": series.n_max},
    )


@dataclass
class BoundLedger:
    model: StepSet
    bounds: list[GrowthBound] = field(default_factory=list)
    resolved: float | None = None
    tolerance: float | None = None
    series: CountSeries | None = None

    def add(self, bound: GrowthBound | None) -> BoundLedger:
        if bound is not None:
            self.bounds.append(bound)
        return self

    def register_series(self, series: CountSeries) -> BoundLedger:
        self.series = series
        return self

    @property
    def uppers(self) -> list[GrowthBound]:
        return [b for b in self.bounds if b.kind in ("upper", "exact")]

    @property
    def lowers(self) -> list[GrowthBound]:
        return [b for b in self.bounds if b.kind in ("lower", "exact")]

    def min_upper(self) -> GrowthBound | None:
        return min(self.uppers, key=lambda b: b.value, default=None)

    def max_lower(self) -> GrowthBound | None:
        return max(self.lowers, key=lambda b: b.value, default=None)

    def to_dict(self) -> dict:
        return {
            "model": format_stepset(self.model),
            "bounds": [
                {"value": b.value, "kind": b.kind, "certificate": {"tag": b.tag, "detail": b.detail}}
                for b in self.bounds
            ],
            "resolved": self.resolved,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def resolve(ledger: BoundLedger, tolerance: float = RESOLVE_TOL) -> BoundLedger:
    """Set ``resolved`` to the best upper bound when the best lower bound meets it."""
    if not ledger.bounds and ledger.series is None:
        raise ValueError("empty ledger")
    if ledger.series is not None and not any(b.tag == "enumeration-floor" for b in ledger.bounds):
        ledger.add(enumeration_floor(ledger.series))
    hi, lo = ledger.min_upper(), ledger.max_lower()
    if hi is not None and lo is not None and lo.value > hi.value + INTEGRITY_TOL:
        raise LedgerIntegrityError(
            f"lower bound {lo.value!r} ({lo.tag}) exceeds upper bound {hi.value!r} ({hi.tag})"
        )
    ledger.tolerance = tolerance
    if hi is not None and lo is not None and hi.value - lo.value <= tolerance:
        ledger.resolved = hi.value
    else:
        ledger.resolved = None
    return ledger


def build_ledger(
    S: StepSet,
    n_max: int | None = None,
    search: bool = True,
    tolerance: float = RESOLVE_TOL,
    upper: GrowthBound | None = None,
) -> BoundLedger:
    """Collect every available bound for S and resolve.

    ``n_max=0`` skips enumeration; None uses the default horizon.
    """
    ledger = BoundLedger(S)
    if upper is None:
        if S.dimension == 2:
            upper = best_upper_bound(S, check_essential=False)
        else:
            from .orthant import conjectured_growth

            upper = conjectured_growth(S, check_essential=False)
    ledger.add(upper)
    try:
        ledger.add(excursion_floor(S))
    except NoCriticalPointError:
        pass
    if S.dimension == 2:
        ledger.add(half_plane_certificate(S))
        if search:
            ledger.add(shuffle_search(S))
            ledger.add(rotation_search(S))
    if n_max != 0:
        ledger.register_series(count_orthant(S, n_max))
    return resolve(ledger, tolerance)


def check_claimed_lower_bound(S: StepSet, claimed: float, n_max: int | None = None) -> dict:
    """Confront a claimed lower bound with |S|, the best hyperplane bound and enumeration."""
    from .orthant import conjectured_growth

    upper = conjectured_growth(S, check_essential=False)
    series = count_orthant(S, n_max)
    floor = series.fekete_floor()
    size = S.size
    problems = []
    if claimed > size + INTEGRITY_TOL:
        problems.append(f"claimed {claimed:.12g} exceeds the trivial bound |S| = {size}")
    if claimed > upper.value + INTEGRITY_TOL:
        problems.append(f"claimed {claimed:.12g} exceeds the hyperplane upper bound {upper.value:.12g}")
    return {
        "model": format_stepset(S),
        "claimed_lower_bound": claimed,
        "size": size,
        "upper_bound": upper.value,
        "upper_certificate": upper.detail,
        "enumeration_floor": floor,
        "n_max": series.n_max,
        "consistent": not problems,
        "problems": problems,
    }
