"""Step sets: finite multisets of integer vectors, with drift, inventory and covariance.

A step set is stored as a sorted tuple of ``(vector, multiplicity)`` pairs, so two
step sets with the same multiset of steps compare and hash equal.  The zero vector
is an admissible step; it only adds a constant to the inventory.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DomainError, StepSetParseError, UnsupportedError

Vector = tuple[int, ...]

COMPASS: dict[str, Vector] = {
    "N": (0, 1),
    "NE": (1, 1),
    "E": (1, 0),
    "SE": (1, -1),
    "S": (0, -1),
    "SW": (-1, -1),
    "W": (-1, 0),
    "NW": (-1, 1),
}
COMPASS_NAME: dict[Vector, str] = {v: k for k, v in COMPASS.items()}

# horizon for the enumeration-based essentiality test
ESSENTIAL_HORIZON = 8


@dataclass(frozen=True)
class StepSet:
    """A weighted model: distinct integer vectors with positive multiplicities."""

    dimension: int
    steps: tuple[tuple[Vector, int], ...] = field(default=())

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        merged: dict[Vector, int] = {}
        for vec, mult in self.steps:
            vec = tuple(int(c) for c in vec)
            if len(vec) != self.dimension:
                raise ValueError(f"step {vec} does not have dimension {self.dimension}")
            if int(mult) < 1:
                raise ValueError(f"multiplicity of {vec} must be positive, got {mult}")
            merged[vec] = merged.get(vec, 0) + int(mult)
        if not merged:
            raise ValueError("a step set needs at least one step")
        object.__setattr__(self, "steps", tuple(sorted(merged.items())))

    @classmethod
    def from_vectors(cls, vectors: Iterable[Sequence[int]]) -> StepSet:
        """Build from a list of vectors; repeated vectors become multiplicities."""
        vectors = [tuple(int(c) for c in v) for v in vectors]
        if not vectors:
            raise ValueError("a step set needs at least one step")
        return cls(len(vectors[0]), tuple((v, 1) for v in vectors))

    @classmethod
    def compass(cls, *names: str) -> StepSet:
        """``StepSet.compass("N", "SW", "S", "SE")``"""
        try:
            return cls.from_vectors(COMPASS[n.strip().upper()] for n in names)
        except KeyError as exc:
            raise StepSetParseError(f"unknown compass direction {exc.args[0]!r}") from None

    @property
    def size(self) -> int:
        """|S|, counted with multiplicity."""
        return sum(m for _, m in self.steps)

    def __len__(self) -> int:
        return self.size

    @property
    def vectors(self) -> list[Vector]:
        return [v for v, _ in self.steps]

    def expanded(self) -> list[Vector]:
        """Every step repeated according to its multiplicity."""
        return [v for v, m in self.steps for _ in range(m)]

    def multiplicity(self, vec: Sequence[int]) -> int:
        vec = tuple(vec)
        for v, m in self.steps:
            if v == vec:
                return m
        return 0

    def __contains__(self, vec) -> bool:
        return self.multiplicity(vec) > 0

    def union(self, other: StepSet) -> StepSet:
        """Multiset union (multiplicities add)."""
        if other.dimension != self.dimension:
            raise UnsupportedError("cannot merge step sets of different dimension")
        return StepSet(self.dimension, self.steps + other.steps)

    def is_small(self) -> bool:
        return all(all(c in (-1, 0, 1) for c in v) for v in self.vectors)

    def max_abs_coordinate(self) -> int:
        return max(abs(c) for v in self.vectors for c in v)

    def __str__(self) -> str:
        return format_stepset(self)


def parse_stepset(text: str) -> StepSet:
    """Parse ``"N,SW,S,SE"`` or ``"(0,1)x1;(1,-1)x2"`` (the two forms may be mixed).

    Compass tokens may carry a multiplicity as well, e.g. ``"Nx2,S"``.
    """
    text = text.strip()
    if not text:
        raise StepSetParseError("empty step-set string")
    vectors: list[tuple[Vector, int]] = []
    pos = 0
    token_re = re.compile(
        r"\s*(?:\((?P<vec>[^()]*)\)|(?P<name>[A-Za-z]+))\s*(?:[xX*]\s*(?P<mult>\d+))?\s*(?:[;,]|$)"
    )
    while pos < len(text):
        m = token_re.match(text, pos)
        if m is None or m.end() == pos:
            raise StepSetParseError(f"cannot parse step set near {text[pos:]!r}")
        pos = m.end()
        mult = int(m.group("mult")) if m.group("mult") else 1
        if m.group("vec") is not None:
            try:
                vec = tuple(int(c) for c in m.group("vec").split(","))
            except ValueError:
                raise StepSetParseError(f"bad vector ({m.group('vec')})") from None
        else:
            name = m.group("name").upper()
            if name not in COMPASS:
                raise StepSetParseError(f"unknown compass direction {name!r}")
            vec = COMPASS[name]
        vectors.append((vec, mult))
    dims = {len(v) for v, _ in vectors}
    if len(dims) != 1:
        raise StepSetParseError("steps of mixed dimension")
    try:
        return StepSet(dims.pop(), tuple(vectors))
    except ValueError as exc:
        raise StepSetParseError(str(exc)) from None


def format_stepset(S: StepSet) -> str:
    """Canonical text form ``(i,j)xm;...``; ``parse_stepset`` inverts it."""
    return ";".join(f"({','.join(str(c) for c in v)})x{m}" for v, m in S.steps)


def compass_string(S: StepSet) -> str:
    """``N,SW,...`` for 2D small-step sets, falling back to the canonical form."""
    if S.dimension != 2 or not all(v in COMPASS_NAME for v in S.vectors):
        return format_stepset(S)
    parts = []
    for v, m in S.steps:
        parts.append(COMPASS_NAME[v] + (f"x{m}" if m > 1 else ""))
    return ",".join(parts)


def drift(S: StepSet) -> tuple[int, ...]:
    """Multiplicity-weighted vector sum of the steps."""
    return tuple(sum(m * v[k] for v, m in S.steps) for k in range(S.dimension))


@dataclass(frozen=True)
class InventoryValue:
    value: float
    gradient: tuple | None = None
    hessian: tuple | None = None


def eval_inventory(S: StepSet, point: Sequence[float], order: int = 0) -> InventoryValue:
    """Value (and gradient/Hessian) of P(x) = sum_s m_s x^s at a positive point.

    At the all-ones point the result is exact integer arithmetic.
    """
    point = tuple(point)
    if len(point) != S.dimension:
        raise DomainError(f"point has dimension {len(point)}, expected {S.dimension}")
    if any(not (c > 0) for c in point):
        raise DomainError("inventory is only evaluated at strictly positive points")
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    d = S.dimension
    exact = all(c == 1 for c in point)

    if exact:
        monos = [(m, v, 1) for v, m in S.steps]
    else:
        monos = [(m, v, math.prod(c**e for c, e in zip(point, v))) for v, m in S.steps]

    value = sum(m * t for m, _, t in monos)
    grad = hess = None
    if order >= 1:
        if exact:
            grad = tuple(sum(m * v[k] for m, v, _ in monos) for k in range(d))
        else:
            grad = tuple(math.fsum(m * v[k] * t for m, v, t in monos) / point[k] for k in range(d))
    if order == 2:
        rows = []
        for k in range(d):
            row = []
            for l in range(d):
                if exact:
                    row.append(sum(m * v[k] * (v[l] - (k == l)) for m, v, _ in monos))
                else:
                    s = math.fsum(m * v[k] * (v[l] - (k == l)) * t for m, v, t in monos)
                    row.append(s / (point[k] * point[l]))
            rows.append(tuple(row))
        hess = tuple(rows)
    return InventoryValue(value, grad, hess)


def covariance(S: StepSet) -> int:
    """gamma = P_xy(1,1) - delta_x * delta_y, exact."""
    if S.dimension != 2:
        raise UnsupportedError("covariance is defined for two-dimensional step sets only")
    dx, dy = drift(S)
    return sum(m * v[0] * v[1] for v, m in S.steps) - dx * dy


def reflect_xy(S: StepSet) -> StepSet:
    """Swap the first two coordinates of every step."""
    if S.dimension < 2:
        raise UnsupportedError("need at least two coordinates to swap")
    return StepSet(S.dimension, tuple(((v[1], v[0]) + v[2:], m) for v, m in S.steps))


def negate_axis(S: StepSet, axis: int) -> StepSet:
    """Reflect coordinate ``axis`` of every step (i -> -i)."""
    return StepSet(
        S.dimension,
        tuple((tuple(-c if k == axis else c for k, c in enumerate(v)), m) for v, m in S.steps),
    )


def _walks_leave_every_wall(S: StepSet, horizon: int) -> bool:
    """True when every coordinate becomes positive on some orthant walk of length <= horizon."""
    frontier = {(0,) * S.dimension}
    seen_positive = [False] * S.dimension
    for _ in range(horizon):
        nxt = set()
        for p in frontier:
            for v in S.vectors:
                q = tuple(a + b for a, b in zip(p, v))
                if min(q) >= 0:
                    nxt.add(q)
        for q in nxt:
            for k, c in enumerate(q):
                if c > 0:
                    seen_positive[k] = True
        frontier = nxt
        if all(seen_positive) or not frontier:
            break
    return all(seen_positive)


def is_orthant_essential(S: StepSet, horizon: int = ESSENTIAL_HORIZON) -> bool:
    """Enumeration test that every orthant wall genuinely constrains the walks.

    Requires, up to ``horizon`` steps: some non-empty orthant walk exists, each
    coordinate becomes positive on some walk (walks are not confined to a wall),
    and for each wall k the orthant count is strictly below the count with wall k
    removed.
    """
    from .enumeration import count_region

    q = count_region(S, horizon, (True,) * S.dimension)
    if not any(q[1:]):
        return False
    if not _walks_leave_every_wall(S, horizon):
        return False
    for k in range(S.dimension):
        mask = tuple(j != k for j in range(S.dimension))
        h = count_region(S, horizon, mask)
        if not any(a < b for a, b in zip(q, h)):
            return False
    return True


def is_quarterplane_essential(S: StepSet, horizon: int = ESSENTIAL_HORIZON) -> bool:
    if S.dimension != 2:
        raise UnsupportedError("quarter-plane essentiality needs a two-dimensional step set")
    return is_orthant_essential(S, horizon)
