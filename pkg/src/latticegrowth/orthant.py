"""Hyperplane bounds for walks in the d-dimensional nonnegative orthant.

For a unit normal p >= 0 the walks kept on the orthant side of the hyperplane
p^perp have growth K_S(p) = half_plane_growth(<S, p>).  Writing g(v) = P(e^v),
K_S(p) = min_{t >= 0} g(t p), so min_p K_S(p) is the minimum of g over the closed
nonnegative cone.  Its minimiser lies in the relative interior of some face
{v_k = 0 for k outside J}, where it is the critical point of the inventory of the
steps projected onto the coordinates J.  Faces whose projected inventory has no
interior minimum fall back to a grid over their normals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .certificates import GrowthBound
from .errors import InessentialModelError, InvalidNormalError
from .halfplane import (
    DRIFT_EPS,
    NEG_DRIFT,
    NONNEG_DRIFT,
    CriticalPoint,
    _batch_growth,
    critical_point,
    half_plane_growth,
    project,
)
from .stepset import StepSet, drift, is_orthant_essential

ORTHANT_ESSENTIAL_HORIZON = 6
GRID_SPACING = 1e-3
MAX_GRID_POINTS = 400_000


@dataclass(frozen=True)
class HyperplaneBound:
    normal: tuple[float, ...]
    growth: float
    regime: str


def hyperplane_growth(S: StepSet, normal: Sequence[float]) -> HyperplaneBound:
    normal = tuple(float(c) for c in normal)
    A = project(S, normal)
    d = drift(S)
    regime = NONNEG_DRIFT if sum(a * b for a, b in zip(d, normal)) >= -DRIFT_EPS else NEG_DRIFT
    return HyperplaneBound(normal, half_plane_growth(A), regime)


def min_inventory_orthant(S: StepSet) -> CriticalPoint:
    """Minimiser of P over the positive orthant (log-coordinate Newton)."""
    return critical_point(S)


def _face_stepset(S: StepSet, coords: Sequence[int]) -> StepSet:
    return StepSet(len(coords), tuple((tuple(v[k] for k in coords), m) for v, m in S.steps))


def _sphere_point(angles: np.ndarray) -> np.ndarray:
    """Map angles in [0, pi/2]^(k-1) to unit vectors in the nonnegative orthant of R^k."""
    n, km1 = angles.shape
    out = np.ones((n, km1 + 1))
    for j in range(km1):
        out[:, j] *= np.cos(angles[:, j])
        out[:, j + 1 :] *= np.sin(angles[:, j])[:, None]
    out[np.abs(out) < 1e-17] = 0.0
    return out


def _golden(f, a: float, b: float, iters: int = 60) -> tuple[float, float]:
    """Golden-section minimisation of f on [a, b]."""
    r = (math.sqrt(5) - 1) / 2
    c, d = b - r * (b - a), a + r * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - r * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + r * (b - a)
            fd = f(d)
    x = c if fc <= fd else d
    return x, min(fc, fd)


def grid_minimum(S: StepSet, spacing: float = GRID_SPACING, refine: bool = True) -> tuple[float, np.ndarray]:
    """Grid search of K_S(p) over unit normals p >= 0, refined by cyclic golden-section.

    The spacing is coarsened when the grid would exceed MAX_GRID_POINTS.
    """
    d = S.dimension
    if d == 1:
        p = np.array([1.0])
        return float(_batch_growth(S, p[None, :])[0]), p
    free = d - 1
    per_axis = int(round((math.pi / 2) / spacing)) + 1
    while per_axis**free > MAX_GRID_POINTS:
        per_axis = int(per_axis / 2) + 1
    axis = np.linspace(0.0, math.pi / 2, per_axis)
    best_val, best_ang = math.inf, None
    # chunk the cartesian product to bound memory
    head = list(itertools.product(range(per_axis), repeat=max(0, free - 1)))
    for prefix in head:
        ang = np.empty((per_axis, free))
        for j, i in enumerate(prefix):
            ang[:, j] = axis[i]
        ang[:, -1] = axis
        vals = _batch_growth(S, _sphere_point(ang))
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_ang = float(vals[i]), ang[i].copy()
    if refine:
        h = axis[1] - axis[0]

        def f_at(angles):
            return float(_batch_growth(S, _sphere_point(np.array([angles])))[0])

        for _ in range(3):
            for j in range(free):
                lo, hi = max(0.0, best_ang[j] - h), min(math.pi / 2, best_ang[j] + h)

                def f1(x, j=j):
                    trial = best_ang.copy()
                    trial[j] = x
                    return f_at(trial)

                x, val = _golden(f1, lo, hi)
                if val < best_val:
                    best_val = val
                    best_ang[j] = x
    return best_val, _sphere_point(best_ang[None, :])[0]


def conjectured_growth(
    S: StepSet, check_essential: bool = True, spacing: float = GRID_SPACING
) -> GrowthBound:
    """min over unit normals p >= 0 of K_S(p), with the minimising normal as certificate."""
    d = S.dimension
    if check_essential and not is_orthant_essential(S, ORTHANT_ESSENTIAL_HORIZON):
        raise InessentialModelError("model not orthant essential")
    best = (float(S.size), tuple([1.0 / math.sqrt(d)] * d), "apex: nonnegative drift along every normal")
    candidates = [best]
    failed_faces = []
    for r in range(1, d + 1):
        for J in itertools.combinations(range(d), r):
            F = _face_stepset(S, J)
            cp = critical_point(F)
            if not cp.converged:
                failed_faces.append(J)
                continue
            logs = cp.log_coordinates
            if min(logs) < -1e-12:
                continue
            normal = [0.0] * d
            norm = math.sqrt(sum(x * x for x in logs))
            if norm < 1e-12:
                # drift zero on this face: value |S|, already the apex candidate
                continue
            for k, x in zip(J, logs):
                normal[k] = max(0.0, x) / norm
            candidates.append((cp.inventory_value, tuple(normal), f"critical point of face {J}"))
    for J in failed_faces:
        F = _face_stepset(S, J)
        val, p = grid_minimum(F, spacing)
        normal = [0.0] * d
        for k, x in zip(J, p):
            normal[k] = float(x)
        candidates.append((val, tuple(normal), f"grid on face {J}"))
    value, normal, origin = min(candidates, key=lambda c: c[0])
    return GrowthBound(
        value=value,
        kind="upper",
        tag="normal",
        detail=f"normal={tuple(round(c, 12) for c in normal)} ({origin})",
        model=S,
        data={"normal": normal, "origin": origin},
    )
