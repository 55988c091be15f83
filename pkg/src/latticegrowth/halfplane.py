"""Half-plane growth constants and the optimal bounding half-plane.

A step set restricted to the half-plane {x sin(theta) + y cos(theta) >= 0} behaves
like the one-dimensional model whose steps are the projections of the steps onto
the normal (sin theta, cos theta).  For a 1D multiset A with inventory
chi(u) = sum u^a the growth constant is |A| when the drift sum(A) is >= 0 and
chi(tau) otherwise, tau being the positive minimiser of chi.

Every minimisation runs in log-coordinates, where inventories become sums of
exponentials and are convex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .certificates import GrowthBound
from .errors import (
    ConvergenceError,
    DomainError,
    InessentialModelError,
    InvalidNormalError,
    NoCriticalPointError,
    UnsupportedError,
)
from .stepset import StepSet, drift, eval_inventory, is_quarterplane_essential

MERGE_TOL = 1e-14
DRIFT_EPS = 1e-12
GRAD_TOL = 1e-12
MAX_ITER = 200
ESCAPE_NORM = 60.0

NONNEG_DRIFT = "nonneg-drift"
NEG_DRIFT = "neg-drift"


# ---------------------------------------------------------------------------
# one-dimensional models


@dataclass(frozen=True)
class Exponent1D:
    """Multiset of real step lengths, stored as sorted (value, multiplicity) pairs."""

    exponents: tuple[tuple[float, int], ...]

    @classmethod
    def from_values(cls, values: Sequence[float]) -> Exponent1D:
        return cls(_merge((float(a), 1) for a in values))

    @property
    def size(self) -> int:
        return sum(m for _, m in self.exponents)

    @property
    def values(self) -> list[float]:
        return [a for a, m in self.exponents for _ in range(m)]

    @property
    def drift(self) -> float:
        return math.fsum(a * m for a, m in self.exponents)

    def is_nontrivial(self) -> bool:
        return any(a > 0 for a, _ in self.exponents) and any(a < 0 for a, _ in self.exponents)

    def has_negative(self) -> bool:
        return any(a < 0 for a, _ in self.exponents)

    def chi(self, u: float) -> float:
        return math.fsum(m * u**a for a, m in self.exponents)

    def dchi(self, u: float) -> float:
        return math.fsum(m * a * u ** (a - 1) for a, m in self.exponents)

    def scaled(self, r: float) -> Exponent1D:
        return Exponent1D(_merge((r * a, m) for a, m in self.exponents))


def _merge(pairs) -> tuple[tuple[float, int], ...]:
    """Sort and merge exponents equal up to MERGE_TOL relative to the largest one."""
    pairs = sorted(pairs)
    tol = MERGE_TOL * max((abs(a) for a, _ in pairs), default=0.0)
    out: list[list] = []
    for a, m in pairs:
        if out and abs(out[-1][0] - a) <= tol:
            out[-1][1] += m
        else:
            out.append([a, m])
    return tuple((a, m) for a, m in out)


def _log_derivs(A: Exponent1D, t: float) -> tuple[float, float, float]:
    """f'(t), f''(t) for f(t) = sum m e^{a t}, rescaled by the largest term, plus that scale."""
    shift = max(a * t for a, _ in A.exponents)
    terms = [(a, m * math.exp(a * t - shift)) for a, m in A.exponents]
    g = math.fsum(a * w for a, w in terms)
    h = math.fsum(a * a * w for a, w in terms)
    return g, h, math.fsum(abs(a) * w for a, w in terms)


def log_tau(A: Exponent1D) -> float:
    """log of the positive critical point of chi, by bracketed Newton on t = log u.

    The exponents are first divided by their largest modulus s; tau is invariant
    under that up to tau_A = tau_B ** (1/s), so the solve is always well scaled.
    """
    if not A.exponents:
        raise ValueError("empty exponent multiset")
    if not A.is_nontrivial():
        raise NoCriticalPointError("inventory needs a positive and a negative exponent")
    s = max(abs(a) for a, _ in A.exponents)
    B = Exponent1D(tuple((a / s, m) for a, m in A.exponents))

    def gprime(t):
        return _log_derivs(B, t)[0]

    # f is strictly convex in t, so f' is increasing; bracket its root
    lo, hi = -1.0, 1.0
    while gprime(lo) > 0:
        lo *= 2
        if lo < -1e6:
            raise ConvergenceError("could not bracket the critical point")
    while gprime(hi) < 0:
        hi *= 2
        if hi > 1e6:
            raise ConvergenceError("could not bracket the critical point")

    t = 0.0 if lo < 0.0 < hi else 0.5 * (lo + hi)
    for _ in range(MAX_ITER):
        g, h, scale = _log_derivs(B, t)
        if abs(g) <= 4e-16 * scale:
            return t / s
        if g > 0:
            hi = t
        else:
            lo = t
        step = t - g / h
        t = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= 1e-15 * max(1.0, abs(t)):
            return t / s
    raise ConvergenceError("Newton iteration for tau did not converge")


def _negative_drift(A: Exponent1D) -> bool:
    """Drift sign test, relative to the largest exponent so that it is scale free."""
    s = max(abs(a) for a, _ in A.exponents)
    return A.drift < -DRIFT_EPS * s


def tau_of(A: Exponent1D) -> float:
    """tau > 0 with chi'(tau) = 0 for a non-trivial exponent multiset."""
    t = log_tau(A)
    tau = math.exp(t)
    chi = A.chi(tau)
    if abs(A.dchi(tau)) / chi > GRAD_TOL:
        # tolerance measured in u; near-flat rescaling cannot reach it in double precision
        raise ConvergenceError(f"|chi'(tau)|/chi(tau) = {abs(A.dchi(tau)) / chi:.3g} above {GRAD_TOL}")
    return tau


def chi_minimum(A: Exponent1D) -> float:
    """min_{u>0} chi(u) for a non-trivial multiset, regardless of drift sign."""
    t = log_tau(A)
    return math.fsum(m * math.exp(a * t) for a, m in A.exponents)


def half_plane_growth(A: Exponent1D) -> float:
    """Growth constant of 1D walks with steps A kept >= 0.

    |A| for nonnegative drift (or no negative step); chi(tau) otherwise.  A multiset
    with negative steps but no positive one has growth equal to its number of zero
    steps, which is also inf chi.
    """
    if not A.exponents:
        raise ValueError("empty exponent multiset")
    if not A.has_negative() or not _negative_drift(A):
        return float(A.size)
    if not A.is_nontrivial():
        return float(sum(m for a, m in A.exponents if a == 0))
    return chi_minimum(A)


def project(S: StepSet, normal: Sequence[float]) -> Exponent1D:
    """Exponents <s, normal> for every step, multiplicities kept."""
    normal = tuple(float(c) for c in normal)
    if len(normal) != S.dimension:
        raise InvalidNormalError("normal dimension does not match the step set")
    if any(c < 0 for c in normal) or not any(normal):
        raise InvalidNormalError("normal components must be >= 0 and not all zero")
    if abs(math.hypot(*normal) - 1.0) > 1e-12:
        raise InvalidNormalError("normal must have unit length")
    raw = [(math.fsum(a * b for a, b in zip(v, normal)), m) for v, m in S.steps]
    # rounding leaves ~1e-17 where an exponent cancels exactly; call that zero
    return Exponent1D(_merge((0.0 if abs(a) < MERGE_TOL else a, m) for a, m in raw))


def angle_normal(theta: float) -> tuple[float, float]:
    """(sin theta, cos theta), with the endpoints substituted exactly."""
    if theta == 0.0:
        return (0.0, 1.0)
    if theta == math.pi / 2:
        return (1.0, 0.0)
    return (math.sin(theta), math.cos(theta))


# ---------------------------------------------------------------------------
# angles in the quarter plane


@dataclass(frozen=True)
class AngleBound:
    theta: float
    growth: float
    regime: str
    tau: float | None = None


def growth_at_angle(S: StepSet, theta: float) -> AngleBound:
    """K_S(theta): growth of S in the half-plane with normal (sin theta, cos theta)."""
    if S.dimension != 2:
        raise UnsupportedError("angles parametrise two-dimensional half-planes only")
    if not (0.0 <= theta <= math.pi / 2):
        raise DomainError(f"theta={theta} outside [0, pi/2]")
    nx, ny = angle_normal(theta)
    dx, dy = drift(S)
    A = project(S, (nx, ny))
    regime = NONNEG_DRIFT if dx * nx + dy * ny >= -DRIFT_EPS else NEG_DRIFT
    tau = math.exp(log_tau(A)) if regime == NEG_DRIFT and A.is_nontrivial() else None
    return AngleBound(theta, half_plane_growth(A), regime, tau)


def _batch_growth(S: StepSet, normals: np.ndarray) -> np.ndarray:
    """Vectorised half_plane_growth over many normals (rows of ``normals``)."""
    V = np.array(S.vectors, dtype=float)
    m = np.array([m for _, m in S.steps], dtype=float)
    E = normals @ V.T  # (G, k) projected exponents
    E[np.abs(E) < MERGE_TOL] = 0.0
    size = m.sum()
    out = np.full(len(E), size)
    drifts = E @ m
    rowmax = np.abs(E).max(axis=1)
    neg = drifts < -DRIFT_EPS * rowmax
    has_pos = (E > 0).any(axis=1)
    degenerate = neg & ~has_pos
    out[degenerate] = ((E[degenerate] == 0) * m).sum(axis=1)
    todo = neg & has_pos
    if not todo.any():
        return out
    rs = rowmax[todo][:, None]
    Et = E[todo] / rs
    lo = np.full(len(Et), -1.0)
    hi = np.full(len(Et), 1.0)

    def deriv(t):
        z = Et * t[:, None]
        z -= z.max(axis=1, keepdims=True)
        w = m * np.exp(z)
        return (Et * w).sum(axis=1), (Et * Et * w).sum(axis=1), (np.abs(Et) * w).sum(axis=1)

    for _ in range(60):
        bad = deriv(lo)[0] > 0
        if not bad.any():
            break
        lo[bad] *= 2
    for _ in range(60):
        bad = deriv(hi)[0] < 0
        if not bad.any():
            break
        hi[bad] *= 2
    t = np.clip(np.zeros(len(Et)), lo, hi)
    for _ in range(MAX_ITER):
        g, h, scale = deriv(t)
        done = np.abs(g) <= 4e-16 * scale
        if done.all():
            break
        hi = np.where(g > 0, t, hi)
        lo = np.where(g < 0, t, lo)
        newton = t - g / h
        inside = (newton > lo) & (newton < hi)
        t = np.where(done, t, np.where(inside, newton, 0.5 * (lo + hi)))
        if np.all(done | (hi - lo <= 1e-15 * np.maximum(1.0, np.abs(t)))):
            break
    out[todo] = (m * np.exp(Et * t[:, None])).sum(axis=1)  # Et t = E (t / s)
    return out


def theta_sweep(S: StepSet, gridsize: int) -> list[AngleBound]:
    """K_S(theta) on the uniform grid theta_k = k pi / (2 (gridsize - 1))."""
    if S.dimension != 2:
        raise UnsupportedError("angles parametrise two-dimensional half-planes only")
    if gridsize < 2:
        raise ValueError("gridsize must be at least 2")
    thetas = [k * math.pi / (2 * (gridsize - 1)) for k in range(gridsize)]
    thetas[-1] = math.pi / 2
    normals = np.array([angle_normal(th) for th in thetas])
    growth = _batch_growth(S, normals)
    dx, dy = drift(S)
    out = []
    for th, (nx, ny), k in zip(thetas, normals, growth):
        regime = NONNEG_DRIFT if dx * nx + dy * ny >= -DRIFT_EPS else NEG_DRIFT
        out.append(AngleBound(th, float(k), regime))
    return out


# ---------------------------------------------------------------------------
# critical point of the multivariate inventory


@dataclass(frozen=True)
class CriticalPoint:
    coordinates: tuple[float, ...]
    inventory_value: float
    converged: bool
    residual: float
    iterations: int = 0
    note: str = ""

    @property
    def log_coordinates(self) -> tuple[float, ...]:
        return tuple(math.log(c) for c in self.coordinates)


def interior_minimum_exists(S: StepSet) -> bool:
    """True when the origin lies in the relative interior of the convex hull of the steps.

    That is exactly when v -> P(e^v) attains its infimum; otherwise some direction
    leaves every step's exponent non-increasing and strictly decreases one.
    Solved as the LP  max eps  s.t.  sum l_s s = 0, sum l_s = 1, l_s >= eps.
    """
    V = np.array(S.vectors, dtype=float)
    k, d = V.shape
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_eq = np.zeros((d + 1, k + 1))
    A_eq[:d, :k] = V.T
    A_eq[d, :k] = 1.0
    b_eq = np.zeros(d + 1)
    b_eq[d] = 1.0
    A_ub = np.hstack([-np.eye(k), np.ones((k, 1))])  # eps - l_s <= 0
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(k), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * k + [(None, 1.0)], method="highs")
    return bool(res.status == 0 and -res.fun > 1e-9)


def _log_inventory(V: np.ndarray, m: np.ndarray, v: np.ndarray):
    z = V @ v
    shift = z.max()
    w = m * np.exp(z - shift)
    total = w.sum()
    p = w / total
    g = p @ V
    H = (V * p[:, None]).T @ V - np.outer(g, g)
    return math.log(total) + shift, g, H


def critical_point(S: StepSet) -> CriticalPoint:
    """Positive point where every partial of the inventory vanishes.

    Damped Newton on log P(e^v), started at v = 0.  When the origin is not in the
    relative interior of the step hull the infimum escapes to the boundary of the
    orthant; the iteration is then continued until the iterate norm passes
    ESCAPE_NORM and reported with converged=False.
    """
    V = np.array(S.vectors, dtype=float)
    m = np.array([m for _, m in S.steps], dtype=float)
    interior = interior_minimum_exists(S)
    v = np.zeros(S.dimension)
    it = 0
    note = ""
    for it in range(1, MAX_ITER + 1):
        f, g, H = _log_inventory(V, m, v)
        if interior and np.max(np.abs(g)) <= 1e-15 * max(1.0, np.max(np.abs(V))):
            break
        step = -np.linalg.lstsq(H, g, rcond=1e-13)[0]
        if not np.all(np.isfinite(step)) or not step.any():
            step = -g
        slope = g @ step
        if slope >= 0:
            step, slope = -g, -(g @ g)
        s = 1.0
        while s > 1e-12:
            f_new = _log_inventory(V, m, v + s * step)[0]
            if f_new <= f + 1e-4 * s * slope:
                break
            s *= 0.5
        else:
            note = "line search stalled"
            break
        if not interior:
            # along an escape ray the objective keeps decreasing: stretch the step
            while (np.linalg.norm(v + 2 * s * step) <= 2 * ESCAPE_NORM
                   and _log_inventory(V, m, v + 2 * s * step)[0] <= f_new):
                s *= 2
                f_new = _log_inventory(V, m, v + s * step)[0]
        v = v + s * step
        if not interior and np.linalg.norm(v) > ESCAPE_NORM:
            note = f"iterate norm exceeded {ESCAPE_NORM:g}: infimum escapes to the orthant boundary"
            break
    else:
        note = note or "iteration limit reached"

    coords = tuple(float(math.exp(c)) for c in v)
    value = eval_inventory(S, coords, 1) if np.linalg.norm(v) < 700 else None
    if not interior:
        return CriticalPoint(coords, value.value if value else float("nan"), False, float("nan"), it,
                             note or "no interior critical point")
    residual = max(abs(c) for c in value.gradient)
    converged = residual <= GRAD_TOL * value.value
    if not converged:
        note = note or f"residual {residual:.3g} above tolerance"
    return CriticalPoint(coords, float(value.value), converged, residual, it, note)


def critical_angle(cp: CriticalPoint) -> float | None:
    """theta* = arctan(log alpha / log beta) when that ratio is >= 0, else None.

    beta = 1 gives pi/2 and alpha = 1 gives 0; alpha = beta = 1 reports 0.
    """
    la, lb = cp.log_coordinates
    la = 0.0 if abs(la) < 1e-12 else la
    lb = 0.0 if abs(lb) < 1e-12 else lb
    if la == 0.0:
        return 0.0
    if lb == 0.0:
        return math.pi / 2
    if la * lb < 0:
        return None
    return math.atan2(abs(la), abs(lb))


def best_upper_bound(S: StepSet, check_essential: bool = True) -> GrowthBound:
    """min over theta of K_S(theta), with the minimising angle as certificate.

    The minimum sits at theta* = arctan(log alpha/log beta) when that angle lies in
    [0, pi/2], and otherwise at an endpoint.  All three candidates are evaluated
    and the smallest kept, so the answer is also right when the projected drift at
    theta* is positive (K_S is then |S| there, not P(alpha, beta)).
    """
    if S.dimension != 2:
        raise UnsupportedError("best_upper_bound works on two-dimensional step sets")
    if check_essential and not is_quarterplane_essential(S):
        raise InessentialModelError("model not quarter-plane essential")
    candidates: list[tuple[float, float, str]] = []
    cp = critical_point(S)
    if cp.converged:
        theta = critical_angle(cp)
        if theta is not None:
            la, lb = cp.log_coordinates
            if la >= -1e-12 and lb >= -1e-12:
                candidates.append((cp.inventory_value, theta, "critical point"))
            else:
                candidates.append((growth_at_angle(S, theta).growth, theta, "critical point"))
    for theta in (0.0, math.pi / 2):
        candidates.append((growth_at_angle(S, theta).growth, theta, "endpoint"))
    best = min(c[0] for c in candidates)
    value, theta, origin = next(c for c in candidates if c[0] <= best + 1e-12)
    flat = all(abs(c[0] - best) <= 1e-12 for c in candidates)
    detail = f"theta*={theta:.12g} ({origin})"
    if flat:
        detail += "; minimum attained at every candidate angle"
    return GrowthBound(
        value=value,
        kind="upper",
        tag="angle",
        detail=detail,
        model=S,
        data={"theta": theta, "critical_point": cp.coordinates if cp.converged else None},
    )
