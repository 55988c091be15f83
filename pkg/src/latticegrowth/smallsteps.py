"""Closed-form growth constants and the drift/covariance classification for small steps.

For S in {0,+-1}^2 write P(x,y) = a(x) y + b(x) + c(x)/y = at(y) x + bt(y) + ct(y)/x.
The candidate growth constants are

    |S|,   P(alpha, beta),   b(1) + 2 sqrt(a(1) c(1)),   bt(1) + 2 sqrt(at(1) ct(1)),

named S, rho0, rhoY and rhoX.  rhoY comes from the vertical decomposition and equals
the minimum of the projected inventory at theta = 0; rhoX pairs with theta = pi/2.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import InconsistencyError, InessentialModelError, UnsupportedError
from .halfplane import best_upper_bound, critical_angle, critical_point
from .stepset import (
    COMPASS,
    StepSet,
    compass_string,
    covariance,
    drift,
    is_quarterplane_essential,
    reflect_xy,
)

AGREE_TOL = 1e-9

# (sign dx, sign dy) -> formulas that may apply; gamma decides between two
_TABLE = {
    (1, -1): ("rhoY",),
    (0, -1): ("rho0", "rhoY"),
    (-1, 1): ("rhoX",),
    (-1, 0): ("rho0", "rhoX"),
    (-1, -1): ("rho0",),
}


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def _sign_char(s: int) -> str:
    return "+0-"[1 - s]


@dataclass(frozen=True)
class FRValues:
    cardinality: int
    rho0_inv: float | None
    rhoX_inv: float
    rhoY_inv: float


@dataclass(frozen=True)
class FRPrediction:
    drift_signs: tuple[str, str]
    covariance_sign: str
    chosen: str  # "S" | "rho0" | "rhoX" | "rhoY" | "ambiguous-equal"
    candidates: tuple[str, ...]
    predicted_growth: float | None
    applicable: bool
    values: FRValues


def _require_small(S: StepSet):
    if S.dimension != 2 or not S.is_small():
        raise UnsupportedError("closed forms need a two-dimensional small-step set")


def fr_values(S: StepSet, check_essential: bool = False) -> FRValues:
    """The four candidate growth constants of a small-step model."""
    _require_small(S)
    if check_essential and not is_quarterplane_essential(S):
        raise InessentialModelError("model not quarter-plane essential")
    a = sum(m for v, m in S.steps if v[1] == 1)
    b = sum(m for v, m in S.steps if v[1] == 0)
    c = sum(m for v, m in S.steps if v[1] == -1)
    at = sum(m for v, m in S.steps if v[0] == 1)
    bt = sum(m for v, m in S.steps if v[0] == 0)
    ct = sum(m for v, m in S.steps if v[0] == -1)
    rhoY = b + 2 * math.sqrt(a * c)
    rhoX = bt + 2 * math.sqrt(at * ct)
    cp = critical_point(S)
    rho0 = cp.inventory_value if cp.converged else None
    size = S.size
    for val in (rho0, rhoX, rhoY):
        if val is not None and val > size + 1e-12:
            raise InconsistencyError(f"candidate {val} exceeds |S| = {size}")
    return FRValues(size, rho0, rhoX, rhoY)


def fr_classify(S: StepSet, values: FRValues | None = None) -> FRPrediction:
    """Pick the growth constant from the sign of the drift and of the covariance.

    ``applicable`` is False for the singular models, detected by the absence of an
    interior critical point of the inventory.
    """
    values = fr_values(S) if values is None else values
    dx, dy = drift(S)
    gamma = covariance(S)
    sx, sy, sg = _sign(dx), _sign(dy), _sign(gamma)
    signs = (_sign_char(sx), _sign_char(sy))
    applicable = values.rho0_inv is not None
    lookup = {"S": float(values.cardinality), "rho0": values.rho0_inv,
              "rhoX": values.rhoX_inv, "rhoY": values.rhoY_inv}

    if sx >= 0 and sy >= 0:
        names: tuple[str, ...] = ("S",)
    else:
        row = _TABLE[(sx, sy)]
        if len(row) == 1:
            names = row
        elif sg < 0:
            names = (row[0],)
        elif sg > 0:
            names = (row[1],)
        else:
            names = row

    if len(names) == 1:
        chosen = names[0]
        predicted = lookup[chosen]
    else:
        present = [lookup[n] for n in names if lookup[n] is not None]
        if len(present) == 2 and abs(present[0] - present[1]) > AGREE_TOL:
            raise InconsistencyError(
                f"{compass_string(S)}: {names[0]}={present[0]!r} and {names[1]}={present[1]!r} disagree"
            )
        chosen = "ambiguous-equal" if len(present) == 2 else next(n for n in names if lookup[n] is not None)
        predicted = present[0] if present else None

    return FRPrediction(signs, _sign_char(sg), chosen, names, predicted, applicable, values)


@dataclass(frozen=True)
class ModelSurveyEntry:
    stepset: StepSet
    self_symmetric: bool
    essential: bool
    prediction: FRPrediction
    min_theta_bound: float
    theta_star: float
    fr_applicable: bool

    def row(self) -> dict:
        dx, dy = drift(self.stepset)
        p = self.prediction
        return {
            "stepset": compass_string(self.stepset),
            "size": self.stepset.size,
            "drift_x": dx,
            "drift_y": dy,
            "covariance": covariance(self.stepset),
            "chosen": p.chosen,
            "predicted": p.predicted_growth,
            "theta_star": self.theta_star,
            "min_bound": self.min_theta_bound,
            "fr_applicable": self.fr_applicable,
        }


SMALL_STEPS = [v for v in sorted(COMPASS.values())]


def _canonical(S: StepSet) -> tuple:
    return tuple(S.steps)


def small_step_representatives() -> list[StepSet]:
    """Essential nonzero small-step sets, one per x<->y class, in lexicographic order."""
    reps = {}
    for r in range(1, len(SMALL_STEPS) + 1):
        for subset in itertools.combinations(SMALL_STEPS, r):
            S = StepSet.from_vectors(subset)
            T = reflect_xy(S)
            rep = min(S, T, key=_canonical)
            if _canonical(rep) in reps:
                continue
            if is_quarterplane_essential(S):
                reps[_canonical(rep)] = rep
    return [reps[k] for k in sorted(reps)]


def survey_entry(S: StepSet) -> ModelSurveyEntry:
    pred = fr_classify(S)
    bound = best_upper_bound(S, check_essential=False)
    return ModelSurveyEntry(
        stepset=S,
        self_symmetric=reflect_xy(S) == S,
        essential=True,
        prediction=pred,
        min_theta_bound=bound.value,
        theta_star=bound.data["theta"],
        fr_applicable=pred.applicable,
    )


def enumerate_small_models(jobs: int = 1) -> list[ModelSurveyEntry]:
    """The census of essential small-step quarter-plane models up to x<->y symmetry."""
    reps = small_step_representatives()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(survey_entry, reps))
    return [survey_entry(S) for S in reps]


def critpoint_identity_gap(S: StepSet) -> float | None:
    """|P(alpha,beta) - min chi_{theta*}| when theta* lies in [0, pi/2], else None."""
    from .halfplane import angle_normal, chi_minimum, project

    cp = critical_point(S)
    if not cp.converged:
        return None
    theta = critical_angle(cp)
    if theta is None:
        return None
    A = project(S, angle_normal(theta))
    return abs(cp.inventory_value - chi_minimum(A))
