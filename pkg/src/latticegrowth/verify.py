"""Named invariant suites, runnable from the command line.

Each suite returns a SuiteResult; ``run_suites`` times them and keeps the order
of SUITES so the report is deterministic.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .bounds import build_ledger
from .enumeration import brute_force_counts, count_orthant, estimate_growth
from .errors import LedgerIntegrityError
from .halfplane import (
    Exponent1D,
    angle_normal,
    best_upper_bound,
    chi_minimum,
    critical_point,
    half_plane_growth,
    project,
    theta_sweep,
)
from .orthant import conjectured_growth
from .smallsteps import critpoint_identity_gap, enumerate_small_models, fr_classify
from .stepset import StepSet, compass_string, covariance, drift, negate_axis, reflect_xy

SEED = 20240601
IDENTITY_TOL = 1e-9
SCALING_TOL = 1e-10
CONTINUITY_SPACING = 1e-3
CONTINUITY_JUMP = 0.1
CONTINUITY_MIN_TOL = 1e-6
TABLE_MARGIN = 1e-9


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


@lru_cache(maxsize=1)
def survey():
    return tuple(enumerate_small_models())


def _result(name: str, failures: list[str], checked: int, what: str) -> SuiteResult:
    if failures:
        shown = "; ".join(failures[:3])
        more = f" (+{len(failures) - 3} more)" if len(failures) > 3 else ""
        return SuiteResult(name, False, f"{len(failures)}/{checked} {what} failed: {shown}{more}")
    return SuiteResult(name, True, f"{checked} {what} checked")


def random_exponents(rng: np.random.Generator) -> Exponent1D:
    """A random non-trivial multiset: at least one positive and one negative exponent."""
    k = int(rng.integers(2, 9))
    vals = list(rng.uniform(-3.0, 3.0, size=k))
    vals[0] = abs(vals[0]) + 0.01
    vals[1] = -abs(vals[1]) - 0.01
    return Exponent1D.from_values(vals)


def random_rational(rng: np.random.Generator) -> Fraction:
    """Random rational in (0, 10]."""
    den = int(rng.integers(1, 50))
    num = int(rng.integers(1, 10 * den + 1))
    return Fraction(num, den)


def suite_scaling(samples: int = 200) -> SuiteResult:
    rng = np.random.default_rng(SEED)
    failures = []
    for _ in range(samples):
        A = random_exponents(rng)
        r = random_rational(rng)
        base = half_plane_growth(A)
        scaled = half_plane_growth(A.scaled(float(r)))
        if abs(base - scaled) > SCALING_TOL:
            failures.append(f"r={r}: {base!r} vs {scaled!r}")
    return _result("scaling", failures, samples, "scaled multisets")


def suite_convexity(samples_per_model: int = 20) -> SuiteResult:
    """Midpoint convexity of v -> log P(e^v) along random segments."""
    rng = np.random.default_rng(SEED + 1)
    failures = []
    checked = 0
    for e in survey():
        V = np.array(e.stepset.vectors, dtype=float)
        m = np.array([k for _, k in e.stepset.steps], dtype=float)

        def f(v):
            z = V @ v
            top = z.max()
            return top + math.log(float(m @ np.exp(z - top)))

        for _ in range(samples_per_model):
            a, b = rng.uniform(-2, 2, size=2), rng.uniform(-2, 2, size=2)
            checked += 1
            if f((a + b) / 2) > (f(a) + f(b)) / 2 + 1e-12:
                failures.append(compass_string(e.stepset))
    return _result("convexity", failures, checked, "segments")


def suite_critpoint_identity() -> SuiteResult:
    failures = []
    checked = 0
    for e in survey():
        gap = critpoint_identity_gap(e.stepset)
        if gap is None:
            continue
        checked += 1
        if gap > IDENTITY_TOL:
            failures.append(f"{compass_string(e.stepset)} gap {gap:.3g}")
    return _result("critpoint-identity", failures, checked, "models")


def suite_rhox() -> SuiteResult:
    """Radical formulas against the minimum of the projected inventory at both ends."""
    failures = []
    entries = survey()
    for e in entries:
        v = e.prediction.values
        at0 = chi_minimum(project(e.stepset, angle_normal(0.0)))
        at90 = chi_minimum(project(e.stepset, angle_normal(math.pi / 2)))
        if abs(v.rhoY_inv - at0) > IDENTITY_TOL or abs(v.rhoX_inv - at90) > IDENTITY_TOL:
            failures.append(f"{compass_string(e.stepset)}")
    return _result("rhox", failures, len(entries), "models")


def suite_equiv() -> SuiteResult:
    failures = []
    checked = 0
    for e in survey():
        if not e.fr_applicable:
            continue
        checked += 1
        gap = abs(e.prediction.predicted_growth - e.min_theta_bound)
        if gap > IDENTITY_TOL:
            failures.append(f"{compass_string(e.stepset)} gap {gap:.3g}")
    return _result("equiv", failures, checked, "applicable models")


def suite_continuity(spacing: float = CONTINUITY_SPACING) -> SuiteResult:
    gridsize = math.ceil((math.pi / 2) / spacing) + 1
    failures = []
    entries = survey()
    for e in entries:
        vals = np.array([b.growth for b in theta_sweep(e.stepset, gridsize)])
        jump = float(np.max(np.abs(np.diff(vals))))
        gap = float(vals.min()) - e.min_theta_bound
        if jump > CONTINUITY_JUMP or abs(gap) > CONTINUITY_MIN_TOL:
            failures.append(f"{compass_string(e.stepset)} jump {jump:.3g} gap {gap:.3g}")
    return _result("continuity", failures, len(entries), "models")


def normalize_drift(S: StepSet) -> StepSet:
    """Apply x -> 1/x, y -> 1/y and x<->y so that drift_x >= drift_y >= 0."""
    dx, dy = drift(S)
    if dx < 0:
        S = negate_axis(S, 0)
    if dy < 0:
        S = negate_axis(S, 1)
    dx, dy = drift(S)
    if dy > dx:
        S = reflect_xy(S)
    return S


def table1_expected(dx: int, dy: int, gamma: int) -> tuple[str, str] | None:
    """Position of (alpha, beta) relative to 1 for normalized drift; None if no row applies."""
    if dx == 0 and dy == 0:
        return ("=", "=")
    if dx > 0 and dy > 0:
        return ("<", "<")
    if dx > 0 and dy == 0:
        return ("<", ">" if gamma > 0 else "=" if gamma == 0 else "<")
    return None


def _position(x: float, margin: float) -> str:
    if x < 1 - margin:
        return "<"
    if x > 1 + margin:
        return ">"
    return "="


def suite_table1(margin: float = TABLE_MARGIN) -> SuiteResult:
    failures = []
    checked = 0
    for e in survey():
        T = normalize_drift(e.stepset)
        cp = critical_point(T)
        if not cp.converged:
            continue
        dx, dy = drift(T)
        expected = table1_expected(dx, dy, covariance(T))
        if expected is None:
            continue
        checked += 1
        alpha, beta = cp.coordinates
        got = (_position(alpha, margin), _position(beta, margin))
        # equality rows hold to solver precision, strict rows by the margin
        if got != expected:
            failures.append(f"{compass_string(T)} expected {expected} got {got}")
    return _result("table1", failures, checked, "normalized models")


def sample_models(count: int = 10) -> list[StepSet]:
    """Deterministic sample of survey models, spread over the census."""
    entries = survey()
    step = max(1, len(entries) // count)
    return [entries[i].stepset for i in range(0, step * count, step)][:count]


def supermultiplicative(counts: list[int]) -> bool:
    N = len(counts) - 1
    return all(counts[m + n] >= counts[m] * counts[n] for m in range(N + 1) for n in range(N + 1 - m))


def suite_fekete(n_max: int = 20) -> SuiteResult:
    failures = []
    models = sample_models()
    for S in models:
        counts = count_orthant(S, n_max).counts
        upper = best_upper_bound(S, check_essential=False).value
        if not supermultiplicative(counts):
            failures.append(f"{compass_string(S)} not supermultiplicative")
        worst = max(q ** (1.0 / n) for n, q in enumerate(counts) if n > 0 and q > 0)
        if worst > upper + 1e-9:
            failures.append(f"{compass_string(S)} root {worst:.12g} > {upper:.12g}")
    return _result("fekete", failures, len(models), "models")


def suite_brute_force(n_max: int = 7) -> SuiteResult:
    failures = []
    models = [S for S in sample_models() if S.size <= 5]
    for S in models:
        if count_orthant(S, n_max).counts != brute_force_counts(S, n_max):
            failures.append(compass_string(S))
    return _result("brute-force", failures, len(models), "models")


def suite_ledger() -> SuiteResult:
    """Ledger integrity on the census; negative-drift models must resolve."""
    failures = []
    entries = survey()
    resolved = 0
    for e in entries:
        try:
            L = build_ledger(e.stepset, n_max=0)
        except LedgerIntegrityError as exc:
            failures.append(f"{compass_string(e.stepset)}: {exc}")
            continue
        resolved += L.resolved is not None
        dx, dy = drift(e.stepset)
        if dx < 0 and dy < 0 and e.fr_applicable and L.resolved is None:
            failures.append(f"{compass_string(e.stepset)} negative drift but unresolved")
    res = _result("ledger", failures, len(entries), "models")
    if res.passed:
        res = SuiteResult(res.name, True, f"{res.detail}, {resolved} resolved")
    return res


def suite_reflection() -> SuiteResult:
    failures = []
    entries = survey()
    for e in entries:
        T = reflect_xy(e.stepset)
        a = fr_classify(e.stepset).predicted_growth
        b = fr_classify(T).predicted_growth
        ua = e.min_theta_bound
        ub = best_upper_bound(T, check_essential=False).value
        if (a is None) != (b is None) or (a is not None and abs(a - b) > IDENTITY_TOL) or abs(ua - ub) > IDENTITY_TOL:
            failures.append(compass_string(e.stepset))
    return _result("reflection", failures, len(entries), "models")


def suite_orthant_2d() -> SuiteResult:
    failures = []
    entries = survey()
    for e in entries:
        val = conjectured_growth(e.stepset, check_essential=False).value
        if abs(val - e.min_theta_bound) > IDENTITY_TOL:
            failures.append(f"{compass_string(e.stepset)} {val:.12g} vs {e.min_theta_bound:.12g}")
    return _result("orthant-2d", failures, len(entries), "models")


def suite_estimate(n_max: int = 20, rel: float = 0.05) -> SuiteResult:
    failures = []
    models = sample_models()
    for S in models:
        est = estimate_growth(count_orthant(S, n_max)).estimate
        upper = best_upper_bound(S, check_essential=False).value
        if abs(est / upper - 1) > rel:
            failures.append(f"{compass_string(S)} estimate {est:.6g} vs {upper:.6g}")
    return _result("estimate", failures, len(models), "models")


SUITES: dict[str, Callable[[], SuiteResult]] = {
    "scaling": suite_scaling,
    "convexity": suite_convexity,
    "critpoint-identity": suite_critpoint_identity,
    "rhox": suite_rhox,
    "equiv": suite_equiv,
    "continuity": suite_continuity,
    "table1": suite_table1,
    "fekete": suite_fekete,
    "brute-force": suite_brute_force,
    "estimate": suite_estimate,
    "ledger": suite_ledger,
    "reflection": suite_reflection,
    "orthant-2d": suite_orthant_2d,
}


def run_suites(names: list[str] | None = None) -> list[SuiteResult]:
    names = list(SUITES) if not names else names
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    out = []
    for name in names:
        t0 = time.perf_counter()
        res = SUITES[name]()
        out.append(SuiteResult(res.name, res.passed, res.detail, time.perf_counter() - t0))
    return out
