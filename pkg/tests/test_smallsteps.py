import math

import pytest
from hypothesis import assume, given

from latticegrowth.errors import InessentialModelError, UnsupportedError
from latticegrowth.smallsteps import (
    critpoint_identity_gap,
    fr_classify,
    fr_values,
    small_step_representatives,
    survey_entry,
)
from latticegrowth.stepset import StepSet, is_quarterplane_essential, reflect_xy

from strategies import SQRT3, small_stepsets

EXAMPLE1 = StepSet.compass("N", "SW", "S", "SE")
SRW = StepSet.compass("N", "E", "S", "W")


def test_fr_values_examples():
    v = fr_values(EXAMPLE1)
    assert v.cardinality == 4
    assert v.rho0_inv == pytest.approx(2 * SQRT3, abs=1e-12)
    assert v.rhoY_inv == pytest.approx(2 * SQRT3, abs=1e-15)
    # b(1) counts E and W, so rhoY = 2 + 2 sqrt(1 * 1)
    v = fr_values(SRW)
    assert v.rhoX_inv == 4 and v.rhoY_inv == 4
    assert v.rho0_inv == pytest.approx(4.0)


def test_fr_values_rejects():
    with pytest.raises(UnsupportedError):
        fr_values(StepSet.from_vectors([(2, 0), (-1, 0), (0, 1), (0, -1)]))
    with pytest.raises(InessentialModelError):
        fr_values(StepSet.compass("N", "E"), check_essential=True)


def test_fr_classify_examples():
    p = fr_classify(EXAMPLE1)
    assert p.drift_signs == ("0", "-") and p.covariance_sign == "0"
    assert p.chosen == "ambiguous-equal" and set(p.candidates) == {"rho0", "rhoY"}
    assert p.predicted_growth == pytest.approx(2 * SQRT3, abs=1e-12)
    p = fr_classify(SRW)
    assert p.chosen == "S" and p.predicted_growth == 4
    p = fr_classify(StepSet.compass("N", "NE", "E"))
    assert p.chosen == "S" and p.predicted_growth == 3


def test_singular_models_not_applicable():
    # {NW, SE} plus arrows from {N, NE, E}: no interior critical point
    for extra in (["N"], ["NE"], ["E"], ["N", "NE"], ["N", "E"], ["NE", "E"], ["N", "NE", "E"]):
        S = StepSet.compass("NW", "SE", *extra)
        if is_quarterplane_essential(S):
            assert not fr_classify(S).applicable


def test_representatives_are_least_under_reflection():
    reps = small_step_representatives()
    assert len(reps) == 79
    assert reps == sorted(reps, key=lambda S: S.steps)
    for S in reps:
        assert S.steps <= reflect_xy(S).steps
    assert SRW in reps


def test_census_counts(census):
    assert len(census) == 79
    assert sum(e.fr_applicable for e in census) == 74
    assert sum(e.self_symmetric for e in census) > 0


def test_census_rows(census):
    row = census[0].row()
    assert list(row) == [
        "stepset", "size", "drift_x", "drift_y", "covariance",
        "chosen", "predicted", "theta_star", "min_bound", "fr_applicable",
    ]


@given(small_stepsets(min_size=2))
def test_reflection_coherence(S):
    assume(is_quarterplane_essential(S))
    a = fr_classify(S).predicted_growth
    b = fr_classify(reflect_xy(S)).predicted_growth
    assert (a is None) == (b is None)
    if a is not None:
        assert a == pytest.approx(b, abs=1e-9)


@given(small_stepsets(min_size=2))
def test_prediction_bounded_by_size(S):
    assume(is_quarterplane_essential(S))
    v = fr_values(S)
    for val in (v.rho0_inv, v.rhoX_inv, v.rhoY_inv):
        assert val is None or val <= S.size + 1e-12


def test_critpoint_identity_example():
    assert critpoint_identity_gap(StepSet.compass("N", "W", "SE", "S", "SW")) <= 1e-12


def test_survey_entry_prediction_matches_angle_minimum():
    e = survey_entry(StepSet.compass("N", "W", "SE", "S", "SW"))
    assert e.prediction.chosen == "rho0"
    assert abs(e.prediction.predicted_growth - e.min_theta_bound) <= 1e-12
    assert e.theta_star == pytest.approx(0.2281162 * math.pi, abs=1e-6)
