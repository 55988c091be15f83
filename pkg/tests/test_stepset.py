import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from latticegrowth.errors import DomainError, StepSetParseError, UnsupportedError
from latticegrowth.stepset import (
    StepSet,
    compass_string,
    covariance,
    drift,
    eval_inventory,
    format_stepset,
    is_orthant_essential,
    is_quarterplane_essential,
    negate_axis,
    parse_stepset,
    reflect_xy,
)

from strategies import SQRT3, integer_stepsets, small_stepsets


def test_drift_examples():
    assert drift(StepSet.compass("N", "SW", "S", "SE")) == (0, -2)
    assert drift(StepSet.compass("N", "E", "S", "W")) == (0, 0)
    assert drift(StepSet.compass("N", "W", "SE", "S", "SW")) == (-1, -2)


def test_inventory_examples():
    S = StepSet.compass("N", "SW", "S", "SE")
    assert eval_inventory(S, (1.0, SQRT3)).value == pytest.approx(2 * SQRT3, abs=1e-12)
    v = eval_inventory(StepSet.compass("N", "S"), (1.0, 2.0), order=1)
    assert v.value == pytest.approx(2.5)
    assert v.gradient[1] == pytest.approx(0.75)


def test_inventory_rejects_nonpositive_point():
    with pytest.raises(DomainError):
        eval_inventory(StepSet.compass("N", "S"), (1.0, 0.0))


def test_covariance_examples():
    assert covariance(StepSet.compass("N", "SW", "S", "SE")) == 0
    assert covariance(StepSet.compass("N", "E", "S", "W")) == 0
    assert covariance(StepSet.compass("NE", "SW")) == 2
    with pytest.raises(UnsupportedError):
        covariance(StepSet.from_vectors([(1, 0, 0), (-1, 0, 0)]))


def test_essential_examples():
    assert is_quarterplane_essential(StepSet.compass("N", "E", "S", "W"))
    assert not is_quarterplane_essential(StepSet.compass("N", "E"))
    assert not is_quarterplane_essential(StepSet.compass("NE", "SW"))
    # confined to an axis: the x-wall never binds
    assert not is_quarterplane_essential(StepSet.compass("W", "S", "N"))


def test_essential_3d_symmetric():
    S = StepSet.from_vectors([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])
    assert is_orthant_essential(S, 6)


def test_multiplicities_merge():
    S = StepSet.from_vectors([(0, 1), (0, 1), (0, -1)])
    assert S.size == 3 and len(S.vectors) == 2 and S.multiplicity((0, 1)) == 2
    assert eval_inventory(S, (1.0, 1.0)).value == 3


def test_zero_step_allowed():
    S = StepSet.from_vectors([(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)])
    assert drift(S) == (0, 0) and eval_inventory(S, (2.0, 3.0)).value > 1


@pytest.mark.parametrize(
    "text, expected",
    [
        ("N,SW,S,SE", StepSet.compass("N", "SW", "S", "SE")),
        ("(0,1)x1;(1,-1)x2", StepSet(2, (((0, 1), 1), ((1, -1), 2)))),
        ("Nx2, s", StepSet(2, (((0, 1), 2), ((0, -1), 1)))),
        ("(1,1,1);(-1,0,0)", StepSet.from_vectors([(1, 1, 1), (-1, 0, 0)])),
    ],
)
def test_parse(text, expected):
    assert parse_stepset(text) == expected


@pytest.mark.parametrize("text", ["", "N,Q", "(1,a)", "(1,0);(1,0,0)", "N;;"])
def test_parse_errors(text):
    with pytest.raises(StepSetParseError):
        parse_stepset(text)


@given(integer_stepsets(max_mult=3))
def test_parse_roundtrip(S):
    assert parse_stepset(format_stepset(S)) == S


@given(small_stepsets())
def test_compass_roundtrip(S):
    assert parse_stepset(compass_string(S)) == S


@given(integer_stepsets(), integer_stepsets())
def test_drift_additive(S1, S2):
    assert drift(S1.union(S2)) == tuple(a + b for a, b in zip(drift(S1), drift(S2)))


@given(st.sampled_from([1, 2, 3]).flatmap(lambda d: integer_stepsets(dimension=d, max_mult=2)))
def test_inventory_at_ones(S):
    v = eval_inventory(S, (1.0,) * S.dimension, order=1)
    assert v.value == S.size
    assert tuple(v.gradient) == drift(S)


@given(small_stepsets())
def test_covariance_reflection_invariant(S):
    assert covariance(reflect_xy(S)) == covariance(S)


@given(small_stepsets())
def test_negating_x_flips_drift_and_covariance(S):
    T = negate_axis(S, 0)
    assert drift(T)[0] == -drift(S)[0]
    assert covariance(T) == -covariance(S)


@given(small_stepsets(), st.tuples(st.floats(0.2, 5), st.floats(0.2, 5)))
def test_gradient_matches_finite_difference(S, point):
    v = eval_inventory(S, point, order=1)
    h = 1e-6
    for k in range(2):
        up = list(point)
        dn = list(point)
        up[k] += h
        dn[k] -= h
        fd = (eval_inventory(S, up).value - eval_inventory(S, dn).value) / (2 * h)
        assert math.isclose(v.gradient[k], fd, rel_tol=1e-5, abs_tol=1e-6)
