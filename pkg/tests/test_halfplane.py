import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from latticegrowth.errors import (
    DomainError,
    InessentialModelError,
    InvalidNormalError,
    NoCriticalPointError,
    UnsupportedError,
)
from latticegrowth.halfplane import (
    Exponent1D,
    angle_normal,
    best_upper_bound,
    chi_minimum,
    critical_angle,
    critical_point,
    growth_at_angle,
    half_plane_growth,
    interior_minimum_exists,
    log_tau,
    project,
    tau_of,
    theta_sweep,
)
from latticegrowth.stepset import StepSet, is_quarterplane_essential

from strategies import SQRT2, SQRT3, small_stepsets

EXAMPLE1 = StepSet.compass("N", "SW", "S", "SE")
EXAMPLE2 = StepSet.compass("N", "W", "SE", "S", "SW")
SRW = StepSet.compass("N", "E", "S", "W")

nontrivial_exponents = st.tuples(
    st.lists(st.floats(0.01, 5), min_size=1, max_size=5),
    st.lists(st.floats(-5, -0.01), min_size=1, max_size=5),
    st.lists(st.floats(-5, 5), max_size=3),
).map(lambda t: Exponent1D.from_values(t[0] + t[1] + t[2]))


def values(A):
    return sorted(A.values)


def test_project_examples():
    S = StepSet.compass("N", "E", "SW")
    assert values(project(S, angle_normal(0.0))) == [-1, 0, 1]
    assert values(project(S, angle_normal(math.pi / 2))) == [-1, 0, 1]
    assert values(project(EXAMPLE1, angle_normal(0.0))) == [-1, -1, -1, 1]


@pytest.mark.parametrize("normal", [(0.0, 0.0), (-0.6, 0.8), (1.0, 1.0), (1.0,)])
def test_project_invalid_normal(normal):
    with pytest.raises(InvalidNormalError):
        project(EXAMPLE1, normal)


@pytest.mark.parametrize(
    "exps, tau", [([1, -1], 1.0), ([1, -1, -1, -1], SQRT3), ([1, -1, -1], SQRT2)]
)
def test_tau_examples(exps, tau):
    assert tau_of(Exponent1D.from_values(exps)) == pytest.approx(tau, abs=1e-12)


@pytest.mark.parametrize("exps", [[1, 2], [-1, -3], [0, 0]])
def test_tau_trivial(exps):
    with pytest.raises(NoCriticalPointError):
        tau_of(Exponent1D.from_values(exps))


@pytest.mark.parametrize(
    "exps, growth", [([1, -1, -1, -1], 2 * SQRT3), ([1, 1, -1], 3.0), ([1, -1, -1], 2 * SQRT2)]
)
def test_half_plane_growth_examples(exps, growth):
    assert half_plane_growth(Exponent1D.from_values(exps)) == pytest.approx(growth, abs=1e-12)


def test_half_plane_growth_only_negative_steps():
    assert half_plane_growth(Exponent1D.from_values([0, 0, -1])) == 2.0
    with pytest.raises(ValueError):
        half_plane_growth(Exponent1D(()))


def test_growth_at_angle_examples():
    assert growth_at_angle(EXAMPLE1, 0.0).growth == pytest.approx(2 * SQRT3, abs=1e-12)
    for th in np.linspace(0, math.pi / 2, 7):
        assert growth_at_angle(SRW, float(th)).growth == pytest.approx(4.0)
    assert growth_at_angle(EXAMPLE2, 0.2281162 * math.pi).growth == pytest.approx(4.2148, abs=5e-4)
    with pytest.raises(DomainError):
        growth_at_angle(EXAMPLE1, 2.0)
    with pytest.raises(UnsupportedError):
        growth_at_angle(StepSet.from_vectors([(1, 0, 0), (-1, 0, 0)]), 0.0)


def test_critical_point_examples():
    cp = critical_point(EXAMPLE1)
    assert cp.converged
    assert cp.coordinates == pytest.approx((1.0, SQRT3), abs=1e-10)
    assert cp.inventory_value == pytest.approx(2 * SQRT3, abs=1e-12)
    cp = critical_point(SRW)
    assert cp.coordinates == pytest.approx((1.0, 1.0), abs=1e-12) and cp.inventory_value == pytest.approx(4)
    cp = critical_point(EXAMPLE2)
    assert cp.coordinates == pytest.approx((1.6760230, 1.8090532), abs=1e-6)
    assert cp.inventory_value == pytest.approx(4.214756946985, abs=1e-11)


def test_critical_point_absent():
    # the origin lies on the boundary of the hull: the infimum escapes to infinity
    S = StepSet.compass("NW", "N", "NE", "E", "SE")
    assert not interior_minimum_exists(S)
    assert not critical_point(S).converged


def test_critical_angle_conventions():
    assert critical_angle(critical_point(EXAMPLE1)) == 0.0
    assert critical_angle(critical_point(SRW)) == 0.0
    assert critical_angle(critical_point(EXAMPLE2)) == pytest.approx(0.2281162 * math.pi, abs=1e-6)
    # beta = 1 by symmetry: theta* = pi/2
    assert critical_angle(critical_point(StepSet.compass("E", "NW", "W", "SW"))) == math.pi / 2


def test_best_upper_bound_examples():
    b = best_upper_bound(EXAMPLE1)
    assert b.value == pytest.approx(2 * SQRT3, abs=1e-12) and b.data["theta"] == 0.0 and b.kind == "upper"
    b = best_upper_bound(EXAMPLE2)
    assert b.value == pytest.approx(4.2148, abs=5e-4)
    assert b.data["theta"] == pytest.approx(0.2281 * math.pi, abs=5e-4 * math.pi)
    b = best_upper_bound(SRW)
    assert b.value == 4 and "every candidate" in b.detail
    with pytest.raises(InessentialModelError, match="not quarter-plane essential"):
        best_upper_bound(StepSet.compass("N", "E"))


def test_best_upper_bound_positive_drift_is_size():
    # drift (+,+): the critical point sits at alpha, beta < 1 but K_S = |S|
    S = StepSet.compass("NW", "N", "NE", "E", "SE", "SW")
    assert best_upper_bound(S, check_essential=False).value == pytest.approx(6.0)


def test_theta_sweep_examples():
    sweep = theta_sweep(SRW, 5)
    assert [b.growth for b in sweep] == pytest.approx([4.0] * 5)
    sweep = theta_sweep(EXAMPLE1, 3)
    assert [b.theta for b in sweep] == pytest.approx([0, math.pi / 4, math.pi / 2])
    assert sweep[0].growth == pytest.approx(2 * SQRT3) and sweep[2].growth == pytest.approx(4.0)
    assert min(b.growth for b in sweep) == sweep[0].growth
    sweep = theta_sweep(EXAMPLE2, 101)
    assert min(b.growth for b in sweep) == pytest.approx(4.2148, abs=1e-3)
    with pytest.raises(ValueError):
        theta_sweep(EXAMPLE1, 1)


@given(nontrivial_exponents, st.fractions(min_value=0, max_value=10).filter(lambda r: r > 0))
def test_scaling_invariance(A, r):
    assert half_plane_growth(A.scaled(float(r))) == pytest.approx(half_plane_growth(A), abs=1e-10)


integer_exponents = st.tuples(
    st.lists(st.integers(1, 4), min_size=1, max_size=4),
    st.lists(st.integers(-4, -1), min_size=1, max_size=4),
).map(lambda t: Exponent1D.from_values(t[0] + t[1]))


@given(integer_exponents, st.floats(0.05, 20), st.floats(0.05, 20))
def test_chi_midpoint_convex_in_u(A, u1, u2):
    # holds term by term once every |a| >= 1
    mid = A.chi((u1 + u2) / 2)
    assert mid <= (A.chi(u1) + A.chi(u2)) / 2 * (1 + 1e-12)


@given(nontrivial_exponents, st.floats(-3, 3), st.floats(-3, 3))
def test_chi_midpoint_convex_in_log_u(A, t1, t2):
    f = lambda t: A.chi(math.exp(t))  # noqa: E731
    assert f((t1 + t2) / 2) <= (f(t1) + f(t2)) / 2 * (1 + 1e-12)


def test_chi_not_convex_in_u_for_fractional_exponents():
    A = Exponent1D.from_values([-5.0, 0.5])
    assert A.chi(2.5) > (A.chi(2.0) + A.chi(3.0)) / 2
    # the minimiser is still unique and found
    assert A.dchi(tau_of(A)) == pytest.approx(0.0, abs=1e-12)


@given(nontrivial_exponents, st.floats(1e-9, 1e3))
def test_scaling_tau_relation(A, r):
    assert log_tau(A.scaled(r)) * r == pytest.approx(log_tau(A), rel=1e-9, abs=1e-12)


@given(nontrivial_exponents, st.lists(st.floats(0.05, 20), min_size=1, max_size=20))
def test_chi_tau_global_minimum(A, us):
    m = chi_minimum(A)
    assert all(m <= A.chi(u) * (1 + 1e-12) for u in us)


@given(small_stepsets(), st.floats(0, math.pi / 2))
def test_growth_at_most_size(S, theta):
    b = growth_at_angle(S, theta)
    assert b.growth <= S.size + 1e-12
    if b.regime == "nonneg-drift":
        assert b.growth == S.size


@given(small_stepsets(min_size=2))
def test_best_bound_is_sweep_minimum(S):
    assume(is_quarterplane_essential(S))
    sweep = min(b.growth for b in theta_sweep(S, 10001))
    assert best_upper_bound(S).value == pytest.approx(sweep, abs=1e-6)


def test_sweep_matches_pointwise():
    for b in theta_sweep(EXAMPLE2, 17):
        assert b.growth == pytest.approx(growth_at_angle(EXAMPLE2, b.theta).growth, abs=1e-12)
