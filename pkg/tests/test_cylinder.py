import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpedhardy.core import DomainError, Interval, Orientation, Status, make_exponents
from warpedhardy.cylinder import CylinderSpec, classify_cylinder, cylinder_weights
from warpedhardy.hardy import HardyProblem, hardy_constant
from warpedhardy.symfun import MultiTermPower, parse_symfun

HALF_LINE = Interval(0.0)
T, N, U = Status.TRIVIAL, Status.NONTRIVIAL, Status.UNKNOWN


def spec(f, n=1, j=1, p=2, q=2, iv=HALF_LINE, paired=True) -> CylinderSpec:
    return CylinderSpec(parse_symfun(f, iv), iv, n, j, make_exponents(p, q), paired)


def test_weight_examples():
    w0, w1 = cylinder_weights(spec("exp(1*t)"))
    assert w0(2.0) == pytest.approx(math.e) and w1(2.0) == pytest.approx(math.e)
    w0, w1 = cylinder_weights(spec("t", n=2, iv=Interval(1.0)))
    assert w0(3.0) == pytest.approx(3.0) and w1(3.0) == pytest.approx(3.0)
    for n, j in [(1, 1), (3, 2), (4, 5)]:
        w0, w1 = cylinder_weights(spec("1", n=n, j=j, p=3, q=F(3, 2)))
        assert w0(5.0) == pytest.approx(1.0) and w1(5.0) == pytest.approx(1.0)


def test_multi_term_warp_with_fractional_exponent():
    with pytest.raises(MultiTermPower):
        cylinder_weights(spec("t + 1", n=1, j=1, p=3, q=3))


exps = st.fractions(min_value=F(11, 10), max_value=F(8), max_denominator=10)


@given(exps, exps, st.integers(1, 6), st.data())
def test_weight_exponent_identity(p, q, n, data):
    j = data.draw(st.integers(1, n + 1))
    e0, e1 = spec("exp(1*t)", n=n, j=j, p=p, q=q).weight_exponents
    assert isinstance(e0, F) and e0 - e1 == n * (1 / p - 1 / q)


def test_constant_warp_on_half_line():
    rep = classify_cylinder(spec("1"))
    assert rep.chi_forward.chi.is_divergent and rep.chi_backward.chi.is_divergent
    assert (rep.hj_relative.status, rep.torsion.status, rep.hj_dim_infinite) == (N, N, True)


def test_exponential_warp_only_one_constant_diverges():
    rep = classify_cylinder(spec("exp(1*t)"))
    assert rep.chi_forward.chi.is_divergent
    assert rep.chi_backward.chi.value == pytest.approx(1.0, rel=1e-8)
    assert (rep.hj_relative.status, rep.torsion.status, rep.hj_dim_infinite) == (N, U, False)


def test_finite_constant_gives_unknown_not_trivial():
    rep = classify_cylinder(spec("1", iv=Interval(0.0, 1.0)))
    assert rep.chi_forward.chi.is_finite
    assert rep.hj_relative.status is U and rep.torsion.status is U


def test_gate_off_gives_unknown_without_quadrature():
    rep = classify_cylinder(spec("1", paired=False))
    assert rep.chi_forward is None and rep.chi_backward is None
    assert rep.hj_relative.status is U and rep.torsion.status is U
    assert "hypothesis not asserted" in rep.hj_relative.rule


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sphere_fiber_degrees(n):
    # the sphere has nonzero de Rham cohomology in degrees 0 and n, so j = 1 and j = n + 1 qualify
    for j in (1, n + 1):
        rep = classify_cylinder(spec("1", n=n, j=j))
        assert rep.hj_relative.status is N


WARPS = ["1", "exp(1*t)", "exp(-1*t)", "t^2", "t^-1"]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(WARPS), st.integers(1, 3), st.data(),
       st.sampled_from([(2, 2), (3, 2), (2, 3), (F(3, 2), 4)]))
def test_reduction_and_monotonicity(f, n, data, pq):
    j = data.draw(st.integers(1, n + 1))
    iv = Interval(1.0)
    s = spec(f, n=n, j=j, p=pq[0], q=pq[1], iv=iv)
    rep = classify_cylinder(s)
    # torsion needs everything relative cohomology needs
    if rep.torsion.status is N:
        assert rep.hj_relative.status is N and rep.hj_dim_infinite
    # the verdicts come from the plain Hardy constants of the reduced weights
    w0, w1 = cylinder_weights(s)
    fwd = hardy_constant(HardyProblem(s.exps, iv, w0, w1)).chi
    bwd = hardy_constant(HardyProblem(s.exps, Interval(1.0, math.inf, Orientation.REVERSED), w0, w1)).chi
    assert rep.chi_forward.chi == fwd and rep.chi_backward.chi == bwd
    assert rep.hj_relative.status is (N if fwd.is_divergent else U)


def test_degree_range_checked():
    with pytest.raises(DomainError):
        spec("1", n=2, j=4)
    with pytest.raises(DomainError):
        spec("1", n=0, j=1)
