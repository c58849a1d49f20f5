import math
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from warpedhardy.core import (
    DomainError,
    ExtendedValue,
    Interval,
    Orientation,
    OutOfScope,
    Tag,
    Tolerances,
    make_exponents,
    sphere_volume,
)

exponent = st.fractions(min_value=F(51, 50), max_value=F(20), max_denominator=50)


@given(exponent, exponent)
def test_conjugate_round_trip(p, q):
    e = make_exponents(p, q)
    assert make_exponents(e.p_conj, q).p_conj == e.p
    assert 1 / e.p + 1 / e.p_conj == 1


@given(exponent, exponent)
def test_regime_split(p, q):
    assert make_exponents(p, q).sup_form == (p >= q)


def test_float_exponents_snap_to_fractions():
    assert make_exponents(4 / 3, 2.5).p == F(4, 3)
    assert make_exponents("3/2", 2).q_conj == 2


@pytest.mark.parametrize("p,q", [(1, 2), (2, 1), (0.5, 3), (math.inf, 2), (2, math.inf)])
def test_out_of_scope_exponents(p, q):
    with pytest.raises(OutOfScope):
        make_exponents(p, q)


@given(st.integers(3, 30))
def test_sphere_volume_recurrence(n):
    assert sphere_volume(n) == pytest.approx(2 * math.pi * sphere_volume(n - 2) / (n - 1), rel=1e-12)


def test_sphere_volume_small():
    assert sphere_volume(1) == pytest.approx(2 * math.pi)
    assert sphere_volume(2) == pytest.approx(4 * math.pi)
    with pytest.raises(DomainError):
        sphere_volume(0)


def test_interval_orientation():
    iv = Interval(0.0, 1.0)
    assert iv.reversed().orientation is Orientation.REVERSED
    assert iv.reversed().reversed() == iv
    assert iv.reversed().forward() == iv
    assert Interval(2.0).infinite and Interval(2.0).length == math.inf


@pytest.mark.parametrize("lo,hi", [(1.0, 1.0), (2.0, 1.0), (-math.inf, 0.0), (0.0, math.nan)])
def test_bad_intervals(lo, hi):
    with pytest.raises(DomainError):
        Interval(lo, hi)


def test_extended_values():
    assert ExtendedValue.finite(2.0, 1e-9).as_float() == 2.0
    assert ExtendedValue.divergent().as_float() == math.inf
    assert math.isnan(ExtendedValue.unknown("no data").as_float())
    assert ExtendedValue.divergent("grows").as_dict() == {"tag": "Divergent", "note": "grows"}
    assert ExtendedValue.finite(1.0).tag is Tag.FINITE


@pytest.mark.parametrize("field", ["rel_tol", "abs_tol", "divergence_growth", "sup_grid_points"])
def test_tolerances_positive(field):
    with pytest.raises(ValueError):
        Tolerances(**{field: 0})


def test_tolerances_doubling_floor():
    with pytest.raises(ValueError):
        Tolerances(max_doublings=7)
    t = Tolerances(rel_tol=1e-6)
    assert t.accepts(1.0, 1e-7) and not t.accepts(1.0, 1e-5)
