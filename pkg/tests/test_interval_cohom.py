from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from oracles import INF, monomial_text
from warpedhardy.core import ExtendedValue, Interval, Orientation, Status, Verdict, make_exponents
from warpedhardy.hardy import HardyProblem
from warpedhardy.interval_cohom import (
    _reduced,
    _torsion,
    classify_h1,
    classify_interval,
    classify_reduced,
    classify_torsion,
)
from warpedhardy.symfun import parse_symfun

T, N, U = Status.TRIVIAL, Status.NONTRIVIAL, Status.UNKNOWN


def problem(p, q, v0, v1, lo=0.0, hi=INF) -> HardyProblem:
    dom = Interval(lo, hi)
    return HardyProblem(make_exponents(p, q), dom, parse_symfun(v0, dom), parse_symfun(v1, dom))


@pytest.mark.parametrize("v,hi,rel,ab", [
    ("1", 1.0, T, T),
    ("1", INF, N, N),
    ("exp(1/2*t)", INF, N, T),
])
def test_h1_examples(v, hi, rel, ab):
    r, a = classify_h1(problem(2, 2, v, v, 0.0, hi))
    assert (r.status, a.status) == (rel, ab)


def test_reduced_examples():
    assert [v.status for v in classify_reduced(problem(2, 2, "1", "1", 0.0, 1.0))[:2]] == [T, T]
    assert [v.status for v in classify_reduced(problem(2, 2, "1", "1"))[:2]] == [T, T]
    ab, rel, dim_one = classify_reduced(problem(2, 2, "exp(1*t)", "exp(1*t)"))
    assert (ab.status, rel.status, dim_one) == (T, N, True)
    assert rel.evidence["v1_conj_integral"]["value"] == pytest.approx(0.5)


def test_torsion_examples():
    assert classify_torsion(problem(2, 2, "1", "1"))[0].status is N
    assert classify_torsion(problem(2, 2, "1", "1", 0.0, 1.0))[0].status is T
    ab, rel = classify_torsion(problem(2, 2, "exp(1*t)", "exp(1*t)"))
    assert rel.status is T and rel.evidence["reduced_dimension"] == 1
    assert ab.status is T  # the backward constant is finite


def test_unknown_quadrature_downgrades_verdicts():
    unknown = ExtendedValue.unknown("quadrature failed: test")
    _, rel, dim_one = _reduced(unknown, ExtendedValue.divergent())
    assert rel.status is U and not dim_one
    _, tor = _torsion(Verdict(N, "x"), Verdict(N, "x"), rel)
    assert tor.status is U


def regular_problems():
    """Weights positive and continuous at the closed end a, as the classification assumes."""
    halves = st.integers(-4, 4).map(lambda k: F(k, 2))
    pq = st.sampled_from([(F(2), F(2)), (F(3), F(2)), (F(2), F(3))])
    rate = st.sampled_from([F(-1), F(0), F(1)])

    def build(args):
        (p, q), a, b, d0, d1, shifted = args
        if shifted:
            w0 = f"(t+1)^({a}) * exp({d0}*t)"
            w1 = f"(t+1)^({b}) * exp({d1}*t)"
            return problem(p, q, w0, w1, 0.0, INF)
        return problem(p, q, monomial_text(a, d0), monomial_text(b, d1), 1.0, INF)

    return st.tuples(pq, halves, halves, rate, rate, st.booleans()).map(build)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(regular_problems())
def test_report_is_logically_closed(pr):
    rep = classify_interval(pr)
    # absolute reduced cohomology never survives
    assert rep.h1bar_absolute.status is T
    # relative H1 vanishes exactly when the forward constant is finite
    assert (rep.h1_relative.status is T) == rep.chi_forward.chi.is_finite
    # relative vanishing implies absolute vanishing
    if rep.h1_relative.status is T:
        assert rep.h1_absolute.status is T
    # absolute torsion mirrors absolute H1
    assert rep.torsion_absolute.status is rep.h1_absolute.status
    # torsion cannot appear where H1 vanishes
    if rep.h1_relative.status is T:
        assert rep.torsion_relative.status is T
    if rep.relative_dim_one:
        assert rep.h1bar_relative.status is N
    # a nontrivial reduced group is a quotient of H1
    if rep.h1bar_relative.status is N:
        assert rep.h1_relative.status is not T


def test_report_matches_individual_classifiers():
    pr = problem(2, 2, "exp(1*t)", "exp(1*t)")
    rep = classify_interval(pr)
    assert (rep.h1_relative, rep.h1_absolute) == classify_h1(pr)
    assert (rep.h1bar_absolute, rep.h1bar_relative, rep.relative_dim_one) == classify_reduced(pr)
    assert (rep.torsion_absolute, rep.torsion_relative) == classify_torsion(pr)
    d = rep.as_dict()
    assert d["h1bar_relative_dim_one"] is True and d["torsion_relative"]["status"] == "Trivial"


def test_orientation_of_input_is_irrelevant():
    fwd = problem(2, 2, "exp(1/2*t)", "exp(1/2*t)")
    rev = fwd.with_interval(Interval(0.0, INF, Orientation.REVERSED))
    assert classify_interval(fwd).as_dict() == classify_interval(rev).as_dict()
