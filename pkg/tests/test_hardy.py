import math
from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from oracles import INF, hardy_finite, monomial_text
from warpedhardy.asym import Asym
from warpedhardy.core import DomainError, Interval, Orientation, make_exponents
from warpedhardy.hardy import (
    DegenerateTestFunction,
    HardyProblem,
    Regime,
    RegimeError,
    WitnessNotFound,
    divergence_witness,
    extremal_ratio,
    hardy_constant,
    profile,
)
from warpedhardy.symfun import SymFun, parse_symfun

FWD, REV = Orientation.FORWARD, Orientation.REVERSED


def problem(p, q, v0, v1, lo=0.0, hi=INF, orientation=FWD) -> HardyProblem:
    iv = Interval(lo, hi, orientation)
    dom = iv.forward()
    return HardyProblem(make_exponents(p, q), iv, parse_symfun(v0, dom), parse_symfun(v1, dom))


def test_reversed_exponential_weights():
    # profile ((e^tau - 1) e^-tau)^(1/2) increases to 1
    res = hardy_constant(problem(2, 2, "exp(1/2*t)", "exp(1/2*t)", orientation=REV))
    assert res.chi.value == pytest.approx(1.0, rel=1e-8)
    assert hardy_constant(problem(2, 2, "exp(1*t)", "exp(1*t)", orientation=REV)).chi.value == pytest.approx(0.5)
    assert hardy_constant(problem(2, 2, "exp(1/2*t)", "exp(1/2*t)")).chi.is_divergent


def test_unit_weights_half_line_diverge():
    res = hardy_constant(problem(2, 2, "1", "1"))
    assert res.chi.is_divergent and res.regime is Regime.SUP_FORM


def test_integral_form_regime():
    res = hardy_constant(problem(2, 4, "exp(-1*t)", "1"))
    assert res.regime is Regime.INTEGRAL_FORM
    assert res.chi.value == pytest.approx(128 ** -0.25, rel=1e-8)


def test_profile_values():
    pr = problem(2, 2, "1", "1", 0.0, 1.0)
    assert profile(pr, 0.5).value == pytest.approx(0.5)
    assert profile(pr, 0.1).value == pytest.approx(math.sqrt(0.09))
    assert profile(problem(2, 2, "t^-1", "1"), 7.0).value == pytest.approx(1.0)
    assert profile(problem(2, 2, "1", "1"), 3.0).is_divergent
    with pytest.raises(RegimeError):
        profile(problem(2, 4, "exp(-1*t)", "1"), 1.0)
    with pytest.raises(DomainError):
        profile(pr, 1.5)


@pytest.mark.parametrize("p,q,v0,v1,lo,hi", [
    (2, 2, "1", "1", 0.0, 1.0),
    (3, 2, "exp(-1*t)", "exp(-1/2*t)", 0.0, INF),
    (2, 2, "t^(-3/2)", "t^(1/4)", 1.0, INF),
    (4, 3, "(t+1)^-2", "1", 0.0, INF),
])
def test_profile_bounded_by_chi(p, q, v0, v1, lo, hi):
    pr = problem(p, q, v0, v1, lo, hi)
    res = hardy_constant(pr)
    assert res.chi.is_finite and res.profile
    cap = res.chi.value + res.chi.error_bound
    assert max(v for _, v in res.profile) <= cap * (1 + 1e-12)
    for tau, _ in res.profile[:: max(1, len(res.profile) // 10)]:
        if pr.interval.lo < tau < pr.interval.hi:
            assert profile(pr, tau).value <= cap * (1 + 1e-12)


def test_extremal_ratio_reproduces_profile_bound():
    pr = problem(2, 2, "1", "1", 0.0, 1.0)
    assert extremal_ratio(pr, 0.5) >= profile(pr, 0.5).value - 1e-8
    assert extremal_ratio(problem(2, 2, "t^-1", "1"), 3.0) >= 1.0 - 1e-8
    with pytest.raises(DegenerateTestFunction):
        extremal_ratio(pr, 0.0)
    with pytest.raises(RegimeError):
        extremal_ratio(problem(2, 4, "exp(-1*t)", "1"), 1.0)


SUP_PAIRS = [(F(2), F(2)), (F(3), F(2)), (F(4), F(3, 2)), (F(5, 2), F(5, 2))]
INT_PAIRS = [(F(2), F(4)), (F(3, 2), F(2)), (F(2), F(3)), (F(3, 2), F(4))]
halves = st.integers(-6, 6).map(lambda k: F(k, 2))
intervals = st.sampled_from([(0.0, 1.0), (0.0, INF), (1.0, INF)])
rates = st.sampled_from([F(-1), F(0), F(1)])


def check_against_oracle(pq, a, b, d0, d1, iv, forward):
    (p, q), (lo, hi) = pq, iv
    if hi != INF:
        d0 = d1 = F(0)
    expected = hardy_finite(p, q, a, d0, b, d1, lo, hi, forward)
    res = hardy_constant(problem(p, q, monomial_text(a, d0), monomial_text(b, d1), lo, hi, FWD if forward else REV))
    assert res.chi.is_finite if expected else res.chi.is_divergent


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from(SUP_PAIRS), halves, halves, rates, rates, intervals, st.booleans())
def test_sup_form_finiteness_matches_exact_decision(pq, a, b, d0, d1, iv, forward):
    check_against_oracle(pq, a, b, d0, d1, iv, forward)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from(INT_PAIRS), halves, halves, rates, rates, intervals, st.booleans())
def test_integral_form_finiteness_matches_exact_decision(pq, a, b, d0, d1, iv, forward):
    check_against_oracle(pq, a, b, d0, d1, iv, forward)


HOMOGENEITY_BASES = [
    problem(2, 2, "1", "1", 0.0, 1.0),
    problem(3, 2, "exp(-1*t)", "exp(-1/2*t)"),
    problem(2, 4, "exp(-1*t)", "1"),
    problem(F(3, 2), 3, "(t+1)^-2", "t+1"),
]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(range(len(HOMOGENEITY_BASES))), st.floats(0.1, 10), st.floats(0.1, 10))
def test_homogeneity(k, c0, c1):
    base = HOMOGENEITY_BASES[k]
    chi = hardy_constant(base).chi.value
    assert hardy_constant(base.scaled(c0, c1)).chi.value == pytest.approx(c0 / c1 * chi, rel=1e-8)


def reflected(a: F, hi: float) -> SymFun:
    """(lo + hi - t + 1)^a on [0, hi) with lo = 0: the reflection of (t+1)^a."""
    top = hi + 1
    return SymFun.numeric(lambda t: (top - t) ** float(a), Interval(0.0, hi),
                          asym_lo=Asym.constant(top ** float(a)), asym_hi=Asym.constant(1.0))


@pytest.mark.parametrize("p,q,a,b", [(2, 2, F(1), F(-1)), (3, 2, F(-1, 2), F(1, 2)), (2, 3, F(2), F(1)),
                                     (F(3, 2), 4, F(-1), F(0))])
def test_reflection(p, q, a, b):
    hi = 2.0
    rev = problem(p, q, f"(t+1)^({a})", f"(t+1)^({b})", 0.0, hi, REV)
    fwd = HardyProblem(make_exponents(p, q), Interval(0.0, hi), reflected(a, hi), reflected(b, hi))
    assert hardy_constant(rev).chi.value == pytest.approx(hardy_constant(fwd).chi.value, rel=1e-8)


def test_witness_for_unit_weights():
    w = divergence_witness(problem(2, 2, "1", "1", 1.0, INF))
    assert (w.exponent, w.log_power) == (-1, 0)
    assert w.rhs_integral == pytest.approx(1.0)
    values = [v for _, v in w.lhs_divergence_evidence]
    assert values == sorted(values) and values[-1] > 100 * values[0]


def test_witness_for_growing_v1():
    w = divergence_witness(problem(2, 2, "1", "t", 1.0, INF))
    assert w.exponent < -1
    assert math.isfinite(w.rhs_integral)


def test_witness_refused_when_finite():
    with pytest.raises(WitnessNotFound):
        divergence_witness(problem(2, 2, "1", "1", 0.0, 1.0))


def test_weights_must_cover_interval():
    with pytest.raises(DomainError):
        HardyProblem(make_exponents(2, 2), Interval(0.0), parse_symfun("1", Interval(0.0, 1.0)),
                     parse_symfun("1", Interval(0.0)))


# mpmath, 25-30 digits, from the closed-form inner integrals
@pytest.mark.parametrize("p,q,v0,v1,lo,hi,expected", [
    # steep polynomial weights at a finite end
    (3, 4, "t^2", "t^3", 0.0, 1.0, 0.234458451442180618),
    # exponential factors cancel and leave a t^(-5/3) outer tail
    (F(5, 2), 4, "t^-2 * exp(1/2*t)", "t^(-7/4) * exp(1/2*t)", 1.0, INF, 5.036665428873855),
])
def test_reversed_integral_form_values(p, q, v0, v1, lo, hi, expected):
    res = hardy_constant(problem(p, q, v0, v1, lo, hi, REV))
    assert res.chi.value == pytest.approx(expected, rel=1e-8)
    assert res.chi.error_bound < 1e-6 * expected
