"""Triviality of weighted first cohomology of a half-open interval [a, b).

Three decision rules, all in terms of Hardy constants and two integrals:

* relative H^1 (relative to {a}) vanishes iff chi(a, b) is finite; absolute
  H^1 vanishes iff chi(a, b) or chi(b, a) is finite;
* absolute reduced H^1 always vanishes; relative reduced H^1 vanishes iff
  int v1^(-q') is infinite or int v0^p is finite, and is one-dimensional
  otherwise;
* torsion is nonzero wherever H^1 is nonzero but reduced H^1 vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import DEFAULT_TOL, ExtendedValue, Orientation, Status, Tag, Tolerances, TolFailure, Verdict
from .hardy import HardyProblem, HardyResult, hardy_constant
from .quad import improper_integral

RULE_H1_REL = "H1 relative: trivial iff chi(a,b) finite"
RULE_H1_ABS = "H1 absolute: trivial iff chi(a,b) or chi(b,a) finite"
RULE_RED_ABS = "reduced H1 absolute: always trivial"
RULE_RED_REL = "reduced H1 relative: trivial iff int v1^(-q') = inf or int v0^p < inf"
RULE_TOR_ABS = "torsion absolute: equals H1 absolute since reduced absolute is trivial"
RULE_TOR_REL_FORCED = "torsion relative: H1 nontrivial with trivial reduced forces torsion"
RULE_TOR_REL_ZERO = "torsion relative: H1 trivial"
RULE_TOR_REL_REDUCED = "torsion relative: H1 nontrivial and reduced nontrivial (one-dimensional); read as no torsion"


@dataclass(frozen=True)
class IntervalReport:
    h1_relative: Verdict
    h1_absolute: Verdict
    h1bar_absolute: Verdict
    h1bar_relative: Verdict
    torsion_absolute: Verdict
    torsion_relative: Verdict
    chi_forward: HardyResult
    chi_backward: HardyResult
    v1_conj_integral: ExtendedValue
    v0_p_integral: ExtendedValue
    relative_dim_one: bool = False

    def as_dict(self) -> dict:
        return {
            "h1_relative": self.h1_relative.as_dict(),
            "h1_absolute": self.h1_absolute.as_dict(),
            "h1bar_absolute": self.h1bar_absolute.as_dict(),
            "h1bar_relative": self.h1bar_relative.as_dict(),
            "h1bar_relative_dim_one": self.relative_dim_one,
            "torsion_absolute": self.torsion_absolute.as_dict(),
            "torsion_relative": self.torsion_relative.as_dict(),
            "chi_forward": self.chi_forward.as_dict(),
            "chi_backward": self.chi_backward.as_dict(),
            "v1_conj_integral": self.v1_conj_integral.as_dict(),
            "v0_p_integral": self.v0_p_integral.as_dict(),
        }


def _oriented(problem: HardyProblem, orientation: Orientation) -> HardyProblem:
    iv = problem.interval
    if iv.orientation is orientation:
        return problem
    return problem.with_interval(iv.reversed())


def safe_chi(problem: HardyProblem, tol: Tolerances) -> HardyResult:
    """hardy_constant with numeric failures turned into an Unknown value."""
    try:
        return hardy_constant(problem, tol)
    except TolFailure as exc:
        return HardyResult(ExtendedValue.unknown(f"quadrature failed: {exc}"), problem.regime,
                           evidence=dict(exc.evidence))


def _safe_integral(f, interval, tol) -> ExtendedValue:
    try:
        return improper_integral(f, interval, tol).outcome
    except TolFailure as exc:
        return ExtendedValue.unknown(f"quadrature failed: {exc}")


def _chi_evidence(**chis: HardyResult) -> dict:
    return {name: r.chi.as_dict() for name, r in chis.items()}


def _h1(fwd: HardyResult, bwd: HardyResult) -> tuple[Verdict, Verdict]:
    ev = _chi_evidence(chi_forward=fwd, chi_backward=bwd)
    rel_status = {Tag.FINITE: Status.TRIVIAL, Tag.DIVERGENT: Status.NONTRIVIAL}.get(fwd.chi.tag, Status.UNKNOWN)
    if fwd.chi.is_finite or bwd.chi.is_finite:
        abs_status = Status.TRIVIAL
    elif fwd.chi.is_divergent and bwd.chi.is_divergent:
        abs_status = Status.NONTRIVIAL
    else:
        abs_status = Status.UNKNOWN
    return Verdict(rel_status, RULE_H1_REL, {"chi_forward": ev["chi_forward"]}), Verdict(abs_status, RULE_H1_ABS, ev)


def classify_h1(problem: HardyProblem, tol: Tolerances = DEFAULT_TOL) -> tuple[Verdict, Verdict]:
    """(relative, absolute) verdicts for H^1 of [a, b)."""
    fwd = safe_chi(_oriented(problem, Orientation.FORWARD), tol)
    bwd = safe_chi(_oriented(problem, Orientation.REVERSED), tol)
    return _h1(fwd, bwd)


def _reduced(i1: ExtendedValue, i0: ExtendedValue) -> tuple[Verdict, Verdict, bool]:
    ev = {"v1_conj_integral": i1.as_dict(), "v0_p_integral": i0.as_dict()}
    absolute = Verdict(Status.TRIVIAL, RULE_RED_ABS)
    if i1.is_divergent or i0.is_finite:
        return absolute, Verdict(Status.TRIVIAL, RULE_RED_REL, ev), False
    if i1.is_finite and i0.is_divergent:
        return absolute, Verdict(Status.NONTRIVIAL, RULE_RED_REL, {**ev, "dimension": 1}), True
    return absolute, Verdict(Status.UNKNOWN, RULE_RED_REL, ev), False


def classify_reduced(problem: HardyProblem, tol: Tolerances = DEFAULT_TOL) -> tuple[Verdict, Verdict, bool]:
    """(absolute, relative, relative_dim_one) for reduced H^1 of [a, b)."""
    iv = problem.interval.forward()
    return _reduced(_safe_integral(problem.g1, iv, tol), _safe_integral(problem.g0, iv, tol))


def _torsion(h1_rel: Verdict, h1_abs: Verdict, red_rel: Verdict) -> tuple[Verdict, Verdict]:
    absolute = Verdict(h1_abs.status, RULE_TOR_ABS, dict(h1_abs.evidence))
    if h1_rel.status is Status.TRIVIAL:
        rel = Verdict(Status.TRIVIAL, RULE_TOR_REL_ZERO)
    elif h1_rel.status is Status.NONTRIVIAL and red_rel.status is Status.TRIVIAL:
        rel = Verdict(Status.NONTRIVIAL, RULE_TOR_REL_FORCED)
    elif h1_rel.status is Status.NONTRIVIAL and red_rel.status is Status.NONTRIVIAL:
        rel = Verdict(Status.TRIVIAL, RULE_TOR_REL_REDUCED, {"reduced_dimension": 1})
    else:
        rel = Verdict(Status.UNKNOWN, "torsion relative: an input verdict is unknown")
    return absolute, rel


def classify_torsion(problem: HardyProblem, tol: Tolerances = DEFAULT_TOL) -> tuple[Verdict, Verdict]:
    """(absolute, relative) torsion verdicts."""
    rel, ab = classify_h1(problem, tol)
    _, red_rel, _ = classify_reduced(problem, tol)
    return _torsion(rel, ab, red_rel)


def classify_interval(problem: HardyProblem, tol: Tolerances = DEFAULT_TOL) -> IntervalReport:
    """Full report; each Hardy constant and integral is computed once."""
    fwd = safe_chi(_oriented(problem, Orientation.FORWARD), tol)
    bwd = safe_chi(_oriented(problem, Orientation.REVERSED), tol)
    h1_rel, h1_abs = _h1(fwd, bwd)
    iv = problem.interval.forward()
    i1 = _safe_integral(problem.g1, iv, tol)
    i0 = _safe_integral(problem.g0, iv, tol)
    red_abs, red_rel, dim_one = _reduced(i1, i0)
    tor_abs, tor_rel = _torsion(h1_rel, h1_abs, red_rel)
    return IntervalReport(h1_rel, h1_abs, red_abs, red_rel, tor_abs, tor_rel, fwd, bwd, i1, i0, dim_one)


__all__ = [
    "IntervalReport",
    "classify_h1",
    "classify_interval",
    "classify_reduced",
    "classify_torsion",
    "safe_chi",
]
