"""Warped cylinders [a, b) x_f Y: degree-j cohomology via the interval Hardy constants.

The degree-j problem reduces to the interval with weights f^(n/p - j + 1) and
f^(n/q - j + 1).  The criterion is sufficient only: an infinite chi(a, b)
gives nonzero relative cohomology, and infinite constants in both directions
give nonzero (indeed infinite-dimensional) torsion.  A finite constant proves
nothing, so those verdicts are Unknown.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import DEFAULT_TOL, DomainError, Exponents, Interval, Orientation, Status, Tolerances, Verdict
from .hardy import HardyProblem, HardyResult
from .interval_cohom import safe_chi
from .symfun import SymFun

RULE_GATE = "hypothesis not asserted: no closed fibre form pairs nontrivially with a compactly supported one"
RULE_REL = "relative H^j nonzero when chi(a,b) is infinite"
RULE_REL_OPEN = "chi(a,b) finite: the criterion is sufficient only"
RULE_TOR = "torsion nonzero and H^j infinite-dimensional when chi(a,b) and chi(b,a) are infinite"
RULE_TOR_OPEN = "a Hardy constant is finite or undecided: the criterion is sufficient only"


@dataclass(frozen=True)
class CylinderSpec:
    warp: SymFun
    interval: Interval
    fiber_dim: int
    degree: int
    exps: Exponents
    fiber_pairing_nontrivial: bool = True

    def __post_init__(self):
        if self.fiber_dim < 1:
            raise DomainError("fibre dimension must be at least 1")
        if not 1 <= self.degree <= self.fiber_dim + 1:
            raise DomainError(f"degree must lie in 1..{self.fiber_dim + 1}, got {self.degree}")

    @property
    def weight_exponents(self) -> tuple[Fraction, Fraction]:
        n, j = self.fiber_dim, self.degree
        return Fraction(n) / self.exps.p - j + 1, Fraction(n) / self.exps.q - j + 1


@dataclass(frozen=True)
class CylinderReport:
    weight0: SymFun
    weight1: SymFun
    chi_forward: HardyResult | None
    chi_backward: HardyResult | None
    hj_relative: Verdict
    torsion: Verdict
    hj_dim_infinite: bool

    def as_dict(self) -> dict:
        return {
            "weight0": self.weight0.to_text(),
            "weight1": self.weight1.to_text(),
            "chi_forward": self.chi_forward.as_dict() if self.chi_forward else None,
            "chi_backward": self.chi_backward.as_dict() if self.chi_backward else None,
            "hj_relative": self.hj_relative.as_dict(),
            "torsion": self.torsion.as_dict(),
            "hj_dim_infinite": self.hj_dim_infinite,
        }


def cylinder_weights(spec: CylinderSpec) -> tuple[SymFun, SymFun]:
    """(f^(n/p - j + 1), f^(n/q - j + 1)); MultiTermPower for sums with fractional exponents."""
    e0, e1 = spec.weight_exponents
    return spec.warp.power(e0), spec.warp.power(e1)


def classify_cylinder(spec: CylinderSpec, tol: Tolerances = DEFAULT_TOL) -> CylinderReport:
    w0, w1 = cylinder_weights(spec)
    if not spec.fiber_pairing_nontrivial:
        gate = Verdict(Status.UNKNOWN, RULE_GATE)
        return CylinderReport(w0, w1, None, None, gate, gate, False)
    iv = spec.interval
    fwd_iv = Interval(iv.lo, iv.hi, Orientation.FORWARD)
    problem = HardyProblem(spec.exps, fwd_iv, w0, w1)
    fwd = safe_chi(problem, tol)
    bwd = safe_chi(problem.with_interval(fwd_iv.reversed()), tol)
    ev = {"chi_forward": fwd.chi.as_dict(), "chi_backward": bwd.chi.as_dict()}
    if fwd.chi.is_divergent:
        rel = Verdict(Status.NONTRIVIAL, RULE_REL, {"chi_forward": ev["chi_forward"]})
    else:
        rel = Verdict(Status.UNKNOWN, RULE_REL_OPEN, {"chi_forward": ev["chi_forward"]})
    if fwd.chi.is_divergent and bwd.chi.is_divergent:
        tor, dim_inf = Verdict(Status.NONTRIVIAL, RULE_TOR, ev), True
    else:
        tor, dim_inf = Verdict(Status.UNKNOWN, RULE_TOR_OPEN, ev), False
    return CylinderReport(w0, w1, fwd, bwd, rel, tor, dim_inf)
