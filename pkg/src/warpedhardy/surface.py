"""Surfaces of revolution f(x1)^2 = x2^2 + ... + x_{n+2}^2 over x1 >= 0.

The surface is the warped cylinder [0, inf) x_F S^n with F = f o H, where
G(x) = int_0^x sqrt(1 + f'^2) is arc length and H its inverse.  The Hardy
constants of the cylinder are evaluated in the x-parametrization, where the
arc-length element contributes a density w = sqrt(1 + f'^2):

    chi0    : A = int_tau^inf f^(n-kp) w,      B = int_0^tau f^(-(n/q-k)q') w
    chi_inf : the same integrals with the two ranges swapped.

Torsion verdicts follow two necessary conditions (limit of f and finite volume)
and the rule that unbounded profiles always carry torsion.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .asym import Asym
from .core import (
    DEFAULT_TOL,
    INF,
    DomainError,
    Exponents,
    ExtendedValue,
    Interval,
    Orientation,
    Status,
    Tolerances,
    TolFailure,
    Verdict,
    WarpedHardyError,
    sphere_volume,
)
from .hardy import HardyProblem, HardyResult, Regime
from .interval_cohom import safe_chi
from .quad import improper_integral, partial_integral
from .symfun import Kind, MissingAsymptotics, SymFun, arc_density, derivative, numeric_product, power_any


class BracketFailure(WarpedHardyError):
    pass


class InconsistencyError(WarpedHardyError):
    pass


class Direction(enum.Enum):
    AT_INFINITY = "AtInfinity"   # chi0 = chi(0, inf)
    AT_ZERO = "AtZero"           # chi_inf = chi(inf, 0)


class Limit(enum.Enum):
    ZERO = "Zero"
    FINITE_POSITIVE = "FinitePositive"
    INFINITE = "Infinite"
    UNKNOWN = "Unknown"


RULE_FINITE_CHI_DECAY = "finite chi0 or chi_inf forces f -> 0"
RULE_CHI0_INFINITE = "n/p - k <= 0 forces chi0 = inf"
RULE_CHI_INF_INFINITE = "n/q - k >= 0 forces chi_inf = inf"
RULE_UNBOUNDED = "unbounded profile: torsion nonzero in every degree 1..n+1"
RULE_NECESSARY = "zero torsion in degree 1 or n+1 needs f -> 0 and finite volume"
RULE_OPEN = "necessary conditions hold; no sufficient criterion available"
RULE_SCOPE_DEGREE = "degree outside {1, n+1}: limit/volume criterion does not apply"
RULE_HYPOTHESIS = "exponent hypothesis 1/q - 1/p < 1/(n+1) fails"


@dataclass(frozen=True)
class SurfaceSpec:
    profile: SymFun
    fiber_dim: int
    degree: int
    exps: Exponents

    def __post_init__(self):
        n, j = self.fiber_dim, self.degree
        if n < 1:
            raise DomainError("fibre dimension must be at least 1")
        if not 1 <= j <= n + 1:
            raise DomainError(f"degree must lie in 1..{n + 1}, got {j}")
        f = self.profile
        if f.domain.lo != 0 or not f.domain.infinite:
            raise DomainError("the profile must be defined on [0, inf)")
        f0 = f.evaluate(0.0)  # DomainError when f(0) is not positive and finite
        try:
            d0 = derivative(f)(0.0)
        except (DomainError, ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"f' is not finite at 0: {exc}") from exc
        if not (math.isfinite(d0) and f0 > 0):
            raise DomainError("the profile must be smooth and positive at 0")

    @property
    def k(self) -> int:
        return self.degree - 1

    @property
    def hypothesis(self) -> bool:
        """1/q - 1/p < 1/(n+1)."""
        return 1 / self.exps.q - 1 / self.exps.p < Fraction(1, self.fiber_dim + 1)

    def with_degree(self, j: int) -> "SurfaceSpec":
        return SurfaceSpec(self.profile, self.fiber_dim, j, self.exps)


@dataclass(frozen=True)
class SurfaceReport:
    chi0: HardyResult
    chi_inf: HardyResult
    volume: ExtendedValue
    f_limit: Limit
    lemma4_conclusions: tuple[str, ...]
    torsion_j: Verdict
    torsion_all_degrees: Verdict
    hypothesis: bool = True
    notes: tuple[str, ...] = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "chi0": self.chi0.as_dict(),
            "chi_inf": self.chi_inf.as_dict(),
            "volume": self.volume.as_dict(),
            "f_limit": self.f_limit.value,
            "lemma4_conclusions": list(self.lemma4_conclusions),
            "torsion_j": self.torsion_j.as_dict(),
            "torsion_all_degrees": self.torsion_all_degrees.as_dict(),
            "hypothesis": self.hypothesis,
            "notes": list(self.notes),
        }


# -- arc length -------------------------------------------------------------------


def arc_length(spec: SurfaceSpec, x: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """G(x) = int_0^x sqrt(1 + f'^2)."""
    if x < 0:
        raise DomainError("arc length needs x >= 0")
    if x == 0:
        return 0.0
    return partial_integral(arc_density(spec.profile), 0.0, float(x), tol)


def arc_length_inverse(spec: SurfaceSpec, s: float, tol: Tolerances = DEFAULT_TOL, max_doublings: int | None = None) -> float:
    """H(s): the x with G(x) = s, by bracketing and Brent's method."""
    if s < 0:
        raise DomainError("arc length inverse needs s >= 0")
    if s == 0:
        return 0.0
    # G(x) >= x, so the root lies in [0, s]; the bracket grows only if G is evaluated short
    hi = float(s)
    budget = max_doublings or tol.max_doublings
    k = 0
    while arc_length(spec, hi, tol) < s:
        hi *= 2
        k += 1
        if k > budget:
            raise BracketFailure(f"no bracket for s={s} within {budget} doublings")
    return brentq(lambda x: arc_length(spec, x, tol) - s, 0.0, hi, xtol=tol.abs_tol, rtol=4 * np.finfo(float).eps)


# -- weights and constants ----------------------------------------------------------


def surface_weights(spec: SurfaceSpec) -> tuple[SymFun, SymFun]:
    """x-parametrized weights whose A, B integrands are f^(n-kp) w and f^(-(n/q-k)q') w."""
    n, k = spec.fiber_dim, spec.k
    p, q = spec.exps.p, spec.exps.q
    w = arc_density(spec.profile)
    v0 = numeric_product(power_any(spec.profile, Fraction(n) / p - k), power_any(w, 1 / p))
    v1 = numeric_product(power_any(spec.profile, Fraction(n) / q - k), power_any(w, -1 / spec.exps.q_conj))
    return v0, v1


def _orientation(direction: Direction) -> Orientation:
    return Orientation.FORWARD if direction is Direction.AT_INFINITY else Orientation.REVERSED


def chi_surface(spec: SurfaceSpec, direction: Direction, tol: Tolerances = DEFAULT_TOL) -> HardyResult:
    """chi0 (AT_INFINITY) or chi_inf (AT_ZERO) computed from the profile."""
    v0, v1 = surface_weights(spec)
    problem = HardyProblem(spec.exps, Interval(0.0, INF, _orientation(direction)), v0, v1)
    try:
        return safe_chi(problem, tol)
    except (MissingAsymptotics, DomainError, ValueError) as exc:
        return HardyResult(ExtendedValue.unknown(f"cannot evaluate: {exc}"), problem.regime)


def surface_volume(spec: SurfaceSpec, tol: Tolerances = DEFAULT_TOL) -> ExtendedValue:
    """s_n int_0^inf f^n sqrt(1 + f'^2)."""
    n = spec.fiber_dim
    g = numeric_product(power_any(spec.profile, n), arc_density(spec.profile))
    out = improper_integral(g, Interval(0.0), tol).outcome
    if not out.is_finite:
        return out
    sn = sphere_volume(n)
    return ExtendedValue.finite(sn * out.value, sn * out.error_bound)


def profile_limit(spec: SurfaceSpec) -> Limit:
    try:
        a = spec.profile.asym_at(INF)
    except MissingAsymptotics:
        return Limit.UNKNOWN
    return {-1: Limit.ZERO, 0: Limit.FINITE_POSITIVE, 1: Limit.INFINITE}[a.trend()]


# -- arc-length parametrization ------------------------------------------------------


@dataclass
class ArcLengthProfile:
    """F = f o H as a numeric function of arc length, for cross-checks."""

    spec: SurfaceSpec
    s_max: float = 200.0
    rtol: float = 1e-13

    def __post_init__(self):
        f = self.spec.profile
        self._w = arc_density(f)
        d = derivative(f)

        def rhs(_s, x):
            return [1.0 / math.sqrt(1.0 + d(float(x[0])) ** 2)]

        self._sol = solve_ivp(rhs, (0.0, self.s_max), [0.0], method="DOP853", dense_output=True,
                              rtol=self.rtol, atol=self.rtol)
        if not self._sol.success:
            raise TolFailure("arc-length ODE failed", {"message": self._sol.message})
        self._x_end = float(self._sol.y[0, -1])
        self._slope_end = 1.0 / self._w.evaluate(self._x_end)

    def inverse(self, s):
        """H(s); linear continuation past ``s_max`` (w is nearly constant there)."""
        s = np.asarray(s, dtype=float)
        inside = np.minimum(s, self.s_max)
        x = self._sol.sol(inside)[0]
        return np.where(s > self.s_max, self._x_end + (s - self.s_max) * self._slope_end, x)

    def asym_inf(self) -> Asym:
        f = self.spec.profile
        a = f.asym_at(INF)
        dlim = derivative(f).asym_inf
        if dlim is not None and dlim.trend() > 0:
            return Asym(1.0, Fraction(1))          # G ~ f, so F ~ s
        if dlim is not None and dlim.trend() == 0:
            scale = math.sqrt(1 + dlim.coeff**2)  # H(s) ~ s / sqrt(1 + L^2)
            return Asym(a.coeff * scale ** (-float(a.alpha)), a.alpha, a.gamma, a.eta, a.delta)
        # f' -> 0: H(s) = s - c + o(1) with c = int_0^inf (w - 1)
        c = self.shift()
        return Asym(a.coeff * math.exp(-float(a.delta) * c), a.alpha, a.gamma, a.eta, a.delta)

    def shift(self) -> float:
        """c = int_0^inf (w - 1), the limit of G(x) - x."""
        d = derivative(self.spec.profile)

        def log_excess(t):
            # w - 1 = f'^2 / (1 + w)
            la = d.log_abs(t)
            log_w = 0.5 * np.logaddexp(0.0, 2 * la)
            return 2 * la - np.logaddexp(0.0, log_w)

        def fn(t):
            return float(np.exp(log_excess(np.array([t]))[0]))

        asym = None if d.asym_inf is None else (d.asym_inf**2).scaled(0.5)
        base = SymFun.numeric(fn, Interval(0.0), asym_hi=asym, label="w-1")
        g = SymFun((), base.domain, Kind.NUMERIC, fn, base.asym_fn,
                   lambda anchor, logy: log_excess(anchor + np.exp(logy)), None, "w-1")
        method = "auto" if asym is not None else "heuristic"
        return improper_integral(g, Interval(0.0), method=method).outcome.as_float()

    def as_symfun(self) -> SymFun:
        f = self.spec.profile
        a_inf = self.asym_inf()

        def fn(s):
            return f.evaluate(float(self.inverse(s)))

        def log_fn(anchor, logy):
            x = self.inverse(anchor + np.exp(logy))
            with np.errstate(divide="ignore"):
                return f.log_values(0.0, np.log(np.maximum(x, 0.0)))

        base = SymFun.numeric(fn, Interval(0.0), asym_hi=a_inf, label="F")
        return SymFun((), base.domain, Kind.NUMERIC, fn, base.asym_fn, log_fn, None, "F")


def chi_surface_arclength(spec: SurfaceSpec, direction: Direction, tol: Tolerances = DEFAULT_TOL) -> HardyResult:
    """The same constant with weights F^(n/p-k), F^(n/q-k) in the arc-length parameter."""
    F = ArcLengthProfile(spec).as_symfun()
    n, k = spec.fiber_dim, spec.k
    v0 = power_any(F, Fraction(n) / spec.exps.p - k)
    v1 = power_any(F, Fraction(n) / spec.exps.q - k)
    problem = HardyProblem(spec.exps, Interval(0.0, INF, _orientation(direction)), v0, v1)
    return safe_chi(problem, tol)


# -- classification ----------------------------------------------------------------


def _regime(exps: Exponents) -> Regime:
    return Regime.SUP_FORM if exps.sup_form else Regime.INTEGRAL_FORM


def classify_surface(spec: SurfaceSpec, tol: Tolerances = DEFAULT_TOL) -> SurfaceReport:
    n, k = spec.fiber_dim, spec.k
    p, q = spec.exps.p, spec.exps.q
    hyp = spec.hypothesis
    fired: list[str] = []
    notes = ["weights use exponents n/p - k and n/q - k with k = j - 1"]

    if hyp and Fraction(n) / p - k <= 0:
        fired.append(RULE_CHI0_INFINITE)
        chi0 = HardyResult(ExtendedValue.divergent(RULE_CHI0_INFINITE), _regime(spec.exps))
    else:
        chi0 = chi_surface(spec, Direction.AT_INFINITY, tol)
    if hyp and Fraction(n) / q - k >= 0:
        fired.append(RULE_CHI_INF_INFINITE)
        chi_inf = HardyResult(ExtendedValue.divergent(RULE_CHI_INF_INFINITE), _regime(spec.exps))
    else:
        chi_inf = chi_surface(spec, Direction.AT_ZERO, tol)

    try:
        volume = surface_volume(spec, tol)
    except TolFailure as exc:
        volume = ExtendedValue.unknown(f"quadrature failed: {exc}")
    f_limit = profile_limit(spec)

    if hyp and (chi0.chi.is_finite or chi_inf.chi.is_finite):
        fired.append(RULE_FINITE_CHI_DECAY)
        if f_limit not in (Limit.ZERO, Limit.UNKNOWN):
            raise InconsistencyError(f"{RULE_FINITE_CHI_DECAY}, but the profile limit is {f_limit.value}")

    evidence = {"f_limit": f_limit.value, "volume": volume.as_dict()}
    if not hyp:
        gate = Verdict(Status.UNKNOWN, RULE_HYPOTHESIS)
        return SurfaceReport(chi0, chi_inf, volume, f_limit, tuple(fired), gate, gate, hyp, tuple(notes))

    if f_limit is Limit.INFINITE:
        all_deg = Verdict(Status.NONTRIVIAL, RULE_UNBOUNDED, {"f_limit": f_limit.value})
    else:
        all_deg = Verdict(Status.UNKNOWN, "profile not known to be unbounded", {"f_limit": f_limit.value})

    if all_deg.status is Status.NONTRIVIAL:
        torsion_j = Verdict(Status.NONTRIVIAL, RULE_UNBOUNDED, evidence)
    elif spec.degree not in (1, n + 1):
        torsion_j = Verdict(Status.UNKNOWN, RULE_SCOPE_DEGREE, evidence)
    elif f_limit in (Limit.FINITE_POSITIVE, Limit.INFINITE) or volume.is_divergent:
        torsion_j = Verdict(Status.NONTRIVIAL, RULE_NECESSARY, evidence)
    elif f_limit is Limit.ZERO and volume.is_finite:
        torsion_j = Verdict(Status.UNKNOWN, RULE_OPEN, evidence)
    else:
        torsion_j = Verdict(Status.UNKNOWN, "limit or volume undecided", evidence)
    return SurfaceReport(chi0, chi_inf, volume, f_limit, tuple(fired), torsion_j, all_deg, hyp, tuple(notes))

