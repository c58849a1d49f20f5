"""Weighted Hardy constant, its tau-profile, divergence witnesses and test ratios.

For exponents ``p, q`` and weights ``v0, v1`` on an interval with start
``alpha`` and end ``beta`` (``alpha = lo`` for forward intervals) write

    A(tau) = int_tau^beta v0^p,    B(tau) = int_alpha^tau v1^(-q').

For ``p >= q`` the constant is ``sup_tau A^(1/p) B^(1/q')``; for ``p < q`` it
is ``(int (B^(p-1) A)^(q/(q-p)) v1^(-q') dtau)^((q-p)/(pq))``.  The inequality

    || v0(tau) int_alpha^tau g ||_p <= C || v1 g ||_q

holds for some finite C exactly when the constant is finite.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .asym import Asym, AsymptoticsUndecided
from .core import (
    DEFAULT_TOL,
    INF,
    DomainError,
    Exponents,
    ExtendedValue,
    Interval,
    Orientation,
    Tolerances,
    TolFailure,
    WarpedHardyError,
)
from .quad import (
    BOTH,
    LEFT,
    RIGHT,
    LineMap,
    LogMesh,
    PowerTail,
    W_KRONROD,
    cutoff_doubling,
    improper_integral,
    line_map,
    log_integral,
)
from .symfun import MissingAsymptotics, SymFun, numeric_product, power_any

log = logging.getLogger(__name__)

_ASYM_ERRORS = (MissingAsymptotics, AsymptoticsUndecided, DomainError)


class RegimeError(WarpedHardyError):
    """The sup-form profile was requested with p < q."""


class WitnessNotFound(WarpedHardyError):
    pass


class DegenerateTestFunction(WarpedHardyError):
    pass


class Regime(enum.Enum):
    SUP_FORM = "SupForm"
    INTEGRAL_FORM = "IntegralForm"


@dataclass(frozen=True)
class HardyProblem:
    exps: Exponents
    interval: Interval
    v0: SymFun
    v1: SymFun

    def __post_init__(self):
        iv = self.interval
        for name, v in (("v0", self.v0), ("v1", self.v1)):
            if iv.lo < v.domain.lo or iv.hi > v.domain.hi:
                raise DomainError(f"{name} is not defined on all of [{iv.lo}, {iv.hi})")

    @property
    def forward(self) -> bool:
        return self.interval.orientation is Orientation.FORWARD

    @property
    def alpha(self) -> float:
        return self.interval.lo if self.forward else self.interval.hi

    @property
    def beta(self) -> float:
        return self.interval.hi if self.forward else self.interval.lo

    @property
    def regime(self) -> Regime:
        return Regime.SUP_FORM if self.exps.sup_form else Regime.INTEGRAL_FORM

    @cached_property
    def g0(self) -> SymFun:
        """v0^p, the integrand of the tail factor A."""
        return power_any(self.v0, self.exps.p)

    @cached_property
    def g1(self) -> SymFun:
        """v1^(-q'), the integrand of the head factor B."""
        return power_any(self.v1, -self.exps.q_conj)

    def scaled(self, c0: float, c1: float) -> "HardyProblem":
        return HardyProblem(self.exps, self.interval, self.v0.scaled(c0), self.v1.scaled(c1))

    def with_interval(self, interval: Interval) -> "HardyProblem":
        return HardyProblem(self.exps, interval, self.v0, self.v1)


@dataclass(frozen=True)
class HardyResult:
    chi: ExtendedValue
    regime: Regime
    profile: tuple[tuple[float, float], ...] = ()
    argmax_tau: float | str | None = None
    evidence: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = {"chi": self.chi.as_dict(), "regime": self.regime.value}
        if self.regime is Regime.SUP_FORM:
            d["argmax_tau"] = self.argmax_tau
            d["profile_samples"] = len(self.profile)
        if self.evidence:
            d["evidence"] = self.evidence
        return d


@dataclass(frozen=True)
class DivergenceWitness:
    h: SymFun
    rhs_integral: float
    lhs_divergence_evidence: tuple[tuple[float, float], ...]
    exponent: float = 0.0
    log_power: int = 0

    def as_dict(self) -> dict:
        return {
            "h": self.h.to_text(),
            "rhs_integral": self.rhs_integral,
            "lhs_divergence_evidence": [list(x) for x in self.lhs_divergence_evidence],
        }


# -- endpoint asymptotics ----------------------------------------------------------


def _is_finite_point(x: float) -> bool:
    return math.isfinite(x)


def _remainder(f: SymFun, at: float) -> Optional[Asym]:
    """Integral of f between tau and the endpoint ``at``; None if it diverges."""
    ok, a = f.asym_at(at).integrate(_is_finite_point(at))
    return a if ok else None


def _accumulated(f: SymFun, at: float, total: Callable[[], float]) -> Asym:
    """Integral of f from the far endpoint up to tau, as tau approaches ``at``."""
    ok, a = f.asym_at(at).integrate(_is_finite_point(at))
    return Asym.constant(total()) if ok else a


@dataclass
class _Ends:
    """Leading behaviour of A and B at alpha and beta (None: identically infinite)."""

    A_alpha: Optional[Asym]
    B_alpha: Optional[Asym]
    A_beta: Optional[Asym]
    B_beta: Optional[Asym]


def _end_asymptotics(pr: HardyProblem, tol: Tolerances) -> _Ends:
    iv = pr.interval
    cache: dict[str, float] = {}

    def total(name: str, f: SymFun) -> Callable[[], float]:
        def get():
            if name not in cache:
                cache[name] = math.exp(log_integral(f, iv.forward(), tol)[0])
            return cache[name]

        return get

    B_alpha = _remainder(pr.g1, pr.alpha)
    A_beta = _remainder(pr.g0, pr.beta)
    if B_alpha is None or A_beta is None:
        return _Ends(None, B_alpha, A_beta, None)
    A_alpha = _accumulated(pr.g0, pr.alpha, total("g0", pr.g0))
    B_beta = _accumulated(pr.g1, pr.beta, total("g1", pr.g1))
    return _Ends(A_alpha, B_alpha, A_beta, B_beta)


def _factor_infinite(pr: HardyProblem, f: SymFun, at: float, tol: Tolerances) -> tuple[bool, tuple]:
    """Heuristic: does the integral of f diverge at the endpoint ``at``?"""
    iv = pr.interval
    mid = iv.lo + 1.0 if iv.infinite else iv.lo + 0.5 * iv.length
    sub = Interval(mid, iv.hi) if at == iv.hi else Interval(iv.lo, mid)
    res = cutoff_doubling(f, sub, tol)
    return res.outcome.is_divergent, res.cutoff_history


# -- shared mesh ---------------------------------------------------------------------


@dataclass
class _Layout:
    lmap: LineMap
    mesh: LogMesh
    side_A: str   # anchored side of the tail factor's integrand (index 0)
    side_B: str   # anchored side of the head factor's integrand (index 1)

    def log_A(self) -> np.ndarray:
        return self.mesh.node_cumulative(0, self.side_A)

    def log_B(self) -> np.ndarray:
        return self.mesh.node_cumulative(1, self.side_B)

    def log_A_at(self, s: float) -> float:
        return self.mesh.cumulative_at(0, s, self.side_A)

    def log_B_at(self, s: float) -> float:
        return self.mesh.cumulative_at(1, s, self.side_B)


def _layout(pr: HardyProblem, tol: Tolerances, half_width: float | None = None) -> _Layout:
    # s increases with t; the forward tail factor is anchored on the right
    side_A, side_B = (RIGHT, LEFT) if pr.forward else (LEFT, RIGHT)
    lmap = line_map(pr.interval.forward(), [(pr.g0, side_A), (pr.g1, side_B)])
    S = half_width or _interior_half_width(lmap)
    width = min(0.5, 2 * S * 21 / tol.sup_grid_points)
    mesh = LogMesh(
        [lmap.integrand(pr.g0), lmap.integrand(pr.g1)],
        [side_A, side_B],
        window=(-S, S),
        tol=tol,
        width=width,
        s_limits=lmap.s_limits,
    )
    return _Layout(lmap, mesh, side_A, side_B)


def _interior_half_width(lmap: LineMap) -> float:
    """Half-width of the s-window on which the profile is sampled."""
    return 64.0 if lmap.linear_tail else 16.0


# -- profile -----------------------------------------------------------------------


def profile(problem: HardyProblem, tau: float, tol: Tolerances = DEFAULT_TOL) -> ExtendedValue:
    """``A(tau)^(1/p) B(tau)^(1/q')`` at one interior point; Divergent if a factor is infinite."""
    if not problem.exps.sup_form:
        raise RegimeError("the sup-form profile needs p >= q")
    iv = problem.interval
    if not (iv.lo < tau < iv.hi):
        raise DomainError(f"tau={tau} is not interior to [{iv.lo}, {iv.hi})")
    left, right = Interval(iv.lo, tau), Interval(tau, iv.hi)
    a_iv, b_iv = (right, left) if problem.forward else (left, right)
    A = improper_integral(problem.g0, a_iv, tol).outcome
    B = improper_integral(problem.g1, b_iv, tol).outcome
    if A.is_divergent or B.is_divergent:
        return ExtendedValue.divergent("a profile factor is infinite")
    p, qc = float(problem.exps.p), float(problem.exps.q_conj)
    val = A.value ** (1 / p) * B.value ** (1 / qc)
    rel = A.error_bound / max(A.value, 1e-300) / p + B.error_bound / max(B.value, 1e-300) / qc
    return ExtendedValue.finite(val, val * rel)


def _sampled_profile(lay: _Layout, pr: HardyProblem, S: float):
    p, qc = float(pr.exps.p), float(pr.exps.q_conj)
    lay.mesh.converge(interest=(-S, S))
    s = lay.mesh.node_s()
    lp = lay.log_A() / p + lay.log_B() / qc
    inside = (s >= -S) & (s <= S)
    return s[inside], lp[inside]


def _golden_max(fn: Callable[[float], float], a: float, b: float, tol: float = 1e-10, max_iter: int = 200):
    """Maximise a unimodal function on [a, b] by golden-section search."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * (1.0 + abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def _sup_form(pr: HardyProblem, tol: Tolerances) -> HardyResult:
    p, qc = pr.exps.p, pr.exps.q_conj
    evidence: dict = {}
    limits: dict[str, float] = {}
    try:
        ends = _end_asymptotics(pr, tol)
        if ends.A_beta is None:
            return HardyResult(ExtendedValue.divergent("tail factor infinite for every tau"), Regime.SUP_FORM)
        if ends.B_alpha is None:
            return HardyResult(ExtendedValue.divergent("head factor infinite for every tau"), Regime.SUP_FORM)
        for name, A, B in (("alpha", ends.A_alpha, ends.B_alpha), ("beta", ends.A_beta, ends.B_beta)):
            prof = A ** (1 / p) * B ** (1 / qc)
            if prof.trend() > 0:
                return HardyResult(
                    ExtendedValue.divergent(f"profile tends to infinity at {name}"),
                    Regime.SUP_FORM,
                    argmax_tau=name,
                    evidence={"profile_asymptotics": prof.as_dict()},
                )
            limits[name] = prof.limit()
    except _ASYM_ERRORS as exc:
        evidence["endpoint_analysis"] = f"sampled only ({exc})"
        for f, at, what in ((pr.g0, pr.beta, "tail"), (pr.g1, pr.alpha, "head")):
            div, hist = _factor_infinite(pr, f, at, tol)
            if div:
                return HardyResult(
                    ExtendedValue.divergent(f"{what} factor infinite (cutoff doubling)"),
                    Regime.SUP_FORM,
                    evidence={"cutoff_history": [list(x) for x in hist]},
                )

    lay = _layout(pr, tol)
    S = _interior_half_width(lay.lmap)
    s, lp = _sampled_profile(lay, pr, S)
    i = int(np.argmax(lp))
    lo_s = s[max(i - 1, 0)]
    hi_s = s[min(i + 1, len(s) - 1)]

    def fn(x: float) -> float:
        return lay.log_A_at(x) / float(p) + lay.log_B_at(x) / float(qc)

    best_s, best = float(s[i]), float(lp[i])
    if 0 < i < len(s) - 1:
        cand_s, cand = _golden_max(fn, float(lo_s), float(hi_s))
        if cand > best:
            best_s, best = cand_s, cand
    interior = math.exp(best)
    taus = lay.lmap.t(s)
    samples = tuple((float(t), float(math.exp(v))) for t, v in zip(taus, lp))
    chi, arg = interior, float(lay.lmap.t(np.array([best_s]))[0])
    endpoint_names = {"alpha": pr.alpha, "beta": pr.beta}
    for name, L in limits.items():
        # the sup is approached at an endpoint when no sample clearly exceeds the limit
        if L >= chi * (1 - 10 * tol.rel_tol):
            chi, arg = max(L, chi), f"limit at {name} ({endpoint_names[name]})"
    err = chi * tol.rel_tol
    evidence["endpoint_limits"] = limits
    evidence["evaluations"] = lay.mesh.evaluations
    return HardyResult(ExtendedValue.finite(chi, err), Regime.SUP_FORM, samples, arg, evidence)


# -- integral form ---------------------------------------------------------------------


def _power_tails(pr: HardyProblem, lmap: LineMap, outers: dict[str, Asym]) -> tuple:
    """Tail model at an infinite end whose exponential factors cancel in the outer integrand.

    The linear coordinate chosen for exponential weights leaves such a power
    tail decaying too slowly to reach, so it is integrated from its asymptotics.
    """
    end = "beta" if pr.forward else "alpha"
    outer = outers.get(end)
    if not (lmap.linear_tail and outer is not None and outer.delta == 0 and outer.gamma == 0 and outer.eta == 0):
        return (None, None)
    return (None, PowerTail(lmap, outer.alpha, RIGHT))


def _integral_form(pr: HardyProblem, tol: Tolerances) -> HardyResult:
    p, q = pr.exps.p, pr.exps.q
    r = q / (q - p)
    evidence: dict = {}
    outers: dict[str, Asym] = {}
    try:
        ends = _end_asymptotics(pr, tol)
        if ends.A_beta is None or ends.B_alpha is None:
            return HardyResult(ExtendedValue.divergent("an inner integral is infinite for every tau"),
                               Regime.INTEGRAL_FORM)
        for name, at, A, B in (("alpha", pr.alpha, ends.A_alpha, ends.B_alpha),
                               ("beta", pr.beta, ends.A_beta, ends.B_beta)):
            outer = (B ** (p - 1) * A) ** r * pr.g1.asym_at(at)
            outers[name] = outer
            if not outer.converges(_is_finite_point(at)):
                return HardyResult(
                    ExtendedValue.divergent(f"outer integral diverges at {name}"),
                    Regime.INTEGRAL_FORM,
                    evidence={"outer_asymptotics": outer.as_dict()},
                )
    except _ASYM_ERRORS as exc:
        evidence["endpoint_analysis"] = f"sampled only ({exc})"
        for f, at in ((pr.g0, pr.beta), (pr.g1, pr.alpha)):
            div, hist = _factor_infinite(pr, f, at, tol)
            if div:
                return HardyResult(
                    ExtendedValue.divergent("an inner integral is infinite (cutoff doubling)"),
                    Regime.INTEGRAL_FORM,
                    evidence={"cutoff_history": [list(x) for x in hist]},
                )

    lay = _layout(pr, tol, half_width=8.0)
    pf, rf = float(p), float(r)

    def outer_nodes(mesh: LogMesh) -> np.ndarray:
        return rf * ((pf - 1) * lay.log_B() + lay.log_A()) + mesh.node_logs(1)

    try:
        res = lay.mesh.node_integral(outer_nodes, tail_models=_power_tails(pr, lay.lmap, outers))
    except TolFailure as exc:
        if "endpoint_analysis" in evidence:
            return HardyResult(ExtendedValue.divergent(f"outer integral does not settle: {exc}"),
                               Regime.INTEGRAL_FORM, evidence={**evidence, **exc.evidence})
        raise
    expo = float((q - p) / (p * q))
    chi = math.exp(res.log_value * expo)
    evidence["evaluations"] = lay.mesh.evaluations
    return HardyResult(ExtendedValue.finite(chi, chi * expo * res.rel_error), Regime.INTEGRAL_FORM,
                       evidence=evidence)


def hardy_constant(problem: HardyProblem, tol: Tolerances = DEFAULT_TOL) -> HardyResult:
    """The Hardy constant of ``problem`` with the regime chosen by ``p >= q``."""
    if problem.exps.sup_form:
        return _sup_form(problem, tol)
    return _integral_form(problem, tol)


# -- divergence witness ----------------------------------------------------------------

DEFAULT_WITNESS_S = tuple(Fraction(k, 2) for k in range(0, -7, -1))
DEFAULT_WITNESS_M = (-2, -1, 0, 1)


def _candidates(iv: Interval, s_grid: Sequence[Fraction], m_grid: Sequence[int]):
    order_m = sorted(m_grid, key=lambda m: (abs(m), m))
    order_s = sorted(s_grid, reverse=True)
    for m in order_m:
        for s in order_s:
            if iv.lo >= 1:
                yield SymFun.monomial(1.0, s, m, 0, 0.0, iv.forward())
            else:
                if m == 0:
                    yield SymFun.monomial(1.0, s, 0, 0, iv.lo, iv.forward())
                yield SymFun.monomial(1.0, s, m, 0, iv.lo - 1.0, iv.forward())


def _primitive_ends(pr: HardyProblem, h: SymFun, tol: Tolerances) -> tuple[Optional[Asym], Optional[Asym]]:
    """Asymptotics of H(tau) = int_alpha^tau h at alpha and beta (None at alpha: h not integrable)."""
    H_alpha = _remainder(h, pr.alpha)
    if H_alpha is None:
        return None, None
    ok, a = h.asym_at(pr.beta).integrate(_is_finite_point(pr.beta))
    if ok:
        return H_alpha, Asym.constant(math.exp(log_integral(h, pr.interval.forward(), tol)[0]))
    return H_alpha, a


def _lhs_evidence(pr: HardyProblem, h: SymFun, tol: Tolerances, steps: int = 10):
    """Partial integrals of v0^p H^p over growing windows towards the divergent end."""
    side_h = LEFT if pr.forward else RIGHT
    lmap = line_map(pr.interval.forward(), [(h, side_h), (pr.g0, BOTH)])
    mesh = LogMesh([lmap.integrand(h), lmap.integrand(pr.g0)], [side_h, BOTH], tol=tol, s_limits=lmap.s_limits)
    pf = float(pr.exps.p)
    hist = []
    try:
        mesh.converge(only=[0])
    except TolFailure:
        return ()
    for k in range(steps):
        S = 2.0 + 2.0 * k
        lo_s, hi_s = max(-S, lmap.s_limits[0]), min(S, lmap.s_limits[1])
        while mesh.edges[0] > lo_s and mesh.extend(LEFT):
            pass
        while mesh.edges[-1] < hi_s and mesh.extend(RIGHT):
            pass
        try:
            mesh.converge(only=[0])
        except TolFailure:
            break
        s = mesh.node_s()
        lv = mesh.node_logs(1) + pf * mesh.node_cumulative(0, side_h)
        P = len(mesh.panels)
        w = np.tile(0.5 * W_KRONROD, P) * np.repeat(np.diff(mesh.edges), 21)
        sel = (s >= lo_s) & (s <= hi_s)
        with np.errstate(over="ignore"):
            m = float(np.max(lv[sel]))
            val = m + math.log(float(np.sum(w[sel] * np.exp(lv[sel] - m))))
        cut = float(lmap.t(np.array([hi_s if pr.forward else lo_s]))[0])
        hist.append((cut, float(math.exp(min(val, 700.0)))))
    return tuple(hist)


def divergence_witness(
    problem: HardyProblem,
    tol: Tolerances = DEFAULT_TOL,
    s_grid: Sequence[Fraction] = DEFAULT_WITNESS_S,
    m_grid: Sequence[int] = DEFAULT_WITNESS_M,
) -> DivergenceWitness:
    """A nonnegative ``h`` with ``v1 h`` in L^q but ``v0 int_alpha h`` not in L^p.

    Candidates are ``t^s (ln t)^m`` (or shifted variants when ``lo < 1``),
    tried in order of increasing ``|m|`` and decreasing ``s``.
    """
    if not (problem.v0.is_symbolic and problem.v1.is_symbolic):
        raise WitnessNotFound("witness search needs symbolic weights")
    chi = hardy_constant(problem, tol).chi
    if not chi.is_divergent:
        raise WitnessNotFound("the Hardy constant is finite; no witness exists")
    p, q = problem.exps.p, problem.exps.q
    v1q = power_any(problem.v1, q)
    for h in _candidates(problem.interval, s_grid, m_grid):
        try:
            hq = numeric_product(v1q, power_any(h, q))
            rhs_ok = all(
                hq.asym_at(at).converges(_is_finite_point(at)) for at in (problem.interval.lo, problem.interval.hi)
            )
            if not rhs_ok:
                continue
            H_alpha, H_beta = _primitive_ends(problem, h, tol)
            if H_alpha is None:
                continue
            lhs_div = False
            for at, H in ((problem.alpha, H_alpha), (problem.beta, H_beta)):
                outer = problem.g0.asym_at(at) * H**p
                if not outer.converges(_is_finite_point(at)):
                    lhs_div = True
            if not lhs_div:
                continue
            rhs = improper_integral(hq, problem.interval.forward(), tol).outcome
        except (*_ASYM_ERRORS, TolFailure, ValueError) as exc:
            log.debug("candidate %s skipped: %s", h.to_text(), exc)
            continue
        if not rhs.is_finite:
            continue
        term = h.terms[0]
        return DivergenceWitness(h, rhs.value, _lhs_evidence(problem, h, tol), float(term.alpha), int(term.gamma))
    raise WitnessNotFound("no candidate in the search grid verifies both conditions")


# -- extremal test function ---------------------------------------------------------------


def extremal_ratio(problem: HardyProblem, tau: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """LHS/RHS of the Hardy inequality for ``g = v1^(-q') 1_[alpha, tau]``.

    Any such ratio is a lower bound on the best constant; by construction it
    is at least ``profile(tau)``.
    """
    if not problem.exps.sup_form:
        raise RegimeError("the extremal ratio is defined for p >= q")
    iv = problem.interval
    if tau == problem.alpha:
        raise DegenerateTestFunction("tau at alpha gives the zero test function")
    if not (iv.lo < tau < iv.hi):
        raise DomainError(f"tau={tau} is not interior to [{iv.lo}, {iv.hi})")
    head_iv = Interval(iv.lo, tau) if problem.forward else Interval(tau, iv.hi)
    tail_iv = Interval(tau, iv.hi) if problem.forward else Interval(iv.lo, tau)
    B = improper_integral(problem.g1, head_iv, tol).outcome
    if not B.is_finite:
        raise DegenerateTestFunction("v1^(-q') is not integrable between alpha and tau")
    A = improper_integral(problem.g0, tail_iv, tol).outcome
    pf, qf = float(problem.exps.p), float(problem.exps.q)
    if not A.is_finite:
        return INF
    # first part: int over [alpha, tau] of v0^p B(s)^p with B anchored at alpha
    side_B = LEFT if problem.forward else RIGHT
    lmap = line_map(head_iv, [(problem.g0, BOTH), (problem.g1, side_B)])
    mesh = LogMesh([lmap.integrand(problem.g0), lmap.integrand(problem.g1)], [BOTH, side_B], tol=tol,
                   s_limits=lmap.s_limits)
    try:
        res = mesh.node_integral(lambda m: m.node_logs(0) + pf * m.node_cumulative(1, side_B))
        head = math.exp(res.log_value)
    except TolFailure:
        return INF
    lhs = (head + B.value**pf * A.value) ** (1 / pf)
    rhs = B.value ** (1 / qf)
    return lhs / rhs
