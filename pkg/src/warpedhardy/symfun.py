"""Positive power-log-exponential functions with exact endpoint asymptotics.

A symbolic function is a sum of monomials

    c * u**alpha * (ln u)**gamma * exp(delta * u),   u = t - shift,

on an interval.  Numeric functions carry a callback and declared endpoint
asymptotics (see :class:`Asym`); the engine never infers asymptotics from
samples.

Evaluation inside the integrators goes through :meth:`SymFun.log_values`,
which takes a point as ``anchor + exp(logy)`` so that distances to a singular
endpoint are never rounded away.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .asym import Asym, dominant
from .core import INF, DomainError, Interval, WarpedHardyError, as_fraction


class MultiTermPower(WarpedHardyError):
    pass


class MissingDerivative(WarpedHardyError):
    pass


class MissingAsymptotics(WarpedHardyError):
    pass


class GrammarError(WarpedHardyError):
    pass


class Kind(enum.Enum):
    SYMBOLIC = "symbolic"
    NUMERIC = "numeric"


class Endpoint(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class Monomial:
    coeff: float
    alpha: Fraction = Fraction(0)
    gamma: Fraction = Fraction(0)
    delta: Fraction = Fraction(0)
    shift: float = 0.0

    def __post_init__(self):
        if not (self.coeff > 0 and math.isfinite(self.coeff)):
            raise DomainError(f"monomial coefficient must be positive, got {self.coeff}")
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "gamma", as_fraction(self.gamma))
        object.__setattr__(self, "delta", as_fraction(self.delta))
        object.__setattr__(self, "shift", float(self.shift))

    @property
    def exponents(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.alpha, self.gamma, self.delta)

    def value(self, t: float) -> float:
        u = t - self.shift
        v = self.coeff
        if self.alpha:
            v *= u ** float(self.alpha)
        if self.gamma:
            v *= math.log(u) ** float(self.gamma)
        if self.delta:
            v *= math.exp(float(self.delta) * u)
        return v

    def power(self, s) -> "Monomial":
        s = as_fraction(s)
        return Monomial(self.coeff ** float(s), self.alpha * s, self.gamma * s, self.delta * s, self.shift)

    def times(self, other: "Monomial") -> "Monomial":
        if self.shift != other.shift:
            raise MultiTermPower("monomials with different shifts do not multiply into a monomial")
        return Monomial(
            self.coeff * other.coeff,
            self.alpha + other.alpha,
            self.gamma + other.gamma,
            self.delta + other.delta,
            self.shift,
        )

    def asym_at_inf(self) -> Asym:
        c = self.coeff * math.exp(-float(self.delta) * self.shift) if self.delta else self.coeff
        return Asym(c, self.alpha, self.gamma, Fraction(0), self.delta)

    def asym_at(self, a: float) -> Asym:
        """Behaviour as t decreases to the finite point ``a`` (x = 1/(t-a))."""
        u0 = a - self.shift
        if u0 == 0:
            return Asym(self.coeff, -self.alpha)
        if u0 == 1 and self.gamma:
            c = self.coeff * math.exp(float(self.delta))
            return Asym(c, -self.gamma)
        return Asym.constant(self.value(a))

    def log_values(self, anchor: float, logy: np.ndarray) -> np.ndarray:
        u0 = anchor - self.shift
        if u0 == 0:
            logu = logy
        else:
            logu = np.logaddexp(math.log(u0), logy)
        out = np.full_like(logy, math.log(self.coeff))
        if self.alpha:
            out = out + float(self.alpha) * logu
        if self.gamma:
            if u0 == 1:
                y = np.exp(logy)
                loglogu = np.where(logy < -30.0, logy, np.log(np.log1p(y)))
            else:
                loglogu = np.log(logu)
            out = out + float(self.gamma) * loglogu
        if self.delta:
            with np.errstate(over="ignore"):
                out = out + float(self.delta) * np.exp(logu)
        return out

    def derivative_pieces(self) -> list[tuple[int, "Monomial"]]:
        """d/dt of the term as a signed sum of monomials."""
        out = []
        a, g, d, c, sh = self.alpha, self.gamma, self.delta, self.coeff, self.shift
        if a:
            out.append((1 if a > 0 else -1, Monomial(c * abs(float(a)), a - 1, g, d, sh)))
        if g:
            out.append((1 if g > 0 else -1, Monomial(c * abs(float(g)), a - 1, g - 1, d, sh)))
        if d:
            out.append((1 if d > 0 else -1, Monomial(c * abs(float(d)), a, g, d, sh)))
        return out


@dataclass(frozen=True)
class ConvergenceDecision:
    converges: bool
    dominant_term: Optional[Monomial]
    asym: Asym
    reason: str

    @property
    def tag(self) -> str:
        return "Converges" if self.converges else "Diverges"


LogFn = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class SymFun:
    """Positive function on ``domain``; symbolic sum of monomials or numeric callback."""

    terms: tuple[Monomial, ...]
    domain: Interval
    kind: Kind = Kind.SYMBOLIC
    numeric_eval: Optional[Callable[[float], float]] = None
    asym_fn: Optional[Callable[[float], Optional[Asym]]] = None
    log_fn: Optional[LogFn] = None
    derivative_fn: Optional[Callable[[float], float]] = None
    label: str = ""

    def __post_init__(self):
        if self.kind is Kind.SYMBOLIC:
            if not self.terms:
                raise DomainError("a symbolic function needs at least one term")
            lo = self.domain.lo
            for m in self.terms:
                if m.shift > lo:
                    raise DomainError(f"term {m} is not positive near t={lo}")
                if m.gamma and lo - m.shift < 1:
                    raise DomainError(f"log factor of {m} requires t - {m.shift} >= 1 on the domain")
        elif self.numeric_eval is None:
            raise DomainError("numeric functions need an evaluation callback")

    # -- construction ----------------------------------------------------

    @classmethod
    def monomial(cls, coeff=1.0, alpha=0, gamma=0, delta=0, shift=0.0, domain: Interval | None = None):
        m = Monomial(coeff, alpha, gamma, delta, shift)
        return cls((m,), domain or Interval(max(shift, 0.0)))

    @classmethod
    def numeric(
        cls,
        fn: Callable[[float], float],
        domain: Interval,
        asym_lo: Asym | None = None,
        asym_hi: Asym | None = None,
        derivative: Callable[[float], float] | None = None,
        label: str = "numeric",
    ) -> "SymFun":
        """Wrap a callback; ``asym_lo``/``asym_hi`` declare the endpoint classes."""

        def asym_fn(point: float) -> Optional[Asym]:
            if point == domain.lo and asym_lo is not None:
                return asym_lo
            if point == domain.hi and asym_hi is not None:
                return asym_hi
            return None

        return cls((), domain, Kind.NUMERIC, fn, asym_fn, None, derivative, label)

    @property
    def is_symbolic(self) -> bool:
        return self.kind is Kind.SYMBOLIC

    def with_domain(self, domain: Interval) -> "SymFun":
        return replace(self, domain=domain)

    # -- evaluation ------------------------------------------------------

    def evaluate(self, t: float) -> float:
        if not self.domain.contains(t) or math.isinf(t):
            raise DomainError(f"t={t} outside domain [{self.domain.lo}, {self.domain.hi}]")
        try:
            if self.is_symbolic:
                v = sum(m.value(t) for m in self.terms)
            else:
                v = float(self.numeric_eval(t))
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"cannot evaluate at t={t}: {exc}") from exc
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"value at t={t} is {v}; not a positive finite number")
        return v

    __call__ = evaluate

    def log_values(self, anchor: float, logy) -> np.ndarray:
        """log f(anchor + exp(logy)), vectorised over ``logy``."""
        logy = np.asarray(logy, dtype=float)
        if self.is_symbolic:
            parts = np.stack([m.log_values(anchor, logy) for m in self.terms])
            with np.errstate(invalid="ignore"):
                return np.logaddexp.reduce(parts, axis=0)
        if self.log_fn is not None:
            return self.log_fn(anchor, logy)
        t = anchor + np.exp(logy)
        with np.errstate(divide="ignore", invalid="ignore"):
            try:
                vals = np.asarray(self.numeric_eval(t), dtype=float)
                if vals.shape != t.shape:
                    raise ValueError
            except Exception:
                vals = np.array([self.numeric_eval(float(x)) for x in t.ravel()]).reshape(t.shape)
            return np.log(vals)

    def log_at(self, t) -> np.ndarray:
        """log f(t) for plain points ``t`` strictly inside the domain."""
        t = np.asarray(t, dtype=float)
        lo = self.domain.lo
        with np.errstate(divide="ignore"):
            return self.log_values(lo, np.log(t - lo))

    # -- asymptotics -----------------------------------------------------

    def asym_at(self, point: float) -> Asym:
        """Leading behaviour as t approaches ``point`` from inside the domain."""
        if math.isinf(point):
            if not self.domain.infinite:
                raise DomainError("domain is bounded")
            if self.is_symbolic:
                return dominant(m.asym_at_inf() for m in self.terms)
            a = self.asym_fn(point) if self.asym_fn else None
            if a is None:
                raise MissingAsymptotics(f"{self.label}: no declared asymptotics at +inf")
            return a
        if self.is_symbolic:
            if point == self.domain.hi or point > self.domain.lo:
                return Asym.constant(self.evaluate(point))
            return dominant(m.asym_at(point) for m in self.terms)
        a = self.asym_fn(point) if self.asym_fn else None
        if a is not None:
            return a
        return Asym.constant(self.evaluate(point))

    def dominant_term(self, point: float) -> Optional[Monomial]:
        if not self.is_symbolic:
            return None
        if math.isinf(point):
            return max(self.terms, key=lambda m: m.asym_at_inf().order)
        return max(self.terms, key=lambda m: m.asym_at(point).order)

    def integral_converges(self, at: Endpoint) -> ConvergenceDecision:
        """Exact convergence decision for the integral near one endpoint."""
        if not self.is_symbolic:
            raise MissingAsymptotics("numeric functions are decided by quad.improper_integral")
        point = self.domain.lo if at is Endpoint.LEFT else self.domain.hi
        a = self.asym_at(point)
        finite = not math.isinf(point)
        ok = a.converges(finite)
        if finite:
            reason = f"near t={point}: local power {-a.alpha}; integrable iff > -1"
        else:
            reason = (
                f"at +inf: exp rate {a.delta}, power {a.alpha}, log power {a.gamma}; "
                "integrable iff rate<0, or rate=0 and (power<-1 or power=-1 and log power<-1)"
            )
        return ConvergenceDecision(ok, self.dominant_term(point), a, reason)

    # -- algebra ---------------------------------------------------------

    def power(self, s) -> "SymFun":
        s = as_fraction(s)
        if not self.is_symbolic:
            return _numeric_power(self, s)
        if len(self.terms) == 1:
            return SymFun((self.terms[0].power(s),), self.domain)
        if s.denominator != 1 or s <= 0:
            raise MultiTermPower(f"non-integer power {s} of a {len(self.terms)}-term sum")
        out = self
        for _ in range(int(s) - 1):
            out = out.times(self)
        return out

    def times(self, other: "SymFun") -> "SymFun":
        if self.is_symbolic and other.is_symbolic:
            prods: dict[tuple, float] = {}
            for a in self.terms:
                for b in other.terms:
                    m = a.times(b)
                    key = (m.alpha, m.gamma, m.delta, m.shift)
                    prods[key] = prods.get(key, 0.0) + m.coeff
            terms = tuple(Monomial(c, *k) for k, c in prods.items())
            return SymFun(terms, _meet(self.domain, other.domain))
        return numeric_product(self, other)

    def scaled(self, c: float) -> "SymFun":
        if c <= 0:
            raise DomainError("scale factor must be positive")
        if self.is_symbolic:
            return SymFun(tuple(replace(m, coeff=m.coeff * c) for m in self.terms), self.domain)
        base = self
        lc = math.log(c)

        def asym_fn(point):
            a = base.asym_fn(point) if base.asym_fn else None
            return a.scaled(c) if a is not None else None

        return SymFun(
            (),
            self.domain,
            Kind.NUMERIC,
            lambda t: c * base.numeric_eval(t),
            asym_fn,
            lambda anchor, logy: base.log_values(anchor, logy) + lc,
            (lambda t: c * base.derivative_fn(t)) if base.derivative_fn else None,
            f"{c}*({base.label})",
        )

    def to_numeric(self) -> "SymFun":
        """Same function, routed through the numeric path (asymptotics kept as declarations)."""
        if not self.is_symbolic:
            return self
        base = self

        def asym_fn(point):
            return base.asym_at(point)

        return SymFun(
            (),
            self.domain,
            Kind.NUMERIC,
            base.evaluate,
            asym_fn,
            base.log_values,
            derivative(base),
            base.to_text(),
        )

    # -- text ------------------------------------------------------------

    def to_text(self) -> str:
        if not self.is_symbolic:
            return f"<{self.label}>"
        return " + ".join(_monomial_text(m) for m in self.terms)

    def __repr__(self) -> str:
        return f"SymFun({self.to_text()!r} on [{self.domain.lo}, {self.domain.hi}])"


def _meet(a: Interval, b: Interval) -> Interval:
    return Interval(max(a.lo, b.lo), min(a.hi, b.hi))


def _numeric_power(f: SymFun, s: Fraction) -> SymFun:
    sf = float(s)

    def asym_fn(point):
        try:
            return f.asym_at(point) ** s
        except MissingAsymptotics:
            return None

    return SymFun(
        (),
        f.domain,
        Kind.NUMERIC,
        lambda t: f.evaluate(t) ** sf,
        asym_fn,
        lambda anchor, logy: sf * f.log_values(anchor, logy),
        None,
        f"({f.label or f.to_text()})^{s}",
    )


def power_any(f: SymFun, s) -> SymFun:
    """``f**s``; falls back to a numeric function with exact declared asymptotics."""
    try:
        return f.power(s)
    except MultiTermPower:
        return _numeric_power(f.to_numeric(), as_fraction(s))


def numeric_product(*fs: SymFun) -> SymFun:
    dom = fs[0].domain
    for f in fs[1:]:
        dom = _meet(dom, f.domain)

    def asym_fn(point):
        try:
            out = fs[0].asym_at(point)
            for f in fs[1:]:
                out = out * f.asym_at(point)
            return out
        except MissingAsymptotics:
            return None

    def fn(t):
        v = 1.0
        for f in fs:
            v *= f.evaluate(t)
        return v

    def log_fn(anchor, logy):
        out = fs[0].log_values(anchor, logy)
        for f in fs[1:]:
            out = out + f.log_values(anchor, logy)
        return out

    label = " * ".join(f"({f.label or f.to_text()})" for f in fs)
    return SymFun((), dom, Kind.NUMERIC, fn, asym_fn, log_fn, None, label)


# -- derivatives -------------------------------------------------------------


@dataclass(frozen=True)
class Derivative:
    """f' as a callback plus the asymptotic class of |f'| at +inf.

    ``asym_inf is None`` means f' vanishes identically near +inf.
    """

    fn: Callable[[float], float]
    log_abs: Callable[[np.ndarray], np.ndarray]
    asym_inf: Optional[Asym]

    def __call__(self, t: float) -> float:
        return self.fn(t)


def _derivative_asym_inf(terms: Sequence[Monomial]) -> Optional[Asym]:
    cands = []
    for m in terms:
        a = m.asym_at_inf()
        if m.delta:
            cands.append(Asym(a.coeff * abs(float(m.delta)), a.alpha, a.gamma, a.eta, a.delta))
        elif m.alpha:
            cands.append(Asym(a.coeff * abs(float(m.alpha)), m.alpha - 1, m.gamma))
        elif m.gamma:
            cands.append(Asym(a.coeff * abs(float(m.gamma)), Fraction(-1), m.gamma - 1))
    return dominant(cands) if cands else None


def derivative(f: SymFun) -> Derivative:
    """Derivative of ``f`` (termwise product rule for symbolic functions)."""
    if not f.is_symbolic:
        if f.derivative_fn is None:
            raise MissingDerivative(f"{f.label}: numeric function has no derivative callback")
        d = f.derivative_fn

        def log_abs_num(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(divide="ignore"):
                return np.log(np.abs(np.vectorize(d)(t)))

        return Derivative(d, log_abs_num, None)

    terms = f.terms

    pieces = [pc for m in terms for pc in m.derivative_pieces()]

    def signed_parts(t: np.ndarray):
        if not pieces:
            return np.full(t.shape, -INF), np.zeros(t.shape)
        logs = []
        for _, m in pieces:
            with np.errstate(divide="ignore"):
                logs.append(m.log_values(m.shift, np.log(t - m.shift)))
        logs = np.stack(logs)
        signs = np.array([sg for sg, _ in pieces], dtype=float)[:, None]
        top = np.max(logs, axis=0)
        with np.errstate(invalid="ignore", over="ignore"):
            s = np.sum(np.exp(logs - np.where(np.isfinite(top), top, 0.0)) * signs, axis=0)
        return top, s

    def log_abs(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        top, s = signed_parts(t)
        with np.errstate(divide="ignore"):
            return top + np.log(np.abs(s))

    def fn(t: float) -> float:
        top, s = signed_parts(np.array([float(t)]))
        return float(np.exp(top[0]) * s[0]) if s[0] != 0 else 0.0

    return Derivative(fn, log_abs, _derivative_asym_inf(terms) if f.domain.infinite else None)


def arc_density(f: SymFun) -> SymFun:
    """The factor sqrt(1 + f'^2) as a numeric function with declared asymptotics."""
    d = derivative(f)
    dom = f.domain

    def log_w(t):
        la = d.log_abs(t)
        with np.errstate(over="ignore"):
            small = 0.5 * np.log1p(np.exp(np.minimum(2 * la, 700.0)))
            big = la + 0.5 * np.log1p(np.exp(-2 * la))
        return np.where(la > 20, big, small)

    def asym_fn(point):
        if math.isinf(point):
            a = d.asym_inf
            if a is None or a.trend() < 0:
                return Asym.constant(1.0)
            if a.trend() == 0:
                return Asym.constant(math.sqrt(1 + a.coeff**2))
            return a
        return Asym.constant(math.sqrt(1 + d(point) ** 2))

    def log_fn(anchor, logy):
        return log_w(anchor + np.exp(logy))

    return SymFun(
        (),
        dom,
        Kind.NUMERIC,
        lambda t: math.sqrt(1 + d(t) ** 2),
        asym_fn,
        log_fn,
        None,
        f"sqrt(1+({f.to_text()})'^2)",
    )


# -- grammar -----------------------------------------------------------------

_NUM = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?(?:/\d+)?"
_VAR = r"(?:t|\(t(?P<sg>[-+])(?P<sh>" + r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?" + r")\))"
_EXP = r"(?:\^(?P<e>" + _NUM + r"|\(" + _NUM + r"\)))?"

_RE_NUM = re.compile(r"^" + _NUM + r"$")
_RE_POW = re.compile(r"^" + _VAR + _EXP + r"$")
_RE_LOG = re.compile(
    r"^(?:ln(?:t|\((?P<arg>t(?:[-+][^()]+)?)\))|\(ln(?:t|\((?P<arg2>t(?:[-+][^()]+)?)\))\))" + _EXP + r"$"
)
_RE_EXP = re.compile(r"^exp\((?P<body>.*)\)$")


def _num(s: str) -> Fraction:
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    return Fraction(s)


def _shift_of(arg: Optional[str]) -> float:
    if not arg or arg == "t":
        return 0.0
    m = re.fullmatch(r"t([-+])(" + r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?" + r")", arg)
    if not m:
        raise GrammarError(f"bad argument {arg!r}")
    v = float(m.group(2))
    return v if m.group(1) == "-" else -v


def _split_top(s: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            # '+' right after '^', 'e' or '(' belongs to a number
            prev = s[i - 1] if i else ""
            if sep == "+" and prev in "^eE(":
                cur.append(ch)
                continue
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def _parse_term(text: str) -> Monomial:
    coeff = 1.0
    alpha = gamma = delta = Fraction(0)
    shifts: set[float] = set()
    exp_parts: list[tuple[Fraction, float]] = []
    for raw in _split_top(text, "*"):
        fac = raw.strip()
        if not fac:
            raise GrammarError(f"empty factor in {text!r}")
        if _RE_NUM.match(fac):
            coeff *= float(Fraction(fac))
            continue
        m = _RE_POW.match(fac)
        if m:
            sh = 0.0
            if m.group("sg"):
                sh = float(m.group("sh")) * (1 if m.group("sg") == "-" else -1)
            shifts.add(sh)
            alpha += _num(m.group("e")) if m.group("e") else 1
            continue
        m = _RE_LOG.match(fac)
        if m:
            shifts.add(_shift_of(m.group("arg") or m.group("arg2")))
            gamma += _num(m.group("e")) if m.group("e") else 1
            continue
        m = _RE_EXP.match(fac)
        if m:
            body = m.group("body")
            bm = re.fullmatch(r"(?:(" + _NUM + r")\*)?(-)?(t|\(t[-+][^()]+\))", body)
            if not bm:
                raise GrammarError(f"exp argument must be d*t or d*(t-c), got {body!r}")
            d = Fraction(bm.group(1)) if bm.group(1) else Fraction(1)
            if bm.group(2):
                d = -d
            arg = bm.group(3)
            exp_parts.append((d, _shift_of(arg[1:-1] if arg.startswith("(") else arg)))
            continue
        raise GrammarError(f"cannot parse factor {fac!r}")
    if len(shifts) > 1:
        raise GrammarError(f"factors of {text!r} use different shifts {sorted(shifts)}")
    shift = shifts.pop() if shifts else (exp_parts[0][1] if exp_parts else 0.0)
    for d, s in exp_parts:
        delta += d
        # exp(d*(t - s)) = exp(d*(u + shift - s))
        coeff *= math.exp(float(d) * (shift - s))
    if coeff <= 0:
        raise GrammarError(f"coefficient of {text!r} must be positive")
    return Monomial(coeff, alpha, gamma, delta, shift)


def parse_symfun(text: str, domain: Interval | None = None) -> SymFun:
    """Parse ``c * t^a * (ln t)^g * exp(d*t) + ...``.

    Factors: a number; ``t`` or ``(t-c)``/``(t+c)`` with optional ``^a``;
    ``ln t``/``ln(t-c)`` or ``(ln t)^g``; ``exp(d*t)``/``exp(-t)``/``exp(d*(t-c))``.
    Exponents may be written ``^-1.5``, ``^(1/2)``.  Terms are joined by ``+``.
    """
    s = re.sub(r"\s+", "", text)
    if not s:
        raise GrammarError("empty function")
    terms = tuple(_parse_term(part) for part in _split_top(s, "+"))
    merged: dict[tuple, float] = {}
    for m in terms:
        key = (m.alpha, m.gamma, m.delta, m.shift)
        merged[key] = merged.get(key, 0.0) + m.coeff
    terms = tuple(Monomial(c, *k) for k, c in merged.items())
    if domain is None:
        domain = Interval(max(m.shift + (1 if m.gamma else 0) for m in terms))
    return SymFun(terms, domain)


def _frac_text(x: Fraction) -> str:
    return str(x) if x.denominator == 1 and x >= 0 else f"({x})"


def _monomial_text(m: Monomial) -> str:
    if m.shift == 0:
        var = "t"
    else:
        var = f"(t-{m.shift!r})" if m.shift > 0 else f"(t+{-m.shift!r})"
    parts = [repr(m.coeff)]
    if m.alpha:
        parts.append(var if m.alpha == 1 else f"{var}^{_frac_text(m.alpha)}")
    if m.gamma:
        arg = "t" if m.shift == 0 else var[1:-1]
        parts.append(f"(ln({arg}))^{_frac_text(m.gamma)}")
    if m.delta:
        arg = "t" if m.shift == 0 else var
        parts.append(f"exp({m.delta}*{arg})")
    return " * ".join(parts)
