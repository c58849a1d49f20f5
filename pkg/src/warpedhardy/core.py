"""Shared value types: exponents, intervals, extended values, verdicts, tolerances."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

INF = math.inf


class WarpedHardyError(Exception):
    """Base class for every error raised by this package."""


class OutOfScope(WarpedHardyError):
    pass


class DomainError(WarpedHardyError):
    pass


class TolFailure(WarpedHardyError):
    """Adaptive quadrature could not reach the requested tolerance."""

    def __init__(self, message: str, evidence: Mapping[str, Any] | None = None):
        super().__init__(message)
        self.evidence = dict(evidence or {})


def as_fraction(x: float | int | str | Fraction) -> Fraction:
    """Exact rational for an exponent given as float, int, string or Fraction.

    Floats are snapped to the nearest fraction with denominator <= 10**6 so
    that 4/3 typed as 1.3333333333333333 becomes exactly 4/3.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if not math.isfinite(x):
        raise OutOfScope(f"exponent must be finite, got {x!r}")
    return Fraction(x).limit_denominator(10**6)


@dataclass(frozen=True)
class Exponents:
    p: Fraction
    q: Fraction

    @property
    def p_conj(self) -> Fraction:
        return self.p / (self.p - 1)

    @property
    def q_conj(self) -> Fraction:
        return self.q / (self.q - 1)

    @property
    def sup_form(self) -> bool:
        return self.p >= self.q

    def as_dict(self) -> dict[str, float]:
        return {
            "p": float(self.p),
            "q": float(self.q),
            "p_conj": float(self.p_conj),
            "q_conj": float(self.q_conj),
        }


def make_exponents(p, q) -> Exponents:
    """Validate ``1 < p, q < inf`` and return the pair with its conjugates."""
    for name, v in (("p", p), ("q", q)):
        if isinstance(v, float) and not math.isfinite(v):
            raise OutOfScope(f"{name}={v} is infinite; the ess-sup variant is not supported")
    pf, qf = as_fraction(p), as_fraction(q)
    if pf <= 1 or qf <= 1:
        raise OutOfScope(f"need 1 < p, q < inf, got p={p}, q={q}")
    return Exponents(pf, qf)


class Orientation(enum.Enum):
    FORWARD = "forward"
    REVERSED = "reversed"


@dataclass(frozen=True)
class Interval:
    """Half-line or segment ``[lo, hi)`` with finite ``lo``.

    ``REVERSED`` orientation means the Hardy constant is taken from ``hi``
    towards ``lo``.
    """

    lo: float
    hi: float = INF
    orientation: Orientation = Orientation.FORWARD

    def __post_init__(self):
        if not math.isfinite(self.lo):
            raise DomainError("interval lower endpoint must be finite")
        if math.isnan(self.hi) or not self.lo < self.hi:
            raise DomainError(f"need lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def infinite(self) -> bool:
        return math.isinf(self.hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def reversed(self) -> "Interval":
        o = Orientation.REVERSED if self.orientation is Orientation.FORWARD else Orientation.FORWARD
        return Interval(self.lo, self.hi, o)

    def forward(self) -> "Interval":
        return Interval(self.lo, self.hi, Orientation.FORWARD)

    def contains(self, t: float) -> bool:
        return self.lo <= t <= self.hi


class Tag(enum.Enum):
    FINITE = "Finite"
    DIVERGENT = "Divergent"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ExtendedValue:
    tag: Tag
    value: float | None = None
    error_bound: float | None = None
    note: str | None = None

    def __post_init__(self):
        if self.tag is Tag.FINITE:
            if self.value is None or self.error_bound is None:
                raise ValueError("Finite values need value and error_bound")
            if self.value < 0 or self.error_bound < 0:
                raise ValueError("Finite values are nonnegative")

    @classmethod
    def finite(cls, value: float, error_bound: float = 0.0) -> "ExtendedValue":
        return cls(Tag.FINITE, float(value), float(error_bound))

    @classmethod
    def divergent(cls, note: str | None = None) -> "ExtendedValue":
        return cls(Tag.DIVERGENT, note=note)

    @classmethod
    def unknown(cls, note: str) -> "ExtendedValue":
        return cls(Tag.UNKNOWN, note=note)

    @property
    def is_finite(self) -> bool:
        return self.tag is Tag.FINITE

    @property
    def is_divergent(self) -> bool:
        return self.tag is Tag.DIVERGENT

    def as_float(self) -> float:
        if self.tag is Tag.FINITE:
            return self.value
        return INF if self.tag is Tag.DIVERGENT else math.nan

    def as_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"tag": self.tag.value}
        if self.tag is Tag.FINITE:
            d["value"] = self.value
            d["error_bound"] = self.error_bound
        if self.note:
            d["note"] = self.note
        return d


class Status(enum.Enum):
    TRIVIAL = "Trivial"
    NONTRIVIAL = "Nontrivial"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    status: Status
    rule: str
    evidence: Mapping[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {"status": self.status.value, "rule": self.rule, "evidence": dict(self.evidence)}


@dataclass(frozen=True)
class Tolerances:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_doublings: int = 40
    divergence_growth: float = 1e6
    sup_grid_points: int = 256

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_doublings", "divergence_growth", "sup_grid_points"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be strictly positive")
        if self.max_doublings < 8:
            raise ValueError("max_doublings must be at least 8")

    def accepts(self, value: float, error: float) -> bool:
        return error <= max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_TOL = Tolerances()


def sphere_volume(n: int) -> float:
    """Surface measure of the unit n-sphere in R^(n+1)."""
    if n < 1:
        raise DomainError("sphere dimension must be >= 1")
    h = (n + 1) / 2
    return 2.0 * math.pi**h / math.gamma(h)
