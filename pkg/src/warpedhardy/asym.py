"""Leading-order asymptotics of positive functions near an endpoint.

Everything is written in an endpoint coordinate ``x -> +inf``: ``x = t`` at an
infinite endpoint and ``x = 1/|t - a|`` at a finite endpoint ``a``.  The class
is closed under products, real powers and integration (up to one extra
``ln ln`` factor), which is all the Hardy-constant analysis needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import WarpedHardyError

ZERO = Fraction(0)
ONE = Fraction(1)


class AsymptoticsUndecided(WarpedHardyError):
    """The integral leaves the supported asymptotic class (``ln ln ln`` terms)."""


@dataclass(frozen=True)
class Asym:
    """``coeff * x**alpha * (ln x)**gamma * (ln ln x)**eta * exp(delta * x)``."""

    coeff: float
    alpha: Fraction = ZERO
    gamma: Fraction = ZERO
    eta: Fraction = ZERO
    delta: Fraction = ZERO

    def __post_init__(self):
        if not (self.coeff > 0 and math.isfinite(self.coeff)):
            raise ValueError(f"asymptotic coefficient must be positive and finite, got {self.coeff}")

    @classmethod
    def constant(cls, c: float) -> "Asym":
        return cls(float(c))

    @property
    def order(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.delta, self.alpha, self.gamma, self.eta)

    def __mul__(self, other: "Asym") -> "Asym":
        return Asym(
            self.coeff * other.coeff,
            self.alpha + other.alpha,
            self.gamma + other.gamma,
            self.eta + other.eta,
            self.delta + other.delta,
        )

    def __pow__(self, s) -> "Asym":
        s = Fraction(s)
        return Asym(self.coeff ** float(s), self.alpha * s, self.gamma * s, self.eta * s, self.delta * s)

    def scaled(self, c: float) -> "Asym":
        return Asym(self.coeff * c, self.alpha, self.gamma, self.eta, self.delta)

    def trend(self) -> int:
        """+1 if the function blows up, 0 if it has a positive limit, -1 if it vanishes."""
        for e in self.order:
            if e != 0:
                return 1 if e > 0 else -1
        return 0

    def limit(self) -> float:
        t = self.trend()
        if t > 0:
            return math.inf
        return self.coeff if t == 0 else 0.0

    def integrate(self, finite_endpoint: bool) -> tuple[bool, "Asym"]:
        """Integrate towards the endpoint.

        Returns ``(converges, A)``.  If the integral converges at the endpoint,
        ``A`` describes the remainder between ``x`` and the endpoint (it tends
        to zero); otherwise ``A`` describes the growing partial integral.
        ``finite_endpoint`` accounts for ``dt = dx / x**2``.
        """
        g = self * Asym(1.0, Fraction(-2)) if finite_endpoint else self
        if g.delta != 0:
            return g.delta < 0, Asym(g.coeff / abs(float(g.delta)), g.alpha, g.gamma, g.eta, g.delta)
        if g.alpha != -1:
            a1 = g.alpha + 1
            return a1 < 0, Asym(g.coeff / abs(float(a1)), a1, g.gamma, g.eta)
        if g.gamma != -1:
            c1 = g.gamma + 1
            return c1 < 0, Asym(g.coeff / abs(float(c1)), ZERO, c1, g.eta)
        if g.eta != -1:
            e1 = g.eta + 1
            return e1 < 0, Asym(g.coeff / abs(float(e1)), ZERO, ZERO, e1)
        raise AsymptoticsUndecided("integral of x^-1 (ln x)^-1 (ln ln x)^-1 leaves the asymptotic class")

    def converges(self, finite_endpoint: bool) -> bool:
        return self.integrate(finite_endpoint)[0]

    def as_dict(self) -> dict:
        return {
            "coeff": self.coeff,
            "alpha": str(self.alpha),
            "gamma": str(self.gamma),
            "eta": str(self.eta),
            "delta": str(self.delta),
        }


def dominant(items: Iterable[Asym]) -> Asym:
    """Leading behaviour of a sum of positive functions."""
    items = list(items)
    if not items:
        raise ValueError("empty sum")
    top = max(a.order for a in items)
    c = sum(a.coeff for a in items if a.order == top)
    d, al, ga, et = top
    return Asym(c, al, ga, et, d)
