"""Which Liouville-type statements apply to a parameter triple (n, alpha, q).

Boundaries are compared exactly; there is no epsilon. Pass exact values
(e.g. q computed with :func:`critical_exponent`) when probing the critical
case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

TAGS = ("T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8")


class UndefinedExponent(ValueError):
    pass


def critical_exponent(n: int, alpha: float) -> float:
    """q* = n(alpha - 1)/(n - alpha), defined for n > alpha."""
    if not n > alpha:
        raise UndefinedExponent(f"critical exponent needs n > alpha (n={n}, alpha={alpha})")
    return n * (alpha - 1.0) / (n - alpha)


@dataclass(frozen=True)
class RegimeQuery:
    n: int
    alpha: float
    q: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if not self.alpha > 1.0:
            raise ValueError("alpha must exceed 1")
        if not self.q > 0.0:
            raise ValueError("q must be positive")


@dataclass
class RegimeDecision:
    query: RegimeQuery
    applicable: list
    critical_q: Optional[float]
    notes: dict = field(default_factory=dict)
    uncovered: bool = False

    def to_dict(self) -> dict:
        return {"n": self.query.n, "alpha": self.query.alpha, "q": self.query.q,
                "applicable": list(self.applicable), "critical_q": self.critical_q,
                "notes": dict(self.notes), "uncovered": self.uncovered}


def classify(query: RegimeQuery) -> RegimeDecision:
    n, a, q = query.n, query.alpha, query.q
    qs = critical_exponent(n, a) if n > a else None
    alpha_ok = 1.0 < a <= 2.0
    base = n >= 2 and alpha_ok and qs is not None
    notes = {}

    if n == 1 and alpha_ok:
        notes["T1"] = "n = 1, 1 < alpha <= 2: ordered solutions coincide"
    if n == 2 and a == 2.0:
        notes["T2"] = "n = 2, alpha = 2: ordered solutions coincide"
    if base and q >= 1.0 and a - 1.0 < q <= qs:
        notes["T3"] = f"alpha-1 < q <= q* = {qs:g}, q >= 1: ordered solutions coincide"
    if base and q >= 1.0 and q > qs:
        notes["T4"] = f"q > q* = {qs:g}, q >= 1: no ordered pair with divergent growth of (u-v)^(q-nu)"
        notes["T5"] = "corollary of T4: u - v cannot dominate the example profile raised by delta > 0"
        notes["T6"] = "corollary of T4: u - v cannot be bounded below by a positive constant"
    if base and 0.0 < q <= 1.0:
        notes["T7"] = "0 < q <= 1: no ordered pair with divergent weighted growth"
    if n >= 3 and a == 2.0 and q == 1.0:
        notes["T8"] = "n >= 3, alpha = 2, q = 1: no pair with u > v"

    applicable = [t for t in TAGS if t in notes]
    uncovered = not applicable
    if uncovered:
        notes["gap"] = "no statement covers this triple"
    return RegimeDecision(query, applicable, qs, notes, uncovered)
