"""Growth functionals over balls |x| < R and their large-R classification.

Two families are computed:

* ``T4``: R^{-n + alpha(q-nu)/(q-alpha+1)} int_{|x|<R} (u-v)^{q-nu} dx
* ``T7``: R^{alpha-n} int_{|x|<R, u != v} (|u|^{q-1}u - |v|^{q-1}v)(u-v)^{1-alpha} dx

The limsup as R -> infinity is approximated by the slope of log F against
log R over the last two decades of a log-spaced grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .quadrature import integrate_panels, panel_breakpoints, signed_power_difference, sphere_area
from .radial import SolutionPair

GAP_FLOOR = 1e-30

SLOPE_DIVERGE = 0.1
SLOPE_FLAT = 0.05
SPREAD_FLAT = 0.05


@dataclass
class GrowthFunctionalSpec:
    kind: str
    n: int
    alpha: float
    q: float
    nu: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("T4", "T7"):
            raise ValueError(f"unknown functional kind {self.kind!r}")
        if self.kind == "T4":
            if self.nu is None:
                self.nu = self.alpha - 1.0
            if not 0.0 < self.nu <= self.alpha - 1.0:
                raise ValueError("nu must lie in (0, alpha - 1]")
            if not (self.q - self.nu > 0 and self.q - self.alpha + 1.0 > 0):
                raise ValueError("T4 needs q - nu > 0 and q - alpha + 1 > 0")

    @property
    def exponent(self) -> float:
        """Power of R multiplying the integral."""
        if self.kind == "T4":
            return -self.n + self.alpha * (self.q - self.nu) / (self.q - self.alpha + 1.0)
        return self.alpha - self.n

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "n": self.n, "alpha": self.alpha, "q": self.q}
        if self.kind == "T4":
            d["nu"] = self.nu
        return d


def _ball_integral(pair: SolutionPair, integrand, R: float, per_decade: int = 8,
                   nodes: int = 16) -> float:
    n = pair.n
    area = sphere_area(n)
    breaks = panel_breakpoints(R, per_decade, r_lo=min(1e-3, R * 1e-6), extra=(1.0,))
    val, _ = integrate_panels(lambda r: integrand(r) * r ** (n - 1), breaks, nodes)
    return area * val


def _gap_power(gap, s):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(gap > GAP_FLOOR, np.exp(s * np.log(np.where(gap > GAP_FLOOR, gap, 1.0))), 0.0)


def t4_integrand(pair: SolutionPair, q: float, nu: float):
    return lambda r: _gap_power(pair.gap.value(r), q - nu)


def t7_integrand(pair: SolutionPair, alpha: float, q: float):
    def f(r):
        gap = pair.gap.value(r)
        diff = signed_power_difference(pair.v.value(r), gap, q)
        return np.where(gap > GAP_FLOOR, diff * _gap_power(gap, 1.0 - alpha), 0.0)
    return f


def growth_T4(pair: SolutionPair, spec: GrowthFunctionalSpec, R: float) -> float:
    if spec.kind != "T4":
        raise ValueError("growth_T4 needs a T4 spec")
    raw = _ball_integral(pair, t4_integrand(pair, spec.q, spec.nu), R)
    out = R ** spec.exponent * raw
    return out if math.isfinite(out) else float("nan")


def growth_T7(pair: SolutionPair, spec: GrowthFunctionalSpec, R: float) -> float:
    if spec.kind != "T7":
        raise ValueError("growth_T7 needs a T7 spec")
    raw = _ball_integral(pair, t7_integrand(pair, spec.alpha, spec.q), R)
    out = R ** spec.exponent * raw
    return out if math.isfinite(out) else float("nan")


def growth_remark_T4(pair: SolutionPair, n: int, alpha: float, q: float, R: float) -> float:
    """R^{alpha-n} int (u-v)^{q-alpha+1} dx, the nu = alpha - 1 form."""
    f = lambda r: _gap_power(pair.gap.value(r), q - alpha + 1.0)
    return R ** (alpha - n) * _ball_integral(pair, f, R)


def growth_remark_T7(pair: SolutionPair, n: int, alpha: float, R: float) -> float:
    """R^{alpha-n} int_{u != v} (u-v)^{2-alpha} dx, the q = 1 form."""
    f = lambda r: _gap_power(pair.gap.value(r), 2.0 - alpha)
    return R ** (alpha - n) * _ball_integral(pair, f, R)


def growth_value(pair: SolutionPair, spec: GrowthFunctionalSpec, R: float) -> float:
    return growth_T4(pair, spec, R) if spec.kind == "T4" else growth_T7(pair, spec, R)


def growth_grid(lo: float = 1e2, hi: float = 1e5, per_decade: int = 16) -> np.ndarray:
    k = int(round(math.log10(hi / lo) * per_decade))
    return np.geomspace(lo, hi, k + 1)


def raw_integral(pair: SolutionPair, spec: GrowthFunctionalSpec, R: float) -> float:
    """The ball integral without the R power prefactor."""
    if spec.kind == "T4":
        return _ball_integral(pair, t4_integrand(pair, spec.q, spec.nu), R)
    return _ball_integral(pair, t7_integrand(pair, spec.alpha, spec.q), R)


@dataclass
class GrowthSeries:
    points: list
    slope: float
    classification: str
    limit_estimate: Optional[float] = None
    spread: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"slope": self.slope, "classification": self.classification,
                "limit_estimate": self.limit_estimate, "spread": self.spread, **self.meta}


def limsup_estimate(series) -> GrowthSeries:
    """Classify F(R) from its tail.

    The slope s of log F against log R is fitted over the last two decades.
    Rules: s > 0.1 diverges; s < -0.1 tends_to_zero; |s| <= 0.05 with a
    last-decade relative spread (max - min) / mean <= 5% is a positive
    constant, whose estimate is the last-decade mean; anything else is
    indeterminate. Fewer than two decades or fewer than 8 points per decade
    is indeterminate. An identically zero series tends to zero.
    """
    pts = sorted((float(R), float(F)) for R, F in series)
    if not pts:
        return GrowthSeries([], float("nan"), "indeterminate")
    R = np.array([p[0] for p in pts])
    F = np.array([p[1] for p in pts])
    decades = math.log10(R[-1] / R[0]) if R[0] > 0 else 0.0
    if decades < 2.0 - 1e-9 or len(R) < 8 * decades:
        return GrowthSeries(pts, float("nan"), "indeterminate")
    tail = R >= R[-1] / 100.0 * (1.0 - 1e-12)
    last = R >= R[-1] / 10.0 * (1.0 - 1e-12)
    if np.all(F[tail] == 0.0):
        return GrowthSeries(pts, float("-inf"), "tends_to_zero", spread=0.0)
    if not np.all(np.isfinite(F[tail])) or np.any(F[tail] <= 0.0):
        return GrowthSeries(pts, float("nan"), "indeterminate")
    slope = float(np.polyfit(np.log(R[tail]), np.log(F[tail]), 1)[0])
    fl = F[last]
    spread = float((fl.max() - fl.min()) / fl.mean())
    if slope > SLOPE_DIVERGE:
        cls = "diverges"
    elif slope < -SLOPE_DIVERGE:
        cls = "tends_to_zero"
    elif abs(slope) <= SLOPE_FLAT and spread <= SPREAD_FLAT:
        return GrowthSeries(pts, slope, "positive_constant", float(fl.mean()), spread)
    else:
        cls = "indeterminate"
    return GrowthSeries(pts, slope, cls, None, spread)


def growth_series(pair: SolutionPair, spec: GrowthFunctionalSpec, radii=None) -> GrowthSeries:
    radii = growth_grid() if radii is None else radii
    pts = [(float(R), growth_value(pair, spec, float(R))) for R in radii]
    out = limsup_estimate(pts)
    out.meta.update(spec.to_dict())
    return out
