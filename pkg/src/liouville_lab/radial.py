"""Radial solution families, radial p-Laplacian calculus and the search for
an admissible amplitude c.

All profiles are functions of r = |x|. The example families are built from
the power profile ``k * (1 + r^beta)^e`` with ``beta = alpha / (alpha - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .quadrature import signed_power, signed_power_difference

FAMILIES = ("example1", "example23", "example4")


class RegimeError(ValueError):
    """Parameters fall outside the hypotheses of the requested example."""


class RadialProfile:
    """A radial function with exact first (and optionally second) derivative."""

    description = "radial profile"

    def value(self, r):
        raise NotImplementedError

    def deriv(self, r):
        raise NotImplementedError

    def deriv2(self, r):
        return None

    @property
    def has_deriv2(self) -> bool:
        return False

    def __call__(self, r):
        return self.value(r)


@dataclass(frozen=True)
class ConstantProfile(RadialProfile):
    k: float = 0.0

    @property
    def description(self):
        return f"constant {self.k:g}"

    @property
    def has_deriv2(self) -> bool:
        return True

    def value(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.k)

    def deriv(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def deriv2(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))


@dataclass(frozen=True)
class PowerProfile(RadialProfile):
    """k * (1 + r^beta)^e, evaluated in log form so that large r and large
    beta neither overflow nor lose the leading power."""

    k: float
    e: float
    beta: float

    @property
    def description(self):
        return f"{self.k:g}*(1+r^{self.beta:g})^{self.e:g}"

    @property
    def has_deriv2(self) -> bool:
        return True

    def _log1p_s(self, r):
        # log(1 + r^beta) and s/(1+s) for s = r^beta
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            big = r > 1.0
            lr = np.log(np.where(r > 0, r, 1.0))
            inv = np.exp(-self.beta * np.where(big, lr, 0.0))
            small_s = np.where(r > 0, np.exp(self.beta * np.where(big, 0.0, lr)), 0.0)
            l1p = np.where(big, self.beta * lr + np.log1p(inv), np.log1p(small_s))
            frac = np.where(big, 1.0 / (1.0 + inv), small_s / (1.0 + small_s))
        return l1p, frac

    def _rpow(self, r, a):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(r > 0, np.abs(r) ** a, 1.0 if a == 0 else 0.0)

    def value(self, r):
        l1p, _ = self._log1p_s(r)
        return self.k * np.exp(self.e * l1p)

    def deriv(self, r):
        l1p, _ = self._log1p_s(r)
        return self.k * self.e * self.beta * self._rpow(r, self.beta - 1.0) * np.exp((self.e - 1.0) * l1p)

    def deriv2(self, r):
        l1p, frac = self._log1p_s(r)
        b, e = self.beta, self.e
        bracket = (b - 1.0) + (e - 1.0) * b * frac
        return self.k * e * b * self._rpow(r, b - 2.0) * np.exp((e - 1.0) * l1p) * bracket


@dataclass(frozen=True)
class SumProfile(RadialProfile):
    a: RadialProfile
    b: RadialProfile

    @property
    def description(self):
        return f"({self.a.description}) + ({self.b.description})"

    @property
    def has_deriv2(self) -> bool:
        return self.a.has_deriv2 and self.b.has_deriv2

    def value(self, r):
        return self.a.value(r) + self.b.value(r)

    def deriv(self, r):
        return self.a.deriv(r) + self.b.deriv(r)

    def deriv2(self, r):
        return self.a.deriv2(r) + self.b.deriv2(r)


@dataclass(frozen=True)
class DifferenceProfile(RadialProfile):
    a: RadialProfile
    b: RadialProfile

    @property
    def description(self):
        return f"({self.a.description}) - ({self.b.description})"

    @property
    def has_deriv2(self) -> bool:
        return self.a.has_deriv2 and self.b.has_deriv2

    def value(self, r):
        return self.a.value(r) - self.b.value(r)

    def deriv(self, r):
        return self.a.deriv(r) - self.b.deriv(r)

    def deriv2(self, r):
        return self.a.deriv2(r) - self.b.deriv2(r)


@dataclass(frozen=True)
class FunctionProfile(RadialProfile):
    """Profile from plain callables; no second derivative, so the radial
    operator falls back to finite differences."""

    f: object
    df: object
    description: str = "user profile"

    def value(self, r):
        return np.asarray(self.f(np.asarray(r, dtype=float)), dtype=float)

    def deriv(self, r):
        return np.asarray(self.df(np.asarray(r, dtype=float)), dtype=float)


@dataclass
class ExampleParams:
    n: int
    alpha: float
    q: float
    c: float = 1.0
    mu: Optional[float] = None
    lam: Optional[float] = None
    family: str = "example1"

    @property
    def beta(self) -> float:
        return self.alpha / (self.alpha - 1.0)

    @property
    def critical_q(self) -> Optional[float]:
        return self.n * (self.alpha - 1.0) / (self.n - self.alpha) if self.n > self.alpha else None

    @property
    def sharp_lambda(self) -> float:
        return (self.alpha - 1.0) / (self.alpha - 1.0 - self.q)

    def violations(self) -> list[str]:
        """Hypotheses of the chosen example that fail, as readable strings."""
        n, a, q = self.n, self.alpha, self.q
        out = []
        if self.family not in FAMILIES:
            return [f"unknown family {self.family!r}"]
        if not n >= 2:
            out.append("n >= 2")
        if not 1.0 < a <= 2.0:
            out.append("2 >= alpha > 1")
        if not n > a:
            out.append("n > alpha")
            return out
        qs = self.critical_q
        if self.family == "example1":
            if not q > qs:
                out.append(f"q > n(alpha-1)/(n-alpha) = {qs:g}")
            if not q >= 1.0:
                out.append("q >= 1")
        elif self.family == "example4":
            if not q > qs:
                out.append(f"q > n(alpha-1)/(n-alpha) = {qs:g}")
            if not 1.0 >= q > 0.0:
                out.append("1 >= q > 0")
        else:
            if not a - 1.0 > q > 0.0:
                out.append("alpha - 1 > q > 0")
                return out
            mu_max = (n - a) / n
            if self.mu is None or not 0.0 < self.mu < mu_max:
                out.append(f"0 < mu < (n-alpha)/n = {mu_max:g}")
            if self.lam is None or not self.lam >= self.sharp_lambda:
                out.append(f"lambda >= (alpha-1)/(alpha-1-q) = {self.sharp_lambda:g}")
        if not self.c > 0:
            out.append("c > 0")
        return out

    def validate(self) -> None:
        bad = self.violations()
        if bad:
            raise RegimeError(f"{self.family} hypotheses violated: " + "; ".join(bad))

    def to_dict(self) -> dict:
        d = {"family": self.family, "n": self.n, "alpha": self.alpha, "q": self.q, "c": self.c}
        if self.mu is not None:
            d["mu"] = self.mu
        if self.lam is not None:
            d["lambda"] = self.lam
        return d


@dataclass
class SolutionPair:
    """Candidate pair (u, v); ``gap`` is u - v kept as its own profile so that
    it stays accurate where u and v are huge and nearly equal."""

    u: RadialProfile
    v: RadialProfile
    n: int
    alpha: float
    q: float
    gap: Optional[RadialProfile] = None
    params: Optional[ExampleParams] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.gap is None:
            self.gap = DifferenceProfile(self.u, self.v)

    def is_ordered(self, r) -> bool:
        return bool(np.all(self.gap.value(r) >= 0.0))


def build_example1(params: ExampleParams, check_regime: bool = True) -> SolutionPair:
    """u = c (1 + r^beta)^((1-alpha)/(q-alpha+1)), v = 0.

    Also used for the fourth example, which reuses these formulas in the
    range 1 >= q > n(alpha-1)/(n-alpha).
    """
    if params.family not in ("example1", "example4"):
        raise RegimeError(f"build_example1 needs family example1/example4, got {params.family}")
    if check_regime:
        params.validate()
    a, q = params.alpha, params.q
    u = PowerProfile(params.c, (1.0 - a) / (q - a + 1.0), params.beta)
    return SolutionPair(u=u, v=ConstantProfile(0.0), gap=u, n=params.n, alpha=a, q=q, params=params)


def build_example23(params: ExampleParams, check_regime: bool = True) -> SolutionPair:
    """v = c (1 + r^beta)^lambda, u = v + (1 + r^beta)^(-mu)."""
    if params.family != "example23":
        raise RegimeError(f"build_example23 needs family example23, got {params.family}")
    if params.lam is None:
        params.lam = params.sharp_lambda
    if check_regime:
        params.validate()
    v = PowerProfile(params.c, params.lam, params.beta)
    w = PowerProfile(1.0, -params.mu, params.beta)
    return SolutionPair(u=SumProfile(v, w), v=v, gap=w, n=params.n, alpha=params.alpha,
                        q=params.q, params=params)


def build_pair(params: ExampleParams, check_regime: bool = True) -> SolutionPair:
    if params.family == "example23":
        return build_example23(params, check_regime)
    return build_example1(params, check_regime)


def constant_gap_pair(n: int, alpha: float, q: float, gap: float = 1.0, base: float = 0.0) -> SolutionPair:
    """u = base + gap, v = base (constants)."""
    return SolutionPair(u=ConstantProfile(base + gap), v=ConstantProfile(base),
                        gap=ConstantProfile(gap), n=n, alpha=alpha, q=q)


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("radial operator is evaluated at r > 0 only")
    return r


def _fd_step(r):
    h = np.maximum(1e-6, 1e-6 * r)
    return np.minimum(h, 0.25 * r)


def _richardson(g, r):
    """Central difference of g at r with one Richardson level."""
    h = _fd_step(r)
    d1 = (g(r + h) - g(r - h)) / (2.0 * h)
    d2 = (g(r + 0.5 * h) - g(r - 0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0


def radial_p_laplacian(profile: RadialProfile, p: float, n: int, r, method: str = "auto"):
    """r^{1-n} d/dr ( r^{n-1} |u'|^{p-2} u' ) at r > 0.

    ``method='exact'`` uses the registered second derivative,
    |u'|^{p-2} ((p-1) u'' + (n-1) u'/r); ``'fd'`` differentiates the radial
    flux numerically; ``'auto'`` picks exact when available. Points where the
    exact formula is singular (u' = 0 with p < 2) come back as nan.
    """
    r = _check_r(r)
    if method == "auto":
        method = "exact" if profile.has_deriv2 else "fd"
    if method == "exact":
        d1 = profile.deriv(r)
        d2 = profile.deriv2(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            lead = np.abs(d1) ** (p - 2.0) if p != 2.0 else np.ones_like(d1)
            return lead * ((p - 1.0) * d2 + (n - 1.0) * d1 / r)
    if method != "fd":
        raise ValueError(f"unknown method {method!r}")

    def flux(s):
        return s ** (n - 1) * signed_power(profile.deriv(s), p - 1.0)

    return r ** (1.0 - n) * _richardson(flux, r)


def radial_operator_difference(pair: SolutionPair, p: float, r):
    """Delta_p u - Delta_p v computed from v and the gap without cancellation."""
    r = _check_r(r)
    n = pair.n
    if isinstance(pair.v, ConstantProfile):
        return radial_p_laplacian(pair.gap, p, n, r)
    g = pair.gap
    if not (pair.v.has_deriv2 and g.has_deriv2):
        def fdiff(s):
            return s ** (n - 1) * signed_power_difference(pair.v.deriv(s), g.deriv(s), p - 1.0)
        return r ** (1.0 - n) * _richardson(fdiff, r)
    vd, vdd = pair.v.deriv(r), pair.v.deriv2(r)
    gd, gdd = g.deriv(r), g.deriv2(r)
    if p == 2.0:
        return gdd + (n - 1.0) * gd / r
    ud = vd + gd
    with np.errstate(divide="ignore", invalid="ignore"):
        # |u'|^{p-2} - |v'|^{p-2}, stable for |g'| << |v'|
        wv = np.abs(vd) ** (p - 2.0)
        ratio = gd / vd
        dw = np.where((vd != 0) & (ratio > -1.0),
                      wv * np.expm1((p - 2.0) * np.log1p(ratio)),
                      np.abs(ud) ** (p - 2.0) - wv)
        wu = np.abs(ud) ** (p - 2.0)
        second = (p - 1.0) * (dw * vdd + wu * gdd)
        first = (n - 1.0) / r * signed_power_difference(vd, gd, p - 1.0)
    return second + first


def source_difference(pair: SolutionPair, r):
    """|u|^{q-1}u - |v|^{q-1}v from v and the gap."""
    return signed_power_difference(pair.v.value(r), pair.gap.value(r), pair.q)


def strong_residual(pair: SolutionPair, p: float, r):
    """Pointwise A(u) - A(v) + |u|^{q-1}u - |v|^{q-1}v for the radial
    p-Laplacian; the pair is a strong supersolution where this is <= 0.

    Returns (residual, scale) with scale the sum of the two terms' magnitudes.
    """
    op = radial_operator_difference(pair, p, r)
    src = source_difference(pair, r)
    return op + src, np.abs(op) + np.abs(src)


def radius_grid(lo: float = 1e-3, hi: float = 1e6, per_decade: int = 64) -> np.ndarray:
    decades = math.log10(hi / lo)
    return np.geomspace(lo, hi, int(round(decades * per_decade)) + 1)


def residual_admissible(pair: SolutionPair, grid, rtol: float = 1e-12) -> bool:
    res, scale = strong_residual(pair, pair.alpha, grid)
    return bool(np.all(np.isfinite(res)) and np.all(res <= rtol * scale))


def derive_suitable_c(params: ExampleParams, grid=None, bracket=(1e-8, 1e3),
                      rtol: float = 1e-4) -> Optional[float]:
    """Amplitude c making the closed-form pair a pointwise supersolution of
    the radial alpha-Laplacian inequality on `grid`.

    For the v = 0 families the residual is c^{alpha-1} (Delta w + c^{q-alpha+1} w^q),
    so admissible c form an interval (0, c*]; the largest value is returned.
    For the two-term family a large c damps the source difference, and the
    smallest admissible c is returned. Returns None when nothing in the
    bracket works. Hypotheses of the example are not enforced here.
    """
    grid = radius_grid() if grid is None else np.asarray(grid, dtype=float)
    lo, hi = bracket

    def ok(c):
        p = ExampleParams(params.n, params.alpha, params.q, c=c, mu=params.mu,
                          lam=params.lam, family=params.family)
        return residual_admissible(build_pair(p, check_regime=False), grid)

    largest = params.family != "example23"
    if largest:
        if not ok(lo):
            return None
        if ok(hi):
            return hi
    else:
        if not ok(hi):
            return None
        if ok(lo):
            return lo
    # geometric bisection; `lo` side passes for the largest-c search
    while hi / lo - 1.0 > rtol:
        mid = math.sqrt(lo * hi)
        if ok(mid) == largest:
            lo = mid
        else:
            hi = mid
    return lo if largest else hi


def c_star_oracle(params: ExampleParams, grid=None) -> Optional[float]:
    """Independent grid oracle for the v = 0 families: the infimum over the
    grid of -Delta_alpha w / w^q for w = (1 + r^beta)^gamma, raised to
    1/(q - alpha + 1). Uses finite differences of the radial flux so it
    shares no derivative code with the closed-form path."""
    grid = radius_grid() if grid is None else np.asarray(grid, dtype=float)
    a, q = params.alpha, params.q
    beta = a / (a - 1.0)
    gamma = (1.0 - a) / (q - a + 1.0)

    def w(s):
        return (1.0 + s ** beta) ** gamma

    def dw(s):
        return gamma * beta * s ** (beta - 1.0) * (1.0 + s ** beta) ** (gamma - 1.0)

    lap = radial_p_laplacian(FunctionProfile(w, dw), a, params.n, grid, method="fd")
    ratio = -lap / w(grid) ** q
    if np.any(~np.isfinite(ratio)) or ratio.min() <= 0:
        return None
    return float(ratio.min() ** (1.0 / (q - a + 1.0)))
