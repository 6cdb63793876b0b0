"""Shared numerical helpers: panel Gauss rules, sphere measures and stable
differences of signed powers."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} in R^n (2 for n = 1)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def ball_volume(n: int) -> float:
    return sphere_area(n) / n


@lru_cache(maxsize=None)
def _leggauss(m: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(m)
    return x, w


def panel_breakpoints(b: float, per_decade: int, r_lo: float | None = None,
                      extra: tuple[float, ...] = ()) -> np.ndarray:
    """Breakpoints 0 < r_lo < ... < b, log-spaced with `per_decade` panels per
    decade, plus any `extra` points falling strictly inside (0, b)."""
    if b <= 0:
        raise ValueError("upper limit must be positive")
    if r_lo is None:
        r_lo = min(1e-3, b * 1e-6)
    r_lo = min(r_lo, b / 10.0)
    decades = math.log10(b / r_lo)
    k = max(1, int(math.ceil(decades * per_decade)))
    pts = np.geomspace(r_lo, b, k + 1)
    pts = np.concatenate(([0.0], pts, [e for e in extra if 0.0 < e < b]))
    return np.unique(pts)


def panel_rule(breaks: np.ndarray, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights over consecutive breakpoints.

    No endpoint is ever evaluated, so integrands need only be finite in the
    open panels.
    """
    x, w = _leggauss(nodes)
    a = breaks[:-1, None]
    h = (breaks[1:] - breaks[:-1])[:, None]
    r = a + 0.5 * h * (x[None, :] + 1.0)
    wt = 0.5 * h * w[None, :]
    return r.ravel(), wt.ravel()


def integrate_panels(f, breaks: np.ndarray, nodes: int) -> tuple[float, float]:
    """Integrate a vectorised f over [breaks[0], breaks[-1]].

    Returns (value, error_estimate); the estimate is the difference between
    the `nodes`- and `2*nodes`-point composite rules, the latter being the
    reported value. Panel sums are accumulated in fixed order.
    """
    r1, w1 = panel_rule(breaks, nodes)
    r2, w2 = panel_rule(breaks, 2 * nodes)
    coarse = float(np.sum(f(r1) * w1))
    fine = float(np.sum(f(r2) * w2))
    return fine, abs(fine - coarse)


def signed_power(t, s: float):
    """t -> |t|^s sign(t), with 0 -> 0 for s > 0."""
    t = np.asarray(t, dtype=float)
    return np.sign(t) * np.abs(t) ** s


def signed_power_difference(a, d, s: float):
    """|a+d|^s sign(a+d) - |a|^s sign(a), accurate when |d| << |a|.

    Uses sign(a)|a|^s expm1(s log1p(d/a)) where a and a+d share a sign, which
    avoids the cancellation that wrecks the direct difference once a is many
    orders of magnitude larger than d.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    a, d = np.broadcast_arrays(a, d)
    out = signed_power(a + d, s) - signed_power(a, s)
    # only |d| <= |a| can cancel; elsewhere the direct form is already accurate
    safe = (a != 0) & (np.abs(d) <= np.abs(a)) & (d != -a)
    ratio = np.where(safe, d / np.where(safe, a, 1.0), 0.0)
    stable = np.sign(a) * np.abs(a) ** s * np.expm1(s * np.log1p(ratio))
    return np.where(safe, stable, out)


def modified_angular_factor(n: int, p: float, rtol: float = 1e-4, seed: int = 0) -> float:
    """kappa_p = integral over S^{n-1} of sum_i |omega_i|^p.

    Product Gauss-Legendre on one orthant for n <= 3 (the integrand is smooth
    inside each orthant); seeded sphere Monte Carlo for n > 3, run until the
    relative standard error is below `rtol`.
    """
    return _angular_factor(int(n), float(p), float(rtol), int(seed))


@lru_cache(maxsize=64)
def _angular_factor(n: int, p: float, rtol: float, seed: int) -> float:
    if n == 1:
        return 2.0
    m = 96
    x, w = _leggauss(m)
    if n == 2:
        th = 0.25 * math.pi * (x + 1.0)
        wt = 0.25 * math.pi * w
        quarter = np.sum(wt * (np.cos(th) ** p + np.sin(th) ** p))
        return float(4.0 * quarter)
    if n == 3:
        th = 0.25 * math.pi * (x + 1.0)  # polar angle in [0, pi/2]
        ph = th.copy()  # azimuth in [0, pi/2]
        wt = 0.25 * math.pi * w
        T, P = np.meshgrid(th, ph, indexing="ij")
        W = np.outer(wt, wt)
        st = np.sin(T)
        g = (st * np.cos(P)) ** p + (st * np.sin(P)) ** p + np.cos(T) ** p
        return float(8.0 * np.sum(W * g * st))
    rng = np.random.default_rng(seed)
    area = sphere_area(n)
    total = 0.0
    total_sq = 0.0
    count = 0
    batch = 200_000
    while True:
        z = rng.standard_normal((batch, n))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        g = np.sum(np.abs(z) ** p, axis=1)
        total += float(g.sum())
        total_sq += float((g * g).sum())
        count += batch
        mean = total / count
        var = max(total_sq / count - mean * mean, 0.0)
        if math.sqrt(var / count) <= rtol * mean or count >= 50_000_000:
            return area * mean
