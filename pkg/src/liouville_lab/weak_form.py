"""Weak-form residual of the comparison inequality against cutoff test
functions.

For a pair (u, v) and a non-negative test function phi,

    L(u, v, phi) = int [ grad(phi) . (A(x, grad u) - A(x, grad v))
                         - (|u|^{q-1}u - |v|^{q-1}v) phi ] dx,

and (u, v) is a weak solution exactly when L >= 0 for every admissible phi.
Radial fields reduce L to a one-dimensional integral; everything else goes
through the Monte Carlo estimator, which is also the cross-check for the
reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import FluxField
from .quadrature import (integrate_panels, modified_angular_factor, panel_breakpoints,
                         signed_power_difference, sphere_area)
from .radial import SolutionPair, source_difference

DEFAULT_TOLERANCE = 1e-6
INDETERMINATE_FRACTION = 1e-2


def _psi(s):
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)


def _dpsi(s):
    s = np.asarray(s, dtype=float)
    safe = np.where(s > 0, s, 1.0)
    return np.where(s > 0, _psi(s) / safe ** 2, 0.0)


def eta(t):
    """Smooth step: 1 for t <= 1, 0 for t >= 2."""
    a, b = _psi(2.0 - t), _psi(np.asarray(t) - 1.0)
    return a / (a + b)


def eta_prime(t):
    t = np.asarray(t, dtype=float)
    a, b = _psi(2.0 - t), _psi(t - 1.0)
    da, db = -_dpsi(2.0 - t), _dpsi(t - 1.0)
    return (da * b - a * db) / (a + b) ** 2


def _shape_constant() -> float:
    t = np.linspace(1.0, 2.0, 200_001)
    return float(np.max(np.abs(eta_prime(t))))


_C_ETA = _shape_constant()


@dataclass(frozen=True)
class CutoffFunction:
    """phi(x) = eta(|x| / R); equal to 1 on |x| <= R, 0 on |x| >= 2R."""

    R: float
    shape: str = "smooth"

    @property
    def shape_constant(self) -> float:
        """C with |phi'| <= C / R."""
        return _C_ETA

    @property
    def support(self) -> float:
        return 2.0 * self.R

    def value(self, r):
        return eta(np.asarray(r, dtype=float) / self.R)

    def deriv(self, r):
        return eta_prime(np.asarray(r, dtype=float) / self.R) / self.R

    @property
    def knots(self) -> tuple[float, ...]:
        return (self.R, self.support)

    def radial_mass(self, n: int) -> float:
        """int phi dx over R^n, by the same panel quadrature."""
        f = lambda r: self.value(r) * r ** (n - 1)
        val, _ = integrate_panels(f, panel_breakpoints(self.support, 16, extra=(self.R,)), 16)
        return sphere_area(n) * val


@dataclass(frozen=True)
class CombinedTestFunction:
    """Sum of cutoffs; non-negative, smooth and compactly supported."""

    parts: tuple

    @property
    def R(self) -> float:
        return min(c.R for c in self.parts)

    @property
    def support(self) -> float:
        return max(c.support for c in self.parts)

    @property
    def knots(self) -> tuple[float, ...]:
        return tuple(sorted({k for c in self.parts for k in c.knots}))

    def value(self, r):
        return sum(c.value(r) for c in self.parts)

    def deriv(self, r):
        return sum(c.deriv(r) for c in self.parts)


def make_cutoff(R: float, shape: str = "smooth") -> CutoffFunction:
    if not R > 0:
        raise ValueError("cutoff radius must be positive")
    if shape != "smooth":
        raise ValueError(f"unknown cutoff shape {shape!r}")
    return CutoffFunction(float(R), shape)


@dataclass
class QuadratureSpec:
    scheme: str = "radial_gauss"
    panels_per_decade: int = 16
    nodes_per_panel: int = 16
    mc_samples: int = 200_000
    seed: int = 0
    rmax: float | None = None

    def __post_init__(self):
        if self.scheme not in ("radial_gauss", "monte_carlo"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if min(self.panels_per_decade, self.nodes_per_panel, self.mc_samples) <= 0:
            raise ValueError("quadrature counts must be positive")

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "panels_per_decade": self.panels_per_decade,
                "nodes_per_panel": self.nodes_per_panel, "mc_samples": self.mc_samples,
                "seed": self.seed, "rmax": self.rmax}


@dataclass
class WeakResidualReport:
    R: float
    residual: float
    abs_error_estimate: float
    scale: float
    flux_term: float
    source_term: float
    tolerance: float = DEFAULT_TOLERANCE
    method: str = "radial_gauss"

    @property
    def passed(self) -> bool:
        return self.residual >= -self.tolerance * self.scale

    @property
    def indeterminate(self) -> bool:
        return self.abs_error_estimate > INDETERMINATE_FRACTION * self.scale

    @property
    def status(self) -> str:
        if self.indeterminate:
            return "indeterminate"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {"R": self.R, "residual": self.residual, "error": self.abs_error_estimate,
                "scale": self.scale, "pass": self.passed, "status": self.status,
                "method": self.method}


def _check_dims(field: FluxField, pair: SolutionPair) -> None:
    if field.n != pair.n:
        raise ValueError(f"field dimension {field.n} does not match pair dimension {pair.n}")


def angular_factor(field: FluxField) -> float:
    """Sphere integral multiplying the radial flux term."""
    if field.separable:
        return modified_angular_factor(field.n, field.exponent)
    return sphere_area(field.n)


def weak_residual(field: FluxField, q: float, pair: SolutionPair, cutoff: CutoffFunction,
                  spec: QuadratureSpec | None = None,
                  tolerance: float = DEFAULT_TOLERANCE) -> WeakResidualReport:
    """L(u, v, phi) for phi = cutoff.

    Radial-compatible fields use
        kappa int phi' a(r) [F(u') - F(v')] r^{n-1} dr
          - |S^{n-1}| int phi [|u|^{q-1}u - |v|^{q-1}v] r^{n-1} dr,
    with F(t) = |t|^{p-2} t and kappa the sphere area (isotropic) or the
    angular factor of the coordinate-wise operator. Fields without a radial
    reduction, or ``spec.scheme == 'monte_carlo'``, use the Monte Carlo route.
    """
    spec = spec or QuadratureSpec()
    _check_dims(field, pair)
    rmax = spec.rmax if spec.rmax is not None else cutoff.support
    if rmax < cutoff.support:
        raise ValueError("quadrature rmax must cover the cutoff support 2R")
    if spec.scheme == "monte_carlo" or not field.supports_radial:
        est, se, flux_t, src_t = _mc_estimate(field, q, pair, cutoff, spec.mc_samples, spec.seed)
        return WeakResidualReport(cutoff.R, est, 3.0 * se, abs(flux_t) + abs(src_t),
                                  flux_t, src_t, tolerance, "monte_carlo")

    n, p = pair.n, field.exponent
    kappa = angular_factor(field)
    area = sphere_area(n)
    src_pair = pair if q == pair.q else SolutionPair(pair.u, pair.v, n, pair.alpha, q, gap=pair.gap)

    def flux_integrand(r):
        dphi = cutoff.deriv(r)
        diff = signed_power_difference(pair.v.deriv(r), pair.gap.deriv(r), p - 1.0)
        return kappa * dphi * field.weight_at_radius(r) * diff * r ** (n - 1)

    def source_integrand(r):
        return area * cutoff.value(r) * source_difference(src_pair, r) * r ** (n - 1)

    breaks = panel_breakpoints(rmax, spec.panels_per_decade, extra=cutoff.knots)
    # phi' vanishes on [0, R]; integrate the flux term on [R, 2R] only
    fbreaks = breaks[(breaks >= cutoff.R) & (breaks <= cutoff.support)]
    flux_t, flux_e = integrate_panels(flux_integrand, fbreaks, spec.nodes_per_panel)
    src_t, src_e = integrate_panels(source_integrand, breaks, spec.nodes_per_panel)
    return WeakResidualReport(cutoff.R, flux_t - src_t, flux_e + src_e,
                              abs(flux_t) + abs(src_t), flux_t, src_t, tolerance)


def _mc_estimate(field, q, pair, cutoff, samples, seed, batch=250_000):
    """Importance-sampled estimate of L over the ball |x| < 2R.

    Radii come from an even mixture of the uniform-in-ball law and a
    log-uniform law on [2R * 1e-6, 2R]; directions are uniform on the sphere.
    The integrand uses the full n-dimensional flux, not the radial reduction.
    """
    _check_dims(field, pair)
    n = pair.n
    rmax = cutoff.support
    rmin = rmax * 1e-6
    log_span = math.log(rmax / rmin)
    area = sphere_area(n)
    src_pair = pair if q == pair.q else SolutionPair(pair.u, pair.v, n, pair.alpha, q, gap=pair.gap)
    rng = np.random.default_rng(seed)
    sums = np.zeros(3)  # total, flux, source
    sum_sq = 0.0
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        pick = rng.random(m) < 0.5
        r_ball = rmax * rng.random(m) ** (1.0 / n)
        r_log = rmin * np.exp(log_span * rng.random(m))
        r = np.where(pick, r_ball, r_log)
        z = rng.standard_normal((m, n))
        omega = z / np.linalg.norm(z, axis=1, keepdims=True)
        x = r[:, None] * omega

        dens_ball = n * r ** (n - 1) / rmax ** n
        dens_log = np.where(r >= rmin, 1.0 / (r * log_span), 0.0)
        dens = 0.5 * dens_ball + 0.5 * dens_log
        jac = area * r ** (n - 1) / dens

        grad_phi = cutoff.deriv(r)[:, None] * omega
        gu = pair.u.deriv(r)[:, None] * omega
        gv = pair.v.deriv(r)[:, None] * omega
        d_flux = field(x, gu) - field(x, gv)
        f_flux = np.sum(grad_phi * d_flux, axis=1) * jac
        f_src = cutoff.value(r) * source_difference(src_pair, r) * jac
        f = f_flux - f_src
        sums += (f.sum(), f_flux.sum(), f_src.sum())
        sum_sq += float(np.dot(f, f))
        done += m
    mean = sums[0] / samples
    var = max(sum_sq / samples - mean * mean, 0.0)
    se = math.sqrt(var / samples) if samples > 1 else float("inf")
    return float(mean), float(se), float(sums[1] / samples), float(sums[2] / samples)


def mc_oracle_residual(field: FluxField, q: float, pair: SolutionPair, cutoff: CutoffFunction,
                       mc_samples: int = 1_000_000, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of L and its standard error."""
    est, se, _, _ = _mc_estimate(field, q, pair, cutoff, mc_samples, seed)
    return est, se


def certify_pair(field: FluxField, q: float, pair: SolutionPair, R: float,
                 spec: QuadratureSpec | None = None,
                 factors=(1.0, 2.0, 4.0)) -> tuple[str, list[WeakResidualReport]]:
    """Weak residuals over the cutoff family {R, 2R, 4R}.

    Finitely many test functions cannot establish the inequality for all phi;
    a pass here means no counterexample was found in the family. Returns the
    overall status ('pass', 'fail' or 'indeterminate') and the reports.
    """
    reports = [weak_residual(field, q, pair, make_cutoff(R * f), spec) for f in factors]
    if any(rep.status == "fail" for rep in reports):
        return "fail", reports
    if any(rep.status == "indeterminate" for rep in reports):
        return "indeterminate", reports
    return "pass", reports
