"""Divergence-form operators A(w) = sum_i d/dx_i A_i(x, grad w) and numerical
checks of their monotonicity and alpha-monotonicity.

A :class:`FluxField` carries a vectorised flux evaluator ``flux(x, xi)`` taking
arrays of shape ``(m, n)`` and returning ``(m, n)``. The checkers sample
triples ``(x, xi1, xi2)`` and measure

* the pairing ``sum_i (xi1_i - xi2_i) (A_i(x, xi1) - A_i(x, xi2))``, which must
  be non-negative, and
* the ratio ``|A(x, xi1) - A(x, xi2)|^alpha / pairing^(alpha - 1)``, whose
  supremum is the smallest admissible constant K.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

ArrayFn = Callable[[np.ndarray, np.ndarray], np.ndarray]

NEAR_DIAGONAL_EPS = (1e-1, 1e-3, 1e-6)
MAX_WITNESSES = 20


@dataclass(frozen=True)
class FluxField:
    """Flux components A_i(x, xi) of a divergence-form operator.

    ``exponent`` is the power p of the built-in p-Laplacian family and enables
    the radial reductions used by :mod:`liouville_lab.weak_form`. ``separable``
    marks the coordinate-wise operator, ``radial_weight`` a weight that depends
    on |x| only.
    """

    n: int
    alpha: float
    name: str
    flux: ArrayFn
    weight: Optional[Callable[[np.ndarray], np.ndarray]] = None
    weight_bound: Optional[float] = None
    exponent: Optional[float] = None
    separable: bool = False
    radial_weight: bool = False

    def __call__(self, x, xi) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        single = xi.ndim == 1
        x2 = np.atleast_2d(x)
        xi2 = np.atleast_2d(xi)
        if x2.shape[0] == 1 and xi2.shape[0] > 1:
            x2 = np.broadcast_to(x2, xi2.shape)
        out = np.asarray(self.flux(x2, xi2), dtype=float)
        if out.shape != xi2.shape:
            raise ValueError(f"{self.name}: flux returned shape {out.shape}, expected {xi2.shape}")
        return out[0] if single else out

    @property
    def supports_radial(self) -> bool:
        return self.exponent is not None and (self.weight is None or self.radial_weight)

    def weight_at_radius(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.weight is None:
            return np.ones_like(r)
        pts = np.zeros((r.size, self.n))
        pts[:, 0] = r.ravel()
        return np.asarray(self.weight(pts), dtype=float).reshape(r.shape)


def _check_p(p: float) -> float:
    p = float(p)
    if not 1.0 < p <= 2.0:
        raise ValueError(f"p must lie in (1, 2], got {p}")
    return p


def _p_flux(xi: np.ndarray, p: float) -> np.ndarray:
    norm = np.linalg.norm(xi, axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norm > 0, norm ** (p - 2.0), 0.0)
    return scale * xi


def make_p_laplacian(n: int, p: float) -> FluxField:
    """A(x, xi) = |xi|^{p-2} xi, with A(x, 0) = 0."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    p = _check_p(p)
    return FluxField(n=n, alpha=p, name=f"p_laplacian(p={p:g})",
                     flux=lambda x, xi: _p_flux(xi, p), exponent=p)


def make_modified_p_laplacian(n: int, p: float) -> FluxField:
    """A_i(x, xi) = |xi_i|^{p-2} xi_i, component by component."""
    if n < 2:
        raise ValueError("the coordinate-wise p-Laplacian is defined for n >= 2")
    p = _check_p(p)

    def flux(x, xi):
        a = np.abs(xi)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(a > 0, a ** (p - 2.0) * xi, 0.0)

    return FluxField(n=n, alpha=p, name=f"modified_p_laplacian(p={p:g})",
                     flux=flux, exponent=p, separable=True)


def make_weighted_p_laplacian(n: int, p: float, a: Callable[[np.ndarray], np.ndarray],
                              bound: float = 1.0, radial: bool = False) -> FluxField:
    """A(x, xi) = a(x) |xi|^{p-2} xi for a weight 0 <= a <= bound.

    ``a`` maps points of shape (m, n) to shape (m,). The bound is not enforced
    here; the checkers sample it and report violations.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    p = _check_p(p)

    def flux(x, xi):
        return np.asarray(a(x), dtype=float)[:, None] * _p_flux(xi, p)

    return FluxField(n=n, alpha=p, name=f"weighted_p_laplacian(p={p:g})", flux=flux,
                     weight=a, weight_bound=float(bound), exponent=p, radial_weight=radial)


def inverse_quadratic_weight(x: np.ndarray) -> np.ndarray:
    """a(x) = 1 / (1 + |x|^2); radial, bounded by 1."""
    return 1.0 / (1.0 + np.sum(np.asarray(x) ** 2, axis=1))


@dataclass
class SamplePlan:
    """Seeded sampling plan over (x, xi1, xi2) in a box [lo, hi]^n.

    ``count`` uniform random triples are always drawn; when ``near_diagonal``
    is set a fixed stratified set of pairs xi1 = xi2 + eps * e is appended for
    each eps in ``eps_values``.
    """

    seed: int = 0
    count: int = 100_000
    box_bounds: tuple[float, float] = (-2.0, 2.0)
    tolerance: float = 1e-12
    near_diagonal: bool = True
    eps_values: tuple[float, ...] = NEAR_DIAGONAL_EPS
    growth_limit: float = 10.0

    def to_dict(self) -> dict:
        return {"seed": self.seed, "count": self.count,
                "box_bounds": list(self.box_bounds), "tolerance": self.tolerance}

    @classmethod
    def from_dict(cls, d: dict) -> "SamplePlan":
        lo, hi = d.get("box_bounds", (-2.0, 2.0))
        return cls(seed=int(d.get("seed", 0)), count=int(d.get("count", 100_000)),
                   box_bounds=(float(lo), float(hi)),
                   tolerance=float(d.get("tolerance", 1e-12)))


@dataclass
class MonotonicityReport:
    kind: str
    samples_checked: int
    min_pairing: float
    k_hat: float
    tolerance: float
    violations: list = field(default_factory=list)
    violation_count: int = 0
    alpha: Optional[float] = None
    k_by_eps: dict = field(default_factory=dict)
    unbounded: bool = False

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "pass": self.passed,
            "samples_checked": self.samples_checked,
            "min_pairing": self.min_pairing,
            "k_hat": self.k_hat,
            "alpha": self.alpha,
            "tolerance": self.tolerance,
            "k_by_eps": {f"{e:g}": v for e, v in self.k_by_eps.items()},
            "unbounded": self.unbounded,
            "violation_count": self.violation_count,
            "violations": self.violations,
        }


@dataclass
class _Samples:
    x: np.ndarray
    xi1: np.ndarray
    xi2: np.ndarray
    eps: np.ndarray  # nan for random samples


def _directions(n: int) -> np.ndarray:
    dirs = [np.eye(n)[i] for i in range(n)]
    if n >= 2:
        dirs.append(np.ones(n) / math.sqrt(n))
        d = np.zeros(n)
        d[0], d[1] = 1.0, -1.0
        dirs.append(d / math.sqrt(2.0))
    else:
        dirs.append(-np.ones(1))
    return np.array(dirs)


def near_diagonal_samples(n: int, lo: float, hi: float,
                          eps_values=NEAR_DIAGONAL_EPS) -> _Samples:
    """Stratified pairs xi1 = xi2 + eps * e.

    Base points xi2 come from a coarse 5^n grid over the box and from the same
    grid shrunk to [-eps, eps]^n, so that pairs straddling the origin (where a
    p < 2 flux is least regular) are present at every scale. The x positions
    cycle through a 3^n grid and are shared across eps levels, which makes the
    per-eps maxima directly comparable.
    """
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    ticks = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
    unit_grid = np.array(list(itertools.product(ticks, repeat=n)))
    xgrid = np.array(list(itertools.product([0.0, -1.0, 1.0], repeat=n))) * half + mid
    dirs = _directions(n)
    xs, a, b, es = [], [], [], []
    for eps in eps_values:
        k = 0
        for base_scale, base_shift in ((half, mid), (eps, 0.0)):
            bases = unit_grid * base_scale + base_shift
            for e in dirs:
                m = len(bases)
                idx = (np.arange(m) + k) % len(xgrid)
                k += m
                xs.append(xgrid[idx])
                b.append(bases)
                a.append(bases + eps * e)
                es.append(np.full(m, eps))
    return _Samples(np.vstack(xs), np.vstack(a), np.vstack(b), np.concatenate(es))


def draw_samples(n: int, plan: SamplePlan) -> _Samples:
    lo, hi = plan.box_bounds
    rng = np.random.default_rng(plan.seed)
    m = int(plan.count)
    # one row per triple, so a larger count extends the same sample stream
    triples = rng.uniform(lo, hi, (m, 3, n))
    x, xi1, xi2 = triples[:, 0], triples[:, 1], triples[:, 2]
    eps = np.full(m, np.nan)
    if plan.near_diagonal:
        nd = near_diagonal_samples(n, lo, hi, plan.eps_values)
        x = np.vstack([x, nd.x])
        xi1 = np.vstack([xi1, nd.xi1])
        xi2 = np.vstack([xi2, nd.xi2])
        eps = np.concatenate([eps, nd.eps])
    return _Samples(x, xi1, xi2, eps)


def _witness(s: _Samples, i: int, reason: str, value: float) -> dict:
    return {"x": s.x[i].tolist(), "xi1": s.xi1[i].tolist(), "xi2": s.xi2[i].tolist(),
            "reason": reason, "value": float(value)}


def _evaluate(fld: FluxField, s: _Samples):
    with np.errstate(all="ignore"):
        d_a = fld(s.x, s.xi1) - fld(s.x, s.xi2)
        d_xi = s.xi1 - s.xi2
        pairing = np.sum(d_xi * d_a, axis=1)
    finite = np.all(np.isfinite(d_a), axis=1) & np.isfinite(pairing)
    return d_a, pairing, finite


class _Violations:
    def __init__(self):
        self.items: list = []
        self.count = 0

    def add(self, s: _Samples, idx: np.ndarray, reason: str, values: np.ndarray) -> None:
        idx = np.asarray(idx)
        self.count += int(idx.size)
        for i, v in zip(idx[: max(0, MAX_WITNESSES - len(self.items))], values):
            self.items.append(_witness(s, int(i), reason, v))


def _check_weight(fld: FluxField, s: _Samples, viol: _Violations) -> None:
    if fld.weight is None:
        return
    a = np.asarray(fld.weight(s.x), dtype=float)
    bound = np.inf if fld.weight_bound is None else fld.weight_bound
    bad = np.flatnonzero(~np.isfinite(a) | (a < 0) | (a > bound))
    viol.add(s, bad, "weight_out_of_bounds", a[bad])


def check_monotonicity(fld: FluxField, plan: SamplePlan | None = None) -> MonotonicityReport:
    """Minimum of the pairing over the plan's samples; passes when it is at
    least ``-plan.tolerance``. Non-finite flux values are reported as
    violations."""
    plan = plan or SamplePlan()
    s = draw_samples(fld.n, plan)
    viol = _Violations()
    _check_weight(fld, s, viol)
    _, pairing, finite = _evaluate(fld, s)
    bad = np.flatnonzero(~finite)
    viol.add(s, bad, "non_finite_flux", np.full(bad.size, np.nan))
    pf = np.where(finite, pairing, np.inf)
    min_pairing = float(pf.min()) if finite.any() else float("nan")
    neg = np.flatnonzero(pf < -plan.tolerance)
    viol.add(s, neg, "negative_pairing", pf[neg])
    return MonotonicityReport(kind="monotonicity", samples_checked=len(pairing),
                              min_pairing=min_pairing, k_hat=0.0, tolerance=plan.tolerance,
                              violations=viol.items, violation_count=viol.count)


def alpha_ratio(d_a: np.ndarray, pairing: np.ndarray, alpha: float) -> np.ndarray:
    """(sum dA_i^2)^{alpha/2} / pairing^{alpha-1}; nan where pairing <= 0."""
    num = np.sum(d_a * d_a, axis=1) ** (alpha / 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(pairing > 0, num / np.where(pairing > 0, pairing, 1.0) ** (alpha - 1.0), np.nan)


def check_alpha_monotonicity(fld: FluxField, alpha: float | None = None,
                             plan: SamplePlan | None = None) -> MonotonicityReport:
    """Empirical constant K for the alpha-monotonicity bound.

    ``k_hat`` is the running maximum of the ratio over samples with positive
    pairing. A sample with zero pairing but a flux jump above tolerance is a
    violation. The near-diagonal set is also used to detect a ratio that keeps
    growing as eps -> 0: if the maximum at the smallest eps exceeds the one at
    the largest eps by more than ``plan.growth_limit``, the bound is declared
    unbounded and the worst sample is reported.
    """
    plan = plan or SamplePlan()
    alpha = fld.alpha if alpha is None else float(alpha)
    if alpha <= 1.0:
        raise ValueError("alpha must exceed 1")
    s = draw_samples(fld.n, plan)
    viol = _Violations()
    _check_weight(fld, s, viol)
    d_a, pairing, finite = _evaluate(fld, s)
    bad = np.flatnonzero(~finite)
    viol.add(s, bad, "non_finite_flux", np.full(bad.size, np.nan))

    jump = np.sqrt(np.sum(np.where(finite[:, None], d_a, 0.0) ** 2, axis=1))
    degenerate = np.flatnonzero(finite & (pairing <= 0) & (jump > plan.tolerance))
    viol.add(s, degenerate, "zero_pairing_with_flux_jump", jump[degenerate])

    ratio = np.where(finite, alpha_ratio(d_a, pairing, alpha), np.nan)
    valid = np.isfinite(ratio)
    k_hat = float(ratio[valid].max()) if valid.any() else 0.0
    if valid.any() and not math.isfinite(k_hat):
        viol.add(s, np.array([int(np.nanargmax(ratio))]), "infinite_ratio", [k_hat])

    k_by_eps = {}
    for eps in plan.eps_values if plan.near_diagonal else ():
        sel = valid & (s.eps == eps)
        k_by_eps[eps] = float(ratio[sel].max()) if sel.any() else 0.0
    unbounded = False
    if len(k_by_eps) >= 2:
        e_big, e_small = max(k_by_eps), min(k_by_eps)
        k_big, k_small = k_by_eps[e_big], k_by_eps[e_small]
        if k_small > plan.growth_limit * max(k_big, np.finfo(float).tiny):
            unbounded = True
            sel = np.flatnonzero(valid & (s.eps == e_small))
            worst = sel[np.argmax(ratio[sel])]
            viol.add(s, np.array([worst]), "ratio_unbounded_near_diagonal", [ratio[worst]])

    pf = pairing[finite]
    return MonotonicityReport(kind="alpha_monotonicity", samples_checked=len(pairing),
                              min_pairing=float(pf.min()) if pf.size else float("nan"),
                              k_hat=k_hat, tolerance=plan.tolerance, violations=viol.items,
                              violation_count=viol.count, alpha=alpha, k_by_eps=k_by_eps,
                              unbounded=unbounded)


def check_zero_flux(fld: FluxField, count: int = 1000, seed: int = 0,
                    box_bounds: tuple[float, float] = (-2.0, 2.0)) -> bool:
    """True when A(x, 0) vanishes at `count` seeded points."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(*box_bounds, (count, fld.n))
    return bool(np.all(fld(x, np.zeros((count, fld.n))) == 0.0))
