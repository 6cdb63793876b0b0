"""The full verification battery behind ``liouville-lab --paper-suite``.

Each ``criterion_*`` function runs one check at its fixed tolerance and
returns a :class:`CriterionResult`; :func:`run_suite` runs them in order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from scipy.integrate import quad

from .growth import (GrowthFunctionalSpec, growth_grid, growth_remark_T4, growth_remark_T7,
                     growth_series, growth_T4, growth_T7)
from .operators import (SamplePlan, check_alpha_monotonicity, check_monotonicity,
                        inverse_quadratic_weight, make_modified_p_laplacian, make_p_laplacian,
                        make_weighted_p_laplacian)
from .quadrature import sphere_area
from .radial import (ExampleParams, build_pair, c_star_oracle, constant_gap_pair,
                     derive_suitable_c)
from .regimes import RegimeQuery, classify, critical_exponent
from .weak_form import make_cutoff, mc_oracle_residual, weak_residual


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"criterion {self.number} [{'PASS' if self.passed else 'FAIL'}] {self.name}"

    def to_dict(self) -> dict:
        return {"criterion": self.number, "name": self.name, "pass": self.passed,
                "detail": self.detail}


def suite_fields(n: int, p: float):
    out = [make_p_laplacian(n, p)]
    if n >= 2:
        out.append(make_modified_p_laplacian(n, p))
    out.append(make_weighted_p_laplacian(n, p, inverse_quadratic_weight, bound=1.0, radial=True))
    return out


def criterion_operators(seed: int = 0) -> CriterionResult:
    rows = []
    ok = True
    for p in (1.2, 1.5, 2.0):
        for n in (1, 2, 3):
            for fld in suite_fields(n, p):
                plan = SamplePlan(seed=seed, count=100_000)
                mono = check_monotonicity(fld, plan)
                am = check_alpha_monotonicity(fld, p, plan)
                good = mono.passed and mono.min_pairing >= -1e-12 and am.passed
                if p == 2.0:
                    good = good and abs(am.k_hat - 1.0) <= 1e-9
                ok = ok and good
                rows.append({"field": fld.name, "n": n, "p": p, "min_pairing": mono.min_pairing,
                             "k_hat": am.k_hat, "pass": good})
    return CriterionResult(1, "operator monotonicity and alpha-monotonicity", ok, {"rows": rows})


def criterion_mismatch(seed: int = 0) -> CriterionResult:
    rep = check_alpha_monotonicity(make_p_laplacian(2, 1.5), 2.0, SamplePlan(seed=seed))
    ratio = rep.k_by_eps.get(1e-6, 0.0)
    ok = ratio > 1e3 and rep.unbounded and not rep.passed
    return CriterionResult(2, "alpha mismatch detected near the diagonal", ok,
                           {"ratio_at_eps_1e-6": ratio, "unbounded": rep.unbounded})


def example1_pair(c=None):
    params = ExampleParams(3, 2.0, 4.0)
    params.c = derive_suitable_c(params) if c is None else c
    return params, build_pair(params)


def criterion_example1(seed: int = 0) -> CriterionResult:
    params, pair = example1_pair()
    oracle = c_star_oracle(params)
    c_ok = oracle is not None and abs(params.c - oracle) <= 1e-3
    detail = {"c": params.c, "c_oracle": oracle, "c_closed_form": (2.0 / 9.0) ** (1.0 / 3.0),
              "rows": []}
    ok = c_ok
    for fld in (make_p_laplacian(3, 2.0), make_modified_p_laplacian(3, 2.0)):
        for R in (1.0, 10.0, 100.0):
            cut = make_cutoff(R)
            rep = weak_residual(fld, params.q, pair, cut)
            est, se = mc_oracle_residual(fld, params.q, pair, cut, 1_000_000, seed)
            agree = abs(est - rep.residual) <= max(0.01 * rep.scale, 3.0 * se)
            good = rep.passed and rep.status == "pass" and agree
            ok = ok and good
            detail["rows"].append({"field": fld.name, "R": R, "residual": rep.residual,
                                   "scale": rep.scale, "mc": est, "mc_se": se, "pass": good})
    return CriterionResult(3, "Example 1 end-to-end (c*, weak residuals, MC agreement)", ok, detail)


def example23_pair(lam: float):
    params = ExampleParams(3, 2.0, 0.5, mu=0.1, lam=lam, family="example23")
    params.c = derive_suitable_c(params)
    return params, build_pair(params)


def example4_pair(q: float = 0.5):
    params = ExampleParams(3, 1.2, q, family="example4")
    params.c = derive_suitable_c(params)
    return params, build_pair(params)


def criterion_growth(seed: int = 0) -> CriterionResult:
    radii = growth_grid(1e2, 1e5, 16)
    checks = []
    _, p1 = example1_pair()
    for nu in (0.5, 1.0):
        s = growth_series(p1, GrowthFunctionalSpec("T4", 3, 2.0, 4.0, nu), radii)
        checks.append((f"example1 nu={nu:g}", s, s.classification == "positive_constant"
                       and abs(s.slope) <= 0.05))
    _, p2 = example23_pair(2.0)
    s = growth_series(p2, GrowthFunctionalSpec("T7", 3, 2.0, 0.5), radii)
    checks.append(("example2", s, s.classification == "positive_constant"))
    _, p3 = example23_pair(2.5)
    s = growth_series(p3, GrowthFunctionalSpec("T7", 3, 2.0, 0.5), radii)
    checks.append(("example3", s, s.classification == "tends_to_zero" and s.slope <= -0.1))
    _, p4 = example4_pair()
    s = growth_series(p4, GrowthFunctionalSpec("T7", 3, 1.2, 0.5), radii)
    checks.append(("example4", s, s.classification == "positive_constant"))
    cg = constant_gap_pair(3, 2.0, 4.0)
    s = growth_series(cg, GrowthFunctionalSpec("T4", 3, 2.0, 4.0, 1.0), radii)
    checks.append(("constant gap", s, s.classification == "diverges" and s.slope >= 0.1))
    rows = [{"case": name, "slope": s.slope, "classification": s.classification,
             "limit": s.limit_estimate, "pass": good} for name, s, good in checks]
    return CriterionResult(4, "growth classification of the example pairs",
                           all(r["pass"] for r in rows), {"rows": rows})


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def criterion_remarks(seed: int = 0) -> CriterionResult:
    radii = growth_grid(1e-1, 1e5, 8)
    worst = 0.0
    cases = []
    for params in (ExampleParams(3, 2.0, 4.0, c=0.6), ExampleParams(3, 1.5, 2.0, c=1.0)):
        pair = build_pair(params)
        spec = GrowthFunctionalSpec("T4", 3, params.alpha, params.q, params.alpha - 1.0)
        err = max(_rel(growth_T4(pair, spec, R), growth_remark_T4(pair, 3, params.alpha, params.q, R))
                  for R in radii)
        cases.append({"form": "T4 nu=alpha-1", "alpha": params.alpha, "q": params.q, "max_rel": err})
        worst = max(worst, err)
    t7_pairs = [(1.2, build_pair(ExampleParams(3, 1.2, 1.0, c=1.0, family="example4"))),
                (1.5, constant_gap_pair(3, 1.5, 1.0, gap=0.5, base=2.0))]
    for alpha, pair in t7_pairs:
        spec = GrowthFunctionalSpec("T7", 3, alpha, 1.0)
        err = max(_rel(growth_T7(pair, spec, R), growth_remark_T7(pair, 3, alpha, R)) for R in radii)
        cases.append({"form": "T7 q=1", "alpha": alpha, "q": 1.0, "max_rel": err})
        worst = max(worst, err)
    return CriterionResult(5, "remark reductions agree pointwise", worst <= 1e-12,
                           {"max_rel": worst, "cases": cases})


# (n, alpha, q) -> expected tags, written out by hand from the theorem hypotheses
REGIME_TABLE = [
    ((1, 1.5, 2.0), ["T1"]),
    ((1, 2.0, 0.3), ["T1"]),
    ((2, 2.0, 1.0), ["T2"]),
    ((2, 2.0, 5.0), ["T2"]),
    ((4, 2.0, 2.0), ["T3"]),  # q = q*
    ((4, 2.0, 2.0 + 1e-6), ["T4", "T5", "T6"]),
    ((3, 2.0, 4.0), ["T4", "T5", "T6"]),
    ((3, 2.0, 1.0), ["T7", "T8"]),
    ((3, 1.5, 0.5), ["T7"]),
    ((3, 1.5, 1.0), ["T3", "T7"]),
    ((3, 2.5, 1.0), []),  # alpha > 2
    ((3, 1.5, 0.7), []),  # listed as an uncovered gap in the acceptance table
]


def criterion_regimes(seed: int = 0) -> CriterionResult:
    rows = []
    for (n, a, q), expected in REGIME_TABLE:
        got = classify(RegimeQuery(n, a, q)).applicable
        rows.append({"n": n, "alpha": a, "q": q, "expected": expected, "got": got,
                     "pass": got == expected})
    boundary = critical_exponent(4, 2.0) == 2.0
    ok = all(r["pass"] for r in rows) and boundary
    return CriterionResult(6, "regime classifier table", ok, {"rows": rows})


def criterion_nonexistence(seed: int = 0) -> CriterionResult:
    cut = make_cutoff(1.0)
    pair = constant_gap_pair(3, 2.0, 1.0, gap=1.0, base=0.0)
    rep = weak_residual(make_p_laplacian(3, 2.0), 1.0, pair, cut)
    mass = sphere_area(3) * quad(lambda r: float(cut.value(r)) * r * r, 0.0, 2.0,
                                 points=[1.0], epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    rel = abs(rep.residual + mass) / mass
    ok = rep.residual < 0 and rel <= 0.01
    return CriterionResult(7, "constant-gap pair fails the weak inequality", ok,
                           {"residual": rep.residual, "minus_mass": -mass, "rel_err": rel})


CRITERIA = (criterion_operators, criterion_mismatch, criterion_example1, criterion_growth,
            criterion_remarks, criterion_regimes, criterion_nonexistence)


def run_suite(seed: int = 0) -> list[CriterionResult]:
    return [crit(seed) for crit in CRITERIA]


def summarize(results) -> dict:
    return {"pass": all(r.passed for r in results),
            "criteria": [r.to_dict() for r in results]}

