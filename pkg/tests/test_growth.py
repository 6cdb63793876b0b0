import math

import numpy as np
import pytest

from liouville_lab.growth import (
    GrowthFunctionalSpec,
    growth_grid,
    growth_remark_T4,
    growth_remark_T7,
    growth_series,
    growth_T4,
    growth_T7,
    limsup_estimate,
    raw_integral,
)
from liouville_lab.quadrature import ball_volume
from liouville_lab.radial import ExampleParams, build_pair, constant_gap_pair


def test_identical_pair_is_zero():
    pair = constant_gap_pair(3, 2.0, 4.0, gap=0.0, base=2.0)
    for kind in ("T4", "T7"):
        spec = GrowthFunctionalSpec(kind, 3, 2.0, 4.0)
        assert growth_T4(pair, spec, 10.0) == 0.0 if kind == "T4" else growth_T7(pair, spec, 10.0) == 0.0
    s = growth_series(pair, GrowthFunctionalSpec("T4", 3, 2.0, 4.0))
    assert s.classification == "tends_to_zero"


@pytest.mark.parametrize("k,nu", [(1.0, 1.0), (2.5, 0.5)])
def test_constant_gap_closed_form(k, nu):
    n, a, q = 3, 2.0, 4.0
    pair = constant_gap_pair(n, a, q, gap=k)
    spec = GrowthFunctionalSpec("T4", n, a, q, nu)
    for R in (10.0, 1e3):
        expected = k ** (q - nu) * ball_volume(n) * R ** (a * (q - nu) / (q - a + 1))
        assert growth_T4(pair, spec, R) == pytest.approx(expected, rel=1e-10)


def test_raw_integral_monotone_and_scaling():
    pair = build_pair(ExampleParams(3, 2.0, 4.0, c=0.5))
    spec = GrowthFunctionalSpec("T4", 3, 2.0, 4.0)
    vals = [raw_integral(pair, spec, R) for R in growth_grid(1.0, 1e3, 4)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    doubled = build_pair(ExampleParams(3, 2.0, 4.0, c=1.0))
    assert raw_integral(doubled, spec, 50.0) == pytest.approx(2.0 ** 3 * raw_integral(pair, spec, 50.0), rel=1e-12)


@pytest.mark.parametrize("s,cls", [(-1.0, "tends_to_zero"), (0.0, "positive_constant"),
                                   (1.0, "diverges"), (-0.1, None), (0.1, None)])
def test_synthetic_power_laws(s, cls):
    R = growth_grid()
    out = limsup_estimate([(r, 3.0 * r ** s) for r in R])
    assert abs(out.slope - s) <= 0.01
    if cls:
        assert out.classification == cls


def test_constant_limit_and_short_series():
    out = limsup_estimate([(r, 7.0) for r in growth_grid()])
    assert out.classification == "positive_constant" and out.limit_estimate == pytest.approx(7.0)
    assert limsup_estimate([(r, 7.0) for r in growth_grid(1e2, 1e3)]).classification == "indeterminate"
    assert limsup_estimate([(r, 7.0) for r in growth_grid(1e2, 1e5, 4)]).classification == "indeterminate"


def test_example1_limit_is_positive_constant():
    pair = build_pair(ExampleParams(3, 2.0, 4.0, c=0.6))
    out = growth_series(pair, GrowthFunctionalSpec("T4", 3, 2.0, 4.0))
    assert out.classification == "positive_constant"


def test_remark_forms():
    p4 = build_pair(ExampleParams(3, 1.2, 1.0, family="example4"))
    spec7 = GrowthFunctionalSpec("T7", 3, 1.2, 1.0)
    for R in (10.0, 1e3):
        assert growth_T7(p4, spec7, R) == pytest.approx(growth_remark_T7(p4, 3, 1.2, R), rel=1e-12)
    p1 = build_pair(ExampleParams(3, 2.0, 4.0, c=0.6))
    spec4 = GrowthFunctionalSpec("T4", 3, 2.0, 4.0)
    assert growth_T4(p1, spec4, 100.0) == pytest.approx(growth_remark_T4(p1, 3, 2.0, 4.0, 100.0), rel=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        GrowthFunctionalSpec("T5", 3, 2.0, 4.0)
    with pytest.raises(ValueError):
        GrowthFunctionalSpec("T4", 3, 2.0, 4.0, nu=1.5)
    with pytest.raises(ValueError):
        GrowthFunctionalSpec("T4", 3, 2.0, 0.5, nu=1.0)
    assert GrowthFunctionalSpec("T4", 3, 2.0, 4.0).nu == 1.0
    assert math.isclose(GrowthFunctionalSpec("T7", 3, 2.0, 0.5).exponent, -1.0)
