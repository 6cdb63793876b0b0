import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from liouville_lab.operators import make_modified_p_laplacian, make_p_laplacian
from liouville_lab.quadrature import sphere_area
from liouville_lab.radial import ExampleParams, SolutionPair, build_pair, constant_gap_pair
from liouville_lab.weak_form import (
    CombinedTestFunction,
    QuadratureSpec,
    WeakResidualReport,
    certify_pair,
    make_cutoff,
    mc_oracle_residual,
    weak_residual,
)


class TestCutoff:
    def test_plateau_and_support(self):
        c = make_cutoff(3.0)
        assert c.value(1.5) == 1.0 and c.value(3.0) == 1.0
        assert c.value(6.0) == 0.0 and c.value(10.0) == 0.0
        assert c.deriv(6.0) == 0.0 and c.deriv(1.0) == 0.0
        assert c.support == 6.0

    def test_self_similar(self):
        t = np.linspace(0.0, 2.5, 101)
        np.testing.assert_allclose(make_cutoff(7.0).value(7.0 * t), make_cutoff(1.0).value(t), atol=1e-9)

    def test_shape_constant(self):
        c = make_cutoff(1.0)
        assert c.shape_constant == pytest.approx(2.0, rel=1e-6)

    @settings(max_examples=100, deadline=None)
    @given(R=st.floats(1e-2, 1e4), t=st.floats(0.0, 3.0))
    def test_bounds(self, R, t):
        c = make_cutoff(R)
        v = float(c.value(t * R))
        assert 0.0 <= v <= 1.0
        assert abs(float(c.deriv(t * R))) <= c.shape_constant / R * (1 + 1e-6)

    def test_invalid(self):
        with pytest.raises(ValueError):
            make_cutoff(0.0)
        with pytest.raises(ValueError):
            make_cutoff(1.0, "box")


class TestResidual:
    def test_identical_pair_is_exactly_zero(self):
        pair = constant_gap_pair(3, 2.0, 4.0, gap=0.0, base=1.5)
        f = make_p_laplacian(3, 1.5)
        rep = weak_residual(f, 4.0, pair, make_cutoff(2.0))
        assert rep.residual == 0.0
        est, se = mc_oracle_residual(f, 4.0, pair, make_cutoff(2.0), 10_000)
        assert est == 0.0 and se == 0.0

    def test_constant_gap_is_minus_mass(self):
        cut = make_cutoff(1.0)
        pair = constant_gap_pair(3, 2.0, 1.0)
        rep = weak_residual(make_p_laplacian(3, 2.0), 1.0, pair, cut)
        mass = sphere_area(3) * quad(lambda r: float(cut.value(r)) * r * r, 0, 2, points=[1.0],
                                     epsabs=1e-13, epsrel=1e-12)[0]
        assert rep.residual == pytest.approx(-mass, rel=1e-8)
        assert rep.status == "fail" and not rep.passed

    def test_linear_in_test_function(self):
        pair = build_pair(ExampleParams(3, 2.0, 4.0, c=0.5))
        f = make_p_laplacian(3, 2.0)
        a, b = make_cutoff(1.0), make_cutoff(5.0)
        la = weak_residual(f, 4.0, pair, a).residual
        lb = weak_residual(f, 4.0, pair, b).residual
        lab = weak_residual(f, 4.0, pair, CombinedTestFunction((a, b))).residual
        assert lab == pytest.approx(la + lb, rel=1e-9, abs=1e-12)

    def test_antisymmetric_when_linear(self):
        pair = build_pair(ExampleParams(3, 2.0, 4.0, c=0.5))
        swapped = SolutionPair(pair.v, pair.u, 3, 2.0, 1.0)
        f = make_p_laplacian(3, 2.0)
        cut = make_cutoff(3.0)
        a = weak_residual(f, 1.0, pair, cut).residual
        b = weak_residual(f, 1.0, swapped, cut).residual
        assert a == pytest.approx(-b, rel=1e-10)

    def test_example1_monte_carlo_agreement(self):
        pair = build_pair(ExampleParams(3, 2.0, 4.0, c=0.6))
        f = make_p_laplacian(3, 2.0)
        cut = make_cutoff(10.0)
        rep = weak_residual(f, 4.0, pair, cut)
        est, se = mc_oracle_residual(f, 4.0, pair, cut, 400_000, seed=1)
        assert abs(est - rep.residual) <= max(3 * se, 0.01 * rep.scale)
        assert rep.status == "pass"

    def test_modified_operator_angular_reduction(self):
        # alpha = 1.5 makes the coordinate-wise operator genuinely anisotropic
        pair = build_pair(ExampleParams(3, 1.5, 2.0, c=0.3))
        f = make_modified_p_laplacian(3, 1.5)
        cut = make_cutoff(2.0)
        rep = weak_residual(f, 2.0, pair, cut)
        mc = weak_residual(f, 2.0, pair, cut, QuadratureSpec(scheme="monte_carlo", mc_samples=400_000))
        assert mc.method == "monte_carlo"
        assert abs(mc.residual - rep.residual) <= mc.abs_error_estimate

    def test_errors(self):
        pair = build_pair(ExampleParams(3, 2.0, 4.0, c=0.5))
        with pytest.raises(ValueError, match="dimension"):
            weak_residual(make_p_laplacian(2, 2.0), 4.0, pair, make_cutoff(1.0))
        with pytest.raises(ValueError, match="rmax"):
            weak_residual(make_p_laplacian(3, 2.0), 4.0, pair, make_cutoff(1.0), QuadratureSpec(rmax=1.0))
        with pytest.raises(ValueError):
            QuadratureSpec(scheme="simpson")

    def test_certify_and_status(self):
        pair = build_pair(ExampleParams(3, 2.0, 4.0, c=0.5))
        status, reps = certify_pair(make_p_laplacian(3, 2.0), 4.0, pair, 1.0)
        assert status == "pass" and [r.R for r in reps] == [1.0, 2.0, 4.0]
        bad, _ = certify_pair(make_p_laplacian(3, 2.0), 1.0, constant_gap_pair(3, 2.0, 1.0), 1.0)
        assert bad == "fail"
        fuzzy = WeakResidualReport(1.0, 0.5, 0.2, 1.0, 1.0, 0.5)
        assert fuzzy.status == "indeterminate"
        assert fuzzy.to_dict()["status"] == "indeterminate"
