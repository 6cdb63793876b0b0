import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liouville_lab.operators import (
    FluxField,
    SamplePlan,
    alpha_ratio,
    check_alpha_monotonicity,
    check_monotonicity,
    check_zero_flux,
    inverse_quadratic_weight,
    make_modified_p_laplacian,
    make_p_laplacian,
    make_weighted_p_laplacian,
)


def _builtins(n, p):
    out = [make_p_laplacian(n, p),
           make_weighted_p_laplacian(n, p, inverse_quadratic_weight, radial=True)]
    if n >= 2:
        out.append(make_modified_p_laplacian(n, p))
    return out


class TestConstructors:
    def test_p2_is_identity(self):
        f = make_p_laplacian(2, 2.0)
        np.testing.assert_array_equal(f([0.0, 0.0], [3.0, 4.0]), [3.0, 4.0])

    def test_p_laplacian_p15(self):
        f = make_p_laplacian(2, 1.5)
        # |xi|^{-1/2} xi with |xi| = 5
        np.testing.assert_allclose(f([0.0, 0.0], [3.0, 4.0]),
                                   [3 / math.sqrt(5), 4 / math.sqrt(5)], rtol=1e-15)

    def test_zero_gradient(self):
        f = make_p_laplacian(3, 1.5)
        np.testing.assert_array_equal(f(np.zeros(3), np.zeros(3)), np.zeros(3))

    @pytest.mark.parametrize("p", [1.0, 0.5, 2.5])
    def test_rejects_p_outside_range(self, p):
        with pytest.raises(ValueError):
            make_p_laplacian(2, p)

    def test_modified(self):
        f = make_modified_p_laplacian(2, 2.0)
        np.testing.assert_array_equal(f([0, 0], [3.0, 4.0]), [3.0, 4.0])
        g = make_modified_p_laplacian(2, 1.5)
        np.testing.assert_allclose(g([0, 0], [4.0, 0.0]), [2.0, 0.0], rtol=1e-15)
        np.testing.assert_array_equal(g([0, 0], [1.0, -1.0]), [1.0, -1.0])

    def test_modified_rejects_n1(self):
        with pytest.raises(ValueError):
            make_modified_p_laplacian(1, 1.5)

    def test_unit_weight_matches_plain(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(500, 3))
        xi = rng.normal(size=(500, 3))
        w = make_weighted_p_laplacian(3, 1.5, lambda z: np.ones(len(z)))
        np.testing.assert_array_equal(w(x, xi), make_p_laplacian(3, 1.5)(x, xi))

    def test_inverse_quadratic_weight(self):
        w = make_weighted_p_laplacian(2, 2.0, inverse_quadratic_weight)
        np.testing.assert_allclose(w([1.0, 0.0], [2.0, 0.0]), [1.0, 0.0])

    def test_zero_weight_is_degenerate(self):
        w = make_weighted_p_laplacian(2, 1.5, lambda z: np.zeros(len(z)))
        plan = SamplePlan(count=2000)
        mono = check_monotonicity(w, plan)
        am = check_alpha_monotonicity(w, 1.5, plan)
        assert mono.passed and mono.min_pairing == 0.0
        assert am.passed and am.k_hat == 0.0

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("p", [1.2, 1.5, 2.0])
    def test_zero_flux_at_sampled_points(self, n, p):
        for f in _builtins(n, p):
            assert check_zero_flux(f, count=1000)


class TestMonotonicity:
    def test_p2_pairing_is_squared_distance(self):
        rep = check_monotonicity(make_p_laplacian(3, 2.0), SamplePlan(count=5000))
        assert rep.passed and rep.min_pairing >= 0.0

    def test_p15_large_sample(self):
        rep = check_monotonicity(make_p_laplacian(2, 1.5), SamplePlan(count=100_000))
        assert rep.passed
        assert rep.min_pairing >= -1e-12

    def test_p15_against_grid_oracle(self):
        # direct evaluation over all pairs of a 21x21 grid on [-2, 2]^2
        t = np.linspace(-2, 2, 21)
        pts = np.array([(a, b) for a in t for b in t])
        nrm = np.linalg.norm(pts, axis=1)
        flux = np.where(nrm[:, None] > 0, pts * np.where(nrm > 0, nrm, 1.0)[:, None] ** -0.5, 0.0)
        pair = np.einsum("ijk,ijk->ij", pts[:, None] - pts[None], flux[:, None] - flux[None])
        assert pair.min() >= -1e-12
        assert check_monotonicity(make_p_laplacian(2, 1.5)).min_pairing >= -1e-12

    def test_diagonal_samples_contribute_zero(self):
        f = make_p_laplacian(2, 1.5)
        xi = np.random.default_rng(0).normal(size=(100, 2))
        d = f(np.zeros((100, 2)), xi) - f(np.zeros((100, 2)), xi)
        assert np.all(np.sum((xi - xi) * d, axis=1) == 0.0)

    def test_non_finite_flux_is_a_witness(self):
        bad = FluxField(n=2, alpha=2.0, name="nan flux",
                        flux=lambda x, xi: np.where(xi[:, :1] > 1.5, np.nan, xi))
        rep = check_monotonicity(bad, SamplePlan(count=1000, near_diagonal=False))
        assert not rep.passed
        assert rep.violations[0]["reason"] == "non_finite_flux"
        assert rep.violations

    def test_negative_weight_reported(self):
        w = make_weighted_p_laplacian(2, 2.0, lambda z: z[:, 0], bound=1.0)
        rep = check_monotonicity(w, SamplePlan(count=1000))
        assert not rep.passed
        assert any(v["reason"] == "weight_out_of_bounds" for v in rep.violations)

    def test_violations_iff_fail(self):
        antimono = FluxField(n=1, alpha=2.0, name="minus identity", flux=lambda x, xi: -xi)
        rep = check_monotonicity(antimono, SamplePlan(count=500))
        assert not rep.passed and rep.violations and rep.min_pairing < 0
        ok = check_monotonicity(make_p_laplacian(1, 2.0), SamplePlan(count=500))
        assert ok.passed and not ok.violations

    def test_deterministic(self):
        f = make_p_laplacian(3, 1.2)
        a = check_alpha_monotonicity(f, 1.2, SamplePlan(seed=11, count=3000)).to_dict()
        b = check_alpha_monotonicity(f, 1.2, SamplePlan(seed=11, count=3000)).to_dict()
        assert json.dumps(a) == json.dumps(b)


class TestAlphaMonotonicity:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_p2_khat_is_one(self, n):
        for f in _builtins(n, 2.0):
            rep = check_alpha_monotonicity(f, 2.0, SamplePlan(count=20_000))
            assert rep.passed
            assert abs(rep.k_hat - 1.0) <= 1e-9

    def test_only_diagonal_samples(self):
        f = make_p_laplacian(2, 1.5)
        xi = np.random.default_rng(1).normal(size=(50, 2))
        d = f(np.zeros((50, 2)), xi) - f(np.zeros((50, 2)), xi)
        ratio = alpha_ratio(d, np.zeros(50), 1.5)
        assert np.all(np.isnan(ratio))  # both sides vanish, nothing to bound

    def test_p15_khat_matches_grid_oracle(self):
        def oracle(m):
            t = np.linspace(-2, 2, m)
            pts = np.array([(a, b) for a in t for b in t])
            nrm = np.linalg.norm(pts, axis=1)
            fl = np.where(nrm[:, None] > 0, pts * np.where(nrm > 0, nrm, 1.0)[:, None] ** -0.5, 0.0)
            best = 0.0
            for i in range(len(pts)):
                da, dx = fl[i] - fl, pts[i] - pts
                pr = np.sum(da * dx, axis=1)
                ok = pr > 0
                best = max(best, np.max(np.sum(da[ok] ** 2, axis=1) ** 0.75 / pr[ok] ** 0.5))
            return best

        coarse, fine = oracle(17), oracle(33)
        assert abs(fine / coarse - 1.0) <= 0.05
        rep = check_alpha_monotonicity(make_p_laplacian(2, 1.5), 1.5, SamplePlan(count=100_000))
        assert rep.passed and not rep.unbounded
        assert abs(rep.k_hat / fine - 1.0) <= 0.05
        # the grid maximum is attained by pairs symmetric about 0: 2^{2-p}
        assert fine == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_mismatched_alpha_blows_up(self):
        rep = check_alpha_monotonicity(make_p_laplacian(2, 1.5), 2.0, SamplePlan(count=10_000))
        assert rep.unbounded and not rep.passed
        assert rep.k_by_eps[1e-6] > 1e3
        assert rep.k_by_eps[1e-6] > rep.k_by_eps[1e-3] > rep.k_by_eps[1e-1]

    def test_zero_pairing_with_jump_is_violation(self):
        # flux that jumps while xi stays put in the pairing direction
        rot = FluxField(n=2, alpha=2.0, name="rotation",
                        flux=lambda x, xi: np.stack([-xi[:, 1], xi[:, 0]], axis=1))
        rep = check_alpha_monotonicity(rot, 2.0, SamplePlan(count=200, near_diagonal=False))
        assert not rep.passed
        assert any(v["reason"] == "zero_pairing_with_flux_jump" for v in rep.violations)

    def test_khat_is_running_max(self):
        f = make_modified_p_laplacian(3, 1.5)
        small = check_alpha_monotonicity(f, 1.5, SamplePlan(count=5_000, near_diagonal=False))
        big = check_alpha_monotonicity(f, 1.5, SamplePlan(count=10_000, near_diagonal=False))
        assert big.k_hat >= small.k_hat

    @pytest.mark.parametrize("p", [1.2, 1.5, 2.0])
    def test_bounded_for_matching_alpha(self, p):
        for f in _builtins(3, p):
            rep = check_alpha_monotonicity(f, p, SamplePlan(count=20_000))
            assert rep.passed and math.isfinite(rep.k_hat)


class TestSwapSymmetry:
    @settings(max_examples=60, deadline=None)
    @given(p=st.sampled_from([1.2, 1.5, 2.0]),
           data=st.lists(st.floats(-3, 3, allow_nan=False), min_size=9, max_size=9))
    def test_swap_leaves_both_sides_unchanged(self, p, data):
        x, a, b = (np.array(data[i:i + 3])[None] for i in (0, 3, 6))
        for f in _builtins(3, p):
            d_ab = f(x, a) - f(x, b)
            d_ba = f(x, b) - f(x, a)
            pab = np.sum((a - b) * d_ab, axis=1)
            pba = np.sum((b - a) * d_ba, axis=1)
            assert pab[0] == pba[0]
            assert pab[0] >= -1e-12
            r1, r2 = alpha_ratio(d_ab, pab, p), alpha_ratio(d_ba, pba, p)
            assert np.array_equal(np.isnan(r1), np.isnan(r2))
            if not np.isnan(r1[0]):
                assert r1[0] == r2[0]


def test_plan_json_roundtrip():
    plan = SamplePlan(seed=5, count=123, box_bounds=(-1.0, 3.0), tolerance=1e-10)
    d = json.loads(json.dumps(plan.to_dict()))
    assert set(d) == {"seed", "count", "box_bounds", "tolerance"}
    assert SamplePlan.from_dict(d) == plan


def test_report_json_fields():
    rep = check_alpha_monotonicity(make_p_laplacian(2, 1.5), 1.5, SamplePlan(count=100))
    d = json.loads(json.dumps(rep.to_dict()))
    assert {"pass", "min_pairing", "k_hat", "violations"} <= set(d)
