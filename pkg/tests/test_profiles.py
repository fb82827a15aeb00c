import numpy as np
import pytest

from gordon.families import residual_sinh_gordon, residual_sine_gordon
from gordon.grid import make_grid
from gordon.profiles import (
    QuarticProfile,
    assemble_product_family,
    assemble_tan_family,
    assemble_tanh_family,
    dump_profile_csv,
    integrate_profile,
    tan_family_profiles,
    tanh_family_profiles,
)

SQRT2 = np.sqrt(2.0)


def axis(a, b, h):
    return np.linspace(a, b, int(round((b - a) / h)) + 1)


class TestQuarticProfile:
    def test_inconsistent_initial_data_rejected(self):
        with pytest.raises(ValueError):
            QuarticProfile(-1.0, 4.0, 0.0, 2.0, 1.0)  # slope^2 = 1 but quartic(2) = 0

    def test_direction_validated(self):
        with pytest.raises(ValueError):
            QuarticProfile(-1.0, 4.0, 0.0, 2.0, 0.0, direction="z")

    def test_from_json(self):
        spec = QuarticProfile.from_json(
            {"q4": -1, "q2": 4, "q0": 0, "p_init": 2, "dp_init": 0, "direction": "y"}
        )
        assert spec.direction == "y" and spec.q2 == 4.0


class TestIntegrateProfile:
    def test_sech_closed_form(self):
        spec = QuarticProfile(-1.0, 4.0, 0.0, 2.0, 0.0)
        t = axis(-1.0, 1.0, 1 / 400)
        sp = integrate_profile(spec, t)
        assert np.abs(sp.p - 2 / np.cosh(2 * t)).max() < 1e-8

    def test_equilibrium(self):
        spec = QuarticProfile(-1.0, 3.0, 0.0, 0.0, 0.0)
        sp = integrate_profile(spec, axis(-1, 1, 0.01))
        assert np.all(sp.p == 0.0) and np.all(sp.P == 0.0)

    def test_sqrt2_tanh_closed_form(self):
        spec = QuarticProfile(1.0, -4.0, 4.0, 0.0, 2.0)
        t = axis(-1.0, 1.0, 1 / 400)
        sp = integrate_profile(spec, t)
        assert np.abs(sp.p - SQRT2 * np.tanh(SQRT2 * t)).max() < 1e-8

    def test_axis_not_containing_origin(self):
        # initial data lives at t = 0 even when the axis window starts later
        spec = QuarticProfile(1.0, -4.0, 4.0, 0.0, 2.0)
        t = axis(0.2, 1.0, 1 / 400)
        sp = integrate_profile(spec, t)
        assert np.abs(sp.p - SQRT2 * np.tanh(SQRT2 * t)).max() < 1e-8
        # P(t) = ln(cosh(sqrt2 t)) anchored at the true origin
        assert np.abs(sp.P - np.log(np.cosh(SQRT2 * t))).max() < 1e-6

    def test_first_integral_drift(self):
        for spec in (
            QuarticProfile(-1.0, 4.0, 0.0, 2.0, 0.0),
            QuarticProfile(1.0, -4.0, 4.0, 0.0, 2.0),
            QuarticProfile(-1.0, 4.0, 4.0, 0.0, 2.0),
        ):
            sp = integrate_profile(spec, axis(-1, 1, 1 / 100))
            assert sp.first_integral_drift(spec) < 1e-9

    def test_antiderivative_is_axis_trapezoid(self):
        spec = QuarticProfile(-1.0, 4.0, 0.0, 2.0, 0.0)
        t = axis(-1.0, 1.0, 1 / 50)
        sp = integrate_profile(spec, t)
        h = t[1] - t[0]
        steps = np.diff(sp.P)
        trapz = (sp.p[1:] + sp.p[:-1]) / 2 * h
        assert np.allclose(steps, trapz, atol=1e-14)
        k0 = np.argmin(np.abs(t))
        assert sp.P[k0] == 0.0

    def test_rk4_convergence(self):
        # halving the axis step (hence the substep) cuts the ODE error ~16x
        spec = QuarticProfile(-1.0, 4.0, 0.0, 2.0, 0.0)

        def err(h):
            t = axis(-1.0, 1.0, h)
            sp = integrate_profile(spec, t)
            return np.abs(sp.p - 2 / np.cosh(2 * t)).max()

        assert err(0.2) / err(0.1) >= 12

    def test_blow_up_masks_tail(self):
        # (p')^2 = p^4 + 4 has no turning point; p escapes in finite time
        spec = QuarticProfile(1.0, 0.0, 4.0, 0.0, 2.0)
        sp = integrate_profile(spec, axis(0.0, 4.0, 0.01))
        assert not sp.valid[-1] and sp.valid[0]
        assert sp.p[~sp.valid].max() == 0.0

    def test_nonuniform_axis_rejected(self):
        spec = QuarticProfile(-1.0, 4.0, 0.0, 2.0, 0.0)
        with pytest.raises(ValueError):
            integrate_profile(spec, np.array([0.0, 0.1, 0.3]))


class TestCoefficientConstraints:
    def test_tan_family_violation_rejected(self):
        with pytest.raises(ValueError):
            tan_family_profiles(1.0, 0.0, 0.0)

    def test_tanh_family_violation_rejected(self):
        with pytest.raises(ValueError):
            tanh_family_profiles(0.0, 0.0, 0.0)

    def test_tan_family_accepts_consistent_set(self):
        a_spec, b_spec = tan_family_profiles(4.0, 0.0, 0.0, a_init=2.0, b_init=2.0)
        assert a_spec.q2 == 4.0 and b_spec.q2 == 4.0

    def test_negative_quartic_slope_rejected(self):
        with pytest.raises(ValueError):
            tan_family_profiles(4.0, -4.0, -4.0, a_init=0.0)


class TestAssembly:
    def test_tan_family_zero_profiles(self):
        g = make_grid(-0.5, 0.5, -0.5, 0.5, 11, 11)
        a = integrate_profile(QuarticProfile(-1.0, 4.0, 0.0, 0.0, 0.0), g.x())
        b = integrate_profile(QuarticProfile(-1.0, 4.0, 0.0, 0.0, 0.0), g.y())
        w = assemble_tan_family(a, b, g)
        assert np.all(w.values == 0.0)

    def test_tan_family_sech_profiles_match_special_solution(self):
        # a = b = 2 sech(2t) gives A = arctan(sinh 2x), so
        # sinh w = (sinh2x + sinh2y)/(1 - sinh2x sinh2y)
        g = make_grid(-0.25, 0.25, -0.25, 0.25, 101, 101)
        a_spec, b_spec = tan_family_profiles(4.0, 0.0, 0.0, a_init=2.0, b_init=2.0)
        w = assemble_tan_family(
            integrate_profile(a_spec, g.x()), integrate_profile(b_spec, g.y()), g
        )
        X, Y = g.mesh()
        expect = np.arcsinh(
            (np.sinh(2 * X) + np.sinh(2 * Y)) / (1 - np.sinh(2 * X) * np.sinh(2 * Y))
        )
        # the antiderivative is an axis trapezoid, so accuracy is O(h^2)
        assert np.abs(w.values - expect)[w.mask].max() < 5e-5

    def test_tan_family_generic_coefficients_solve_pde(self):
        # alpha = beta = 1/2: a truly elliptic-function profile pair; the
        # construction needs a'(0) + b'(0) = 0, so the y-slope is -sqrt(c3)
        g = make_grid(-0.3, 0.3, -0.3, 0.3, 121, 121)
        a_spec, b_spec = tan_family_profiles(4.0, 4.0, 4.0, db_init=-2.0)
        assert a_spec.dp_init == 2.0  # p_init = 0 defaults the slope to sqrt(c2)
        w = assemble_tan_family(
            integrate_profile(a_spec, g.x()), integrate_profile(b_spec, g.y()), g
        )
        sup, n = residual_sinh_gordon(w).sup_norm()
        assert n > 0 and sup < 16 * 1e-3  # h = 1/200 floor

    def test_tanh_family_zero(self):
        g = make_grid(-0.5, 0.5, -0.5, 0.5, 11, 11)
        z = integrate_profile(QuarticProfile(1.0, -4.0, 0.0, 0.0, 0.0), g.x())
        zy = integrate_profile(QuarticProfile(1.0, -4.0, 0.0, 0.0, 0.0), g.y())
        th = assemble_tanh_family(z, zy, g)
        assert np.all(th.values == 0.0)

    def test_tanh_family_sqrt2_matches_half_angle_form(self):
        g = make_grid(0.2, 1.0, -0.35, 0.35, 161, 141)
        c_spec, d_spec = tanh_family_profiles(-4.0, 4.0, 4.0, dc_init=2.0, dd_init=-2.0)
        th = assemble_tanh_family(
            integrate_profile(c_spec, g.x()), integrate_profile(d_spec, g.y()), g
        )
        X, Y = g.mesh()
        cx, cy = np.cosh(SQRT2 * X), np.cosh(SQRT2 * Y)
        expect = 2 * np.arctan((cx - cy) / (cx + cy))
        assert np.abs(th.values - expect)[th.mask].max() < 1e-5

    def test_tanh_family_solves_pde(self):
        g = make_grid(0.2, 1.0, -0.35, 0.35, 161, 141)
        c_spec, d_spec = tanh_family_profiles(-4.0, 4.0, 4.0, dc_init=2.0, dd_init=-2.0)
        th = assemble_tanh_family(
            integrate_profile(c_spec, g.x()), integrate_profile(d_spec, g.y()), g
        )
        sup, _ = residual_sine_gordon(th, -1).sup_norm()
        assert sup < 16 * 1e-3

    def test_product_family_constants_give_half_pi(self):
        g = make_grid(-0.5, 0.5, -0.5, 0.5, 21, 21)
        one = QuarticProfile(1.0, -2.0, 1.0, 1.0, 0.0)  # F = 1 is an equilibrium
        F = integrate_profile(one, g.x())
        G = integrate_profile(QuarticProfile(1.0, -2.0, 1.0, 1.0, 0.0), g.y())
        th = assemble_product_family(F, G, g)
        assert np.allclose(th.values, np.pi / 2, atol=1e-12)

    def test_product_family_zero(self):
        g = make_grid(-0.5, 0.5, -0.5, 0.5, 11, 11)
        zero = integrate_profile(QuarticProfile(1.0, 1.0, 0.0, 0.0, 0.0), g.x())
        G = integrate_profile(QuarticProfile(1.0, -2.0, 1.0, 1.0, 0.0), g.y())
        th = assemble_product_family(zero, G, g)
        assert np.all(th.values == 0.0)

    def test_axis_mismatch_rejected(self):
        g = make_grid(-0.5, 0.5, -0.5, 0.5, 11, 11)
        wrong = integrate_profile(QuarticProfile(-1.0, 4.0, 0.0, 0.0, 0.0), np.linspace(0, 1, 11))
        b = integrate_profile(QuarticProfile(-1.0, 4.0, 0.0, 0.0, 0.0), g.y())
        with pytest.raises(ValueError):
            assemble_tan_family(wrong, b, g)


def test_profile_csv(tmp_path):
    spec = QuarticProfile(-1.0, 4.0, 0.0, 2.0, 0.0)
    sp = integrate_profile(spec, np.linspace(-1, 1, 21))
    p = tmp_path / "prof.csv"
    dump_profile_csv(sp, str(p))
    lines = p.read_text().strip().split("\n")
    assert lines[0] == "t,p,P,valid"
    assert len(lines) == 22
