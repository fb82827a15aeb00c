import numpy as np
import pytest

from gordon.families import (
    CATALOG,
    eval_family,
    get_family,
    hopf_weight,
    residual_sine_gordon,
    residual_sinh_gordon,
    sign_probe,
    u_ex_section3,
    w_one_soliton,
)
from gordon.grid import field, make_grid

H = 1 / 100  # unit tests run coarse; acceptance re-checks at 1/400
TOL = 16 * 1e-3  # second-order scaling of the 1e-3 floor from h = 1/400


def family_grid(fid, h=H):
    x0, x1, y0, y1 = get_family(fid).rectangle
    nx = int(round((x1 - x0) / h)) + 1
    ny = int(round((y1 - y0) / h)) + 1
    return make_grid(x0, x1, y0, y1, max(nx, 5), max(ny, 5))


class TestCatalog:
    def test_thirteen_families(self):
        assert len(CATALOG) == 13

    def test_unknown_id(self):
        with pytest.raises(KeyError):
            get_family("W_UNKNOWN")

    def test_kinds(self):
        kinds = {f.kind for f in CATALOG.values()}
        assert kinds == {"sinh_solution", "sine_solution", "harmonic_map", "target_metric"}

    def test_sine_signs_recorded(self):
        assert get_family("THETA_EX2").sign == -1
        assert get_family("THETA_SQRT2").sign == -1
        assert get_family("THETA_CONST_HALFPI").sign == 0


class TestEvalPointValues:
    def test_w_tan_special_origin(self):
        g = make_grid(-0.1, 0.1, -0.1, 0.1, 5, 5)
        w = eval_family("W_TAN_SPECIAL", g)
        assert w.values[2, 2] == 0.0 and w.mask[2, 2]

    def test_one_soliton_value(self):
        # at exp(2x) = 1/3 the solution equals 2 artanh(1/3) = ln 2
        x = -0.5 * np.log(3.0)
        v, ok = w_one_soliton(np.array(x), 0.0)
        assert ok and v == pytest.approx(np.log(2.0), abs=1e-14)

    def test_one_soliton_domain(self):
        g = make_grid(-1, 1, -1, 1, 21, 21)
        w = eval_family("W_ONE_SOLITON", g)
        assert not w.mask[g.index_of_x(0.5), 0]  # artanh leaves its domain for x >= 0
        assert w.mask[g.index_of_x(-0.5), 0]

    def test_u_section3_origin_on_boundary(self):
        R, S, ok = u_ex_section3(np.array(0.0), np.array(0.0))
        assert R == 1.0 and S == 0.0 and not ok  # S = 0 is the half-plane boundary

    def test_u_families_upper_half_plane(self):
        for fid in ("U_EX_SECTION3", "U_EX1", "U_EX2", "U_SQRT2"):
            u = eval_family(fid, family_grid(fid))
            assert np.all(u.im[u.mask] > 0), fid


class TestResiduals:
    def test_zero_field_sinh(self):
        g = make_grid(-1, 1, -1, 1, 9, 9)
        r = residual_sinh_gordon(field(g, np.zeros((9, 9))))
        assert r.sup_norm()[0] == 0.0

    def test_zero_field_sine_both_signs(self):
        g = make_grid(-1, 1, -1, 1, 9, 9)
        z = field(g, np.zeros((9, 9)))
        assert residual_sine_gordon(z, +1).sup_norm()[0] == 0.0
        assert residual_sine_gordon(z, -1).sup_norm()[0] == 0.0

    def test_bad_sigma_rejected(self):
        g = make_grid(-1, 1, -1, 1, 9, 9)
        with pytest.raises(ValueError):
            residual_sine_gordon(field(g, np.zeros((9, 9))), 2)

    @pytest.mark.parametrize("fid", ["W_TAN_SPECIAL", "W_ONE_SOLITON", "W_EX2", "W_SQRT2"])
    def test_sinh_families(self, fid):
        sup, n = residual_sinh_gordon(eval_family(fid, family_grid(fid))).sup_norm()
        assert n > 100 and sup < TOL

    @pytest.mark.parametrize("fid", ["THETA_EX2", "THETA_SQRT2"])
    def test_sine_families(self, fid):
        fam = get_family(fid)
        th = eval_family(fid, family_grid(fid))
        sup, n = residual_sine_gordon(th, fam.sign).sup_norm()
        assert n > 100 and sup < TOL

    def test_tan_special_symmetry(self):
        # the formula is symmetric in (x, y): mask and residual transpose-invariant
        g = make_grid(-0.3, 0.3, -0.3, 0.3, 61, 61)
        w = eval_family("W_TAN_SPECIAL", g)
        assert np.array_equal(w.mask, w.mask.T)
        r = residual_sinh_gordon(w)
        assert np.abs(r.values - r.values.T).max() < 1e-12


class TestSignProbe:
    def test_constant_half_pi_undetermined(self):
        th = eval_family("THETA_CONST_HALFPI", family_grid("THETA_CONST_HALFPI"))
        assert sign_probe(th) == 0

    def test_theta_ex2_definite(self):
        assert sign_probe(eval_family("THETA_EX2", family_grid("THETA_EX2"))) == -1

    def test_theta_sqrt2_definite(self):
        assert sign_probe(eval_family("THETA_SQRT2", family_grid("THETA_SQRT2"))) == -1

    def test_too_few_points(self):
        g = make_grid(-1, 1, -1, 1, 5, 5)
        with pytest.raises(ValueError):
            sign_probe(field(g, np.zeros((5, 5))))


class TestHopfWeight:
    def test_poincare_families_have_none(self):
        g = family_grid("U_EX1")
        assert hopf_weight("U_EX1", g) is None
        assert hopf_weight("U_SQRT2", g) is None

    def test_explicit_weights_positive(self):
        for fid in ("U_EX_SECTION3", "U_EX2"):
            g = family_grid(fid)
            wgt = hopf_weight(fid, g)
            assert wgt is not None and np.all(wgt.values[wgt.mask] > 0)
