import numpy as np
import pytest

from solcusp.lattice import AnosovMatrix, build_sol_lattice, cross_section_volume
from solcusp.volume import QuadratureError, adaptive_quad, cusp_volume
from solcusp.warp import Interpolated, PureExp, ShiftedExp


def test_adaptive_quad_polynomial():
    val, err = adaptive_quad(lambda x: x * x, 0.0, 1.0, 1e-12)
    assert abs(val - 1.0 / 3.0) <= 1e-12
    assert err <= 1e-12


def test_adaptive_quad_rejects_empty_interval():
    with pytest.raises(ValueError):
        adaptive_quad(lambda x: x, 1.0, 1.0, 1e-8)


def test_adaptive_quad_reports_nonconvergence():
    rng = np.random.default_rng(0)
    with pytest.raises(QuadratureError):
        adaptive_quad(lambda x: rng.standard_normal(x.shape), 0.0, 1.0,
                      1e-14, max_intervals=8)


def test_pure_exp_integral_closed_form():
    res = cusp_volume(PureExp(), 1.0, 0.0, 1e-10)
    assert abs(res.integral - 1.0 / 3.0) <= 1e-10
    assert res.tail_bound <= 0.5e-10
    assert res.total == res.integral


def test_shifted_exp_integral_closed_form():
    res = cusp_volume(ShiftedExp(), 1.0, 0.0, 1e-10)
    assert abs(res.integral - 5.0 / 6.0) <= 1e-10


def test_total_uses_cross_section_volume():
    vol_c = cross_section_volume(build_sol_lattice(AnosovMatrix(2, 1, 1, 1)))
    res = cusp_volume(ShiftedExp(), vol_c, 0.0, 1e-10)
    assert abs(res.total - vol_c * 5.0 / 6.0) <= 1e-9


def test_interpolated_matches_shifted_beyond_transition():
    w = Interpolated(-4.0, -1.0)
    a = cusp_volume(w, 1.0, 0.0, 1e-10)
    b = cusp_volume(ShiftedExp(), 1.0, 0.0, 1e-10)
    assert abs(a.integral - b.integral) <= 2e-10


def test_interpolated_start_below_transition():
    res = cusp_volume(Interpolated(-4.0, -1.0), 1.0, -5.0, 1e-6)
    # integrand is e^(-3t) far below the transition; sanity lower bound
    assert res.integral > np.exp(15.0) / 3.0
    assert res.cutoff >= -1.0


def test_additivity_of_the_split_integral():
    tol = 1e-10
    whole = cusp_volume(ShiftedExp(), 1.0, 0.0, tol).integral
    left, _ = adaptive_quad(
        lambda t: (1.0 + np.exp(-t)) * np.exp(-2.0 * t), 0.0, 1.0, tol
    )
    right = cusp_volume(ShiftedExp(), 1.0, 1.0, tol).integral
    assert abs(whole - (left + right)) <= 2.0 * tol


def test_reported_bound_monotone_under_tightening():
    bounds = []
    for tol in (1e-6, 1e-8, 1e-10, 1e-12):
        res = cusp_volume(ShiftedExp(), 1.0, 0.0, tol)
        bounds.append(res.quad_error + res.tail_bound)
    assert all(b1 >= b2 for b1, b2 in zip(bounds, bounds[1:]))


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        cusp_volume(ShiftedExp(), 0.0, 0.0, 1e-8)
    with pytest.raises(ValueError):
        cusp_volume(ShiftedExp(), 1.0, 0.0, 0.0)


def test_rejects_family_without_tail_bound():
    class NoTail:
        family = "mystery"

        def eval(self, t):
            return 1.0, 0.0, 0.0

        def eval_array(self, t):
            t = np.asarray(t, dtype=float)
            return np.ones_like(t), np.zeros_like(t), np.zeros_like(t)

    with pytest.raises(ValueError, match="tail"):
        cusp_volume(NoTail(), 1.0, 0.0, 1e-8)
