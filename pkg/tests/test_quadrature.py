import math

import numpy as np
import pytest

from annulus_bvp.model import build_case_preset
from annulus_bvp.quadrature import (
    build_quadrature,
    c11_table,
    c12_table,
    k0_constant,
    k0_formula,
)
from annulus_bvp.series import (
    alpha_coefficients,
    continuation_params,
    taylor_coefficients,
)

# 50-digit reference evaluations (scripts/make_reference_values.py)
K0_CASE_B = -0.431670010685225242j
K0_CASE_A = 0.177787245672202991 - 0.429216379718789809j


def _identity_scale(kap: float) -> complex:
    return 2j * math.pi * kap / (1.0 + kap)


class TestK0:
    def test_symmetric_arc(self):
        spec, _ = build_case_preset("B")
        par = continuation_params(spec.kappa())
        assert k0_constant(spec, par) == pytest.approx(K0_CASE_B, rel=1e-14)

    def test_quarter_arc(self):
        spec, _ = build_case_preset("A")
        par = continuation_params(spec.kappa())
        assert k0_constant(spec, par) == pytest.approx(K0_CASE_A, rel=1e-14)

    def test_coincident_angle_formula_limit(self):
        # not a valid arc, but the closed form degenerates to -i/2
        assert k0_formula(0.7, 0.7, 0.093) == pytest.approx(-0.5j, rel=1e-15)


class TestClampedArcMoments:
    def test_leading_identity_against_alpha(self):
        # -(1+kappa)/(2 pi i kappa) * c12_{-1} converges to alpha_0
        spec, cfg = build_case_preset("A")
        kap = spec.kappa()
        par = continuation_params(kap)
        tc = taylor_coefficients(spec, par, cfg.N)
        c12 = c12_table(spec, par, cfg.N, 100_000, k_min=-1, k_max=-1)
        recovered = c12[0] / (-_identity_scale(kap))
        assert abs(recovered - tc.alpha[0]) <= 0.01 * abs(tc.alpha[0])

    def test_first_beta_identity(self):
        # c12_0 converges to (2 pi i kappa / (1+kappa)) * beta_1
        spec, cfg = build_case_preset("A")
        kap = spec.kappa()
        par = continuation_params(kap)
        c12 = c12_table(spec, par, cfg.N, 100_000, k_min=0, k_max=0)
        want = _identity_scale(kap)  # beta_1 = 1
        assert abs(c12[0] - want) <= 0.01 * abs(want)

    @pytest.mark.parametrize("cid", ["A", "B"])
    def test_absolute_identity_error_small(self, cid, case_data):
        # componentwise ratios can blow up on small entries, but the
        # absolute table error stays ~2% of the coefficient scale at 10x
        # the benchmark point counts
        data = case_data(cid)
        kap = data.spec.kappa()
        scale = _identity_scale(kap)
        c12 = c12_table(data.spec, data.params, data.cfg.N, data.cfg.M2 * 10,
                        k_min=-21, k_max=19)
        ls = np.arange(0, 21)
        err_alpha = np.abs(c12[20 - ls] + scale * data.coeffs.alpha[ls])
        err_beta = np.abs(c12[20 + ls[1:]] - scale * data.coeffs.beta[ls[1:]])
        alpha_scale = np.max(np.abs(scale * data.coeffs.alpha[ls]))
        beta_scale = np.max(np.abs(scale * data.coeffs.beta[ls[1:]]))
        assert np.max(err_alpha) <= 0.02 * alpha_scale
        assert np.max(err_beta) <= 0.02 * beta_scale

    def test_doubling_points_moves_entries_below_half_percent(self):
        spec, cfg = build_case_preset("B")
        par = continuation_params(spec.kappa())
        base = c12_table(spec, par, cfg.N, 10_000, k_min=-5, k_max=5)
        fine = c12_table(spec, par, cfg.N, 20_000, k_min=-5, k_max=5)
        drift = np.abs(base - fine) / np.abs(fine)
        assert np.max(drift) < 0.005

    def test_period_crossed_endpoint_carries_kappa_factor(self):
        # with t1's argument taken one period up, the alpha comparison
        # gains the factor e^{-2 pi lambda} = 1/kappa and flips sign
        spec, cfg = build_case_preset("A")
        kap = spec.kappa()
        par = continuation_params(kap)
        alpha_up = alpha_coefficients(
            spec.theta1 + 2 * math.pi, spec.theta2, par.gamma, 5
        )
        c12 = c12_table(spec, par, cfg.N, 100_000, k_min=-3, k_max=-1)
        for l in range(3):
            want = math.exp(-2 * math.pi * par.lam) * _identity_scale(kap) * alpha_up[l]
            got = c12[2 - l]
            assert abs(got - want) <= 0.02 * max(abs(want), 1.0)


class TestFreeArcMoments:
    @pytest.mark.parametrize("cid", ["A", "B"])
    def test_closed_forms_from_series(self, cid, case_data):
        # independent oracle: the free-arc moments have exact closed forms
        #   c11_k = 2 pi i beta_{k+1} / (1+kappa)          (k >= 0)
        #   c11_{-1-l} = (2 pi i kappa / (1+kappa)) alpha_l (l >= 0)
        # so the quadrature values must sit within its endpoint-error band
        data = case_data(cid)
        kap = data.spec.kappa()
        N = data.cfg.N
        scale11 = np.max(np.abs(data.quad.c11))
        for k in (0, 1, 2, 5, 10):
            want = 2j * math.pi * data.coeffs.beta[k + 1] / (1.0 + kap)
            assert abs(data.quad.c11_at(k) - want) <= 0.03 * scale11
        for l in (0, 1, 2, 5, 10):
            want = _identity_scale(kap) * data.coeffs.alpha[l]
            assert abs(data.quad.c11_at(-1 - l) - want) <= 0.03 * scale11

    def test_symmetric_case_has_pure_imaginary_tables(self, case_data):
        # for the arc symmetric about theta = 0 the moment phases collapse:
        # every entry of both tables is purely imaginary, which is the
        # zero pattern visible in the identity-ratio plots
        data = case_data("B")
        scale = np.max(np.abs(data.quad.c11))
        assert np.max(np.abs(data.quad.c11.real)) <= 1e-10 * scale
        scale = np.max(np.abs(data.quad.c12))
        assert np.max(np.abs(data.quad.c12.real)) <= 1e-10 * scale

    def test_doubling_points_moves_entries_below_half_percent(self):
        spec, cfg = build_case_preset("B")
        par = continuation_params(spec.kappa())
        base = c11_table(spec, par, cfg.N, 10_000, k_min=-5, k_max=5)
        fine = c11_table(spec, par, cfg.N, 20_000, k_min=-5, k_max=5)
        drift = np.abs(base - fine) / np.abs(fine)
        assert np.max(drift) < 0.005


class TestQuadratureTable:
    def test_build_and_index(self, case_data):
        data = case_data("B")
        quad = data.quad
        N = data.cfg.N
        assert quad.c11.shape == (2 * N + 2,)
        assert quad.c12.shape == (2 * N + 2,)
        assert quad.c11_at(-N - 1) == quad.c11[0]
        assert quad.c12_at(N) == quad.c12[-1]
        assert quad.K0 == pytest.approx(K0_CASE_B, rel=1e-14)
        assert np.all(np.isfinite(quad.c11)) and np.all(np.isfinite(quad.c12))
