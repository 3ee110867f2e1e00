import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from annulus_bvp.fields import (
    RigidBody,
    SeriesSolution,
    assemble_solution,
    clamped_arc_angles,
    displacement_at,
    displacement_complex_on_circle,
    free_arc_angles,
    lanczos_filter,
    rigid_body_constant,
    stress_at,
    stress_on_circle,
)
from annulus_bvp.model import (
    PLANE_STRAIN,
    ProblemSpec,
    TractionSpectrum,
    build_case_preset,
)
from annulus_bvp.series import continuation_params, taylor_coefficients


def _solution_with(spec, N, **coeffs):
    """SeriesSolution with hand-chosen expansion values, everything else zero."""
    A = np.zeros(2 * N + 1, dtype=complex)
    B = np.zeros(2 * N + 1, dtype=complex)
    for k, v in coeffs.get("A", {}).items():
        A[k + N] = v
    for k, v in coeffs.get("B", {}).items():
        B[k + N] = v
    return SeriesSolution(d=np.zeros(2 * N + 1, complex), A=A, B=B, N=N, spec=spec)


@pytest.fixture(scope="module")
def plain_spec():
    return ProblemSpec(
        nu=0.3,
        plane_condition=PLANE_STRAIN,
        r=0.5,
        theta1=-math.pi / 2,
        theta2=0.0,
        traction=TractionSpectrum({0: 1.0}),
    )


class TestLanczosFilter:
    def test_center_value(self):
        assert lanczos_filter(0, 60) == 1.0

    @pytest.mark.parametrize("N", [4, 60, 61])
    def test_edge_values_vanish(self, N):
        assert lanczos_filter(N, N) == 0.0
        assert lanczos_filter(-N, N) == 0.0

    def test_half_order(self):
        assert lanczos_filter(30, 60) == pytest.approx(2.0 / math.pi, rel=1e-15)

    @given(st.integers(2, 120), st.data())
    def test_even_in_k(self, N, data):
        k = data.draw(st.integers(-N, N))
        assert lanczos_filter(k, N) == lanczos_filter(-k, N)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            lanczos_filter(61, 60)


class TestAssembleSolution:
    def test_zero_coefficients(self, plain_spec):
        par = continuation_params(plain_spec.kappa())
        coeffs = taylor_coefficients(plain_spec, par, 6)
        sol = assemble_solution(np.zeros(13, complex), coeffs, plain_spec)
        assert np.all(sol.A == 0) and np.all(sol.B == 0)

    def test_single_coefficient_convolution(self, plain_spec):
        # d_{-1} = 1 alone: A_k = alpha_{k+1} for k >= -1,
        # B_k = beta_{-1-k} for k <= -2, zero elsewhere
        N = 6
        par = continuation_params(plain_spec.kappa())
        coeffs = taylor_coefficients(plain_spec, par, N)
        d = np.zeros(2 * N + 1, complex)
        d[N - 1] = 1.0
        sol = assemble_solution(d, coeffs, plain_spec)
        for k in range(-N, N + 1):
            if k >= -1:
                assert sol.a_at(k) == pytest.approx(coeffs.alpha[k + 1], rel=1e-15)
                assert sol.b_at(k) == 0.0
            else:
                assert sol.a_at(k) == 0.0
                assert sol.b_at(k) == pytest.approx(coeffs.beta[-1 - k], rel=1e-15)

    def test_length_mismatch_rejected(self, plain_spec):
        par = continuation_params(plain_spec.kappa())
        coeffs = taylor_coefficients(plain_spec, par, 6)
        with pytest.raises(ValueError):
            assemble_solution(np.zeros(5, complex), coeffs, plain_spec)


class TestStressEvaluation:
    def test_zero_solution(self, plain_spec):
        sol = _solution_with(plain_spec, 8)
        assert stress_at(sol, 0.7, 1.0) == (0.0, 0.0, 0.0)

    def test_uniform_biaxial_from_constant_potential(self, plain_spec):
        # A_0 = 1 alone: trace sum gives Sigma_theta + Sigma_rho = 4,
        # radial sum gives Sigma_rho = 1 + (1 - rho^{-2}), shear zero
        sol = _solution_with(plain_spec, 8, A={0: 1.0})
        for rho in (0.5, 0.8, 1.0):
            s_theta, s_rho, s_rt = stress_at(sol, rho, 0.3)
            assert s_rho == pytest.approx(2.0 - rho**-2, rel=1e-13)
            assert s_theta == pytest.approx(4.0 - (2.0 - rho**-2), rel=1e-13)
            assert s_rt == pytest.approx(0.0, abs=1e-14)

    def test_outside_annulus_rejected(self, plain_spec):
        sol = _solution_with(plain_spec, 8, A={0: 1.0})
        with pytest.raises(ValueError):
            stress_at(sol, 0.2, 0.0)
        with pytest.raises(ValueError):
            stress_at(sol, 1.2, 0.0)

    def test_vectorized_matches_scalar(self, case_data):
        sol = case_data("B").sol1
        thetas = np.linspace(0, 2 * math.pi, 7)
        s_theta, s_rho, s_rt = stress_on_circle(sol, 0.6, thetas)
        for i, th in enumerate(thetas):
            got = stress_at(sol, 0.6, float(th))
            assert got == pytest.approx((s_theta[i], s_rho[i], s_rt[i]), rel=1e-12)

    def test_inner_boundary_reproduces_constant_load(self, case_data):
        # benchmark case with f = 1: the k = 0 harmonic passes the filter
        # unchanged, so the inner radial stress is exact
        data = case_data("C")
        _, s_rho, s_rt = stress_at(data.sol1, data.spec.r, math.pi)
        assert s_rho == pytest.approx(1.0, abs=1e-2)
        assert s_rt == pytest.approx(0.0, abs=1e-2)


class TestDisplacementEvaluation:
    def test_zero_solution(self, plain_spec):
        sol = _solution_with(plain_spec, 8)
        assert displacement_at(sol, RigidBody(), 0.7, 0.5) == (0.0, 0.0)

    def test_constant_potential_closed_form(self, plain_spec):
        # A_0 = 1 alone: 2(U + iV) = [kappa rho - rho (1 - rho^{-2})] e^{i theta}
        sol = _solution_with(plain_spec, 8, A={0: 1.0})
        kap = plain_spec.kappa()
        for rho, th in ((0.6, 0.0), (0.9, 1.1), (1.0, -2.0)):
            got = displacement_complex_on_circle(sol, rho, np.array([th]))[0]
            want = 0.5 * (kap * rho - rho * (1 - rho**-2)) * np.exp(1j * th)
            assert got == pytest.approx(want, rel=1e-13)

    def test_log_term_uses_leading_coefficients(self, plain_spec):
        # A_{-1}, B_{-1} alone: constant-harmonic part is
        # F(1)/2 (kappa A_{-1} - B_{-1}) log(rho)
        N = 8
        sol = _solution_with(plain_spec, N, A={-1: 0.2 + 0.1j}, B={-1: -0.3j})
        kap = plain_spec.kappa()
        rho = 0.7
        got = displacement_complex_on_circle(sol, rho, np.array([0.4]))[0]
        F1 = lanczos_filter(1, N)
        want = 0.5 * F1 * (kap * (0.2 + 0.1j) - (-0.3j)) * math.log(rho)
        assert got == pytest.approx(want, rel=1e-13)

    def test_angular_periodicity(self, case_data):
        sol = case_data("A").sol1
        w1 = displacement_complex_on_circle(sol, 0.8, np.array([0.3]))[0]
        w2 = displacement_complex_on_circle(sol, 0.8, np.array([0.3 + 2 * math.pi]))[0]
        assert abs(w1 - w2) <= 1e-13 * max(abs(w1), 1.0)

    def test_rigid_body_shift_subtracted(self, plain_spec):
        sol = _solution_with(plain_spec, 8, A={0: 1.0})
        base = displacement_at(sol, RigidBody(), 0.8, 0.2)
        shifted = displacement_at(sol, RigidBody(Dx=0.25, Dy=-1.5), 0.8, 0.2)
        assert shifted[0] == pytest.approx(base[0] - 0.25, rel=1e-13)
        assert shifted[1] == pytest.approx(base[1] + 1.5, rel=1e-13)


class TestRigidBodyConstant:
    def test_zero_solution(self, plain_spec):
        sol = _solution_with(plain_spec, 8)
        rb = rigid_body_constant(sol)
        assert rb.shift == 0.0

    @pytest.mark.parametrize("cid", ["A", "D"])
    def test_clamped_arc_mean_vanishes_after_subtraction(self, cid, case_data):
        data = case_data(cid)
        rb = rigid_body_constant(data.sol1)
        angles = clamped_arc_angles(data.spec, 360)
        w = displacement_complex_on_circle(data.sol1, 1.0, angles, rb)
        assert abs(np.mean(w)) <= 1e-14 * max(1.0, abs(rb.shift))

    def test_arc_shorter_than_exclusions_rejected(self):
        spec = ProblemSpec(
            nu=0.3,
            plane_condition=PLANE_STRAIN,
            r=0.5,
            theta1=0.0,
            theta2=math.radians(8.0),
            traction=TractionSpectrum({0: 1.0}),
        )
        sol = _solution_with(spec, 8, A={0: 1.0})
        with pytest.raises(ValueError, match="exclusion"):
            rigid_body_constant(sol)


class TestArcSampling:
    def test_clamped_arc_range(self, plain_spec):
        angles = clamped_arc_angles(plain_spec, 11)
        assert angles[0] == pytest.approx(-math.pi / 2 + math.radians(5))
        assert angles[-1] == pytest.approx(-math.radians(5))

    def test_free_arc_range(self, plain_spec):
        angles = free_arc_angles(plain_spec, 11)
        assert angles[0] == pytest.approx(math.radians(5))
        assert angles[-1] == pytest.approx(3 * math.pi / 2 - math.radians(5))
