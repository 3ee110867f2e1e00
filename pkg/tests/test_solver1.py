import math

import numpy as np
import pytest

from _oracles import direct_solve
from annulus_bvp.model import (
    PLANE_STRAIN,
    ProblemSpec,
    SolverConfig,
    TractionSpectrum,
    build_case_preset,
)
from annulus_bvp.series import continuation_params, taylor_coefficients
from annulus_bvp.solver1 import (
    ConvergenceError,
    assemble_systems,
    expansion_values,
    harmonic_array,
    initial_step,
    iterate_once,
    run,
    _traction_rhs,
)


def _small_problem(traction, r=0.5, theta1=-math.pi / 2, theta2=0.0, nu=0.3):
    return ProblemSpec(
        nu=nu,
        plane_condition=PLANE_STRAIN,
        r=r,
        theta1=theta1,
        theta2=theta2,
        traction=TractionSpectrum(traction),
    )


class TestSystemAssembly:
    def test_alpha_system_structure_n2(self):
        spec, _ = build_case_preset("A")
        par = continuation_params(spec.kappa())
        coeffs = taylor_coefficients(spec, par, 2)
        systems = assemble_systems(coeffs, 2)
        a = coeffs.alpha
        np.testing.assert_array_equal(
            systems.alpha_dense, np.array([[a[0], a[1]], [0.0, a[0]]])
        )

    def test_beta_system_structure_n2(self):
        spec, _ = build_case_preset("A")
        par = continuation_params(spec.kappa())
        coeffs = taylor_coefficients(spec, par, 2)
        systems = assemble_systems(coeffs, 2)
        b = coeffs.beta
        assert systems.beta_dense.shape == (3, 3)
        assert b[1] == 1.0
        np.testing.assert_array_equal(np.diag(systems.beta_dense), np.full(3, b[1]))
        np.testing.assert_array_equal(
            systems.beta_dense[0], np.array([b[1], b[2], b[3]])
        )

    def test_harmonic_bound_enforced(self):
        spec = _small_problem({9: 1.0})
        with pytest.raises(ValueError, match="harmonic"):
            harmonic_array(spec, 8)


class TestRightHandSides:
    def test_case_a_resultant_row(self):
        spec, cfg = build_case_preset("A")
        f = harmonic_array(spec, cfg.N)
        rhs_a, rhs_b = _traction_rhs(spec, f, cfg.N)
        # i * 0.1 / 2.8 in the leading alpha row; all other alpha rows zero
        assert rhs_a[0] == pytest.approx(0.1j / 2.8, rel=1e-15)
        assert np.all(rhs_a[1:] == 0)
        assert rhs_b[0] == pytest.approx(-1.8 * 0.1j / 2.8, rel=1e-15)

    def test_case_c_constant_load_row(self):
        # the k = 0 beta row carries -r^2 (p_0 + i q_0): the boundary
        # condition fixes this sign, and the direct-solve oracle below
        # fails for the opposite choice
        spec, cfg = build_case_preset("C")
        f = harmonic_array(spec, cfg.N)
        _, rhs_b = _traction_rhs(spec, f, cfg.N)
        assert rhs_b[1] == pytest.approx(-0.25, rel=1e-15)

    def test_case_b_first_positive_row(self):
        spec, cfg = build_case_preset("B")
        f = harmonic_array(spec, cfg.N)
        _, rhs_b = _traction_rhs(spec, f, cfg.N)
        want = 2.0 * (1 - 0.3**-2) * 0.3**3 * (1.0) / 2.8  # conj(f_{-1}) = 1
        assert rhs_b[2] == pytest.approx(want, rel=1e-13)


class TestIteration:
    def test_zero_traction_converges_immediately(self):
        spec = _small_problem({})
        sol, report = run(spec, SolverConfig(N=8, M1=200, M2=200))
        assert report.Q == 1
        assert np.all(sol.d == 0)
        assert np.all(sol.A == 0) and np.all(sol.B == 0)

    def test_zero_step_is_fixed_point(self):
        spec = _small_problem({0: 1.0})
        N = 8
        par = continuation_params(spec.kappa())
        coeffs = taylor_coefficients(spec, par, N)
        systems = assemble_systems(coeffs, N)
        state = initial_step(spec, systems, coeffs, N)
        state.d_step = np.zeros_like(state.d_step)
        state.A_step, state.B_step = expansion_values(state.d_step, coeffs, N)
        nxt = iterate_once(state, spec, systems, coeffs, N)
        assert np.all(nxt.d_step == 0)

    def test_rep_cap_raises_with_history(self):
        spec = _small_problem({0: 1.0})
        with pytest.raises(ConvergenceError) as err:
            run(spec, SolverConfig(N=8, max_reps=3, M1=200, M2=200))
        assert err.value.history.shape == (3,)
        assert np.all(err.value.history > 0)

    def test_increment_history_decays_geometrically(self):
        spec, cfg = build_case_preset("B")
        _, report = run(spec, cfg)
        h = report.history
        tail = h[3:] / h[2:-1]
        assert np.all(tail < 1.0)
        # decay rate roughly constant in the tail
        assert tail[-1] == pytest.approx(tail[-5], rel=0.2)


@pytest.mark.parametrize(
    "traction,r",
    [
        ({-1: 1j}, 0.4),
        ({0: 1.0}, 0.5),
        ({1: 0.7 - 0.2j}, 0.45),
        ({-2: 0.3j, 0: 1.0, 2: -0.5}, 0.5),
    ],
)
def test_matches_one_shot_dense_solve(traction, r):
    """The accumulated increments must reproduce the one-shot dense solve
    of the full truncated constraint set (tractable at small N)."""
    spec = _small_problem(traction, r=r)
    N = 10
    d_direct = direct_solve(spec, N)
    sol, _ = run(spec, SolverConfig(N=N, max_reps=5000, M1=200, M2=200))
    scale = np.max(np.abs(d_direct))
    assert np.max(np.abs(sol.d - d_direct)) <= 1e-12 * scale


class TestConvergedInvariants:
    @pytest.mark.parametrize("cid", ["A", "B"])
    def test_single_valuedness(self, cid, case_data):
        data = case_data(cid)
        sol = data.sol1
        kap = data.spec.kappa()
        assert abs(kap * sol.a_at(-1) + sol.b_at(-1)) <= 1e-12 * max(
            abs(sol.a_at(-1)), 1.0
        )

    @pytest.mark.parametrize("cid", ["A", "B", "C", "D"])
    def test_closed_form_leading_coefficients(self, cid, case_data):
        data = case_data(cid)
        sol = data.sol1
        kap = data.spec.kappa()
        want = data.spec.traction.value(-1) * data.spec.r / (1.0 + kap)
        assert abs(sol.a_at(-1) - want) <= 1e-10
        assert abs(sol.b_at(-1) + kap * want) <= 1e-10

    @pytest.mark.parametrize("cid", ["A", "B", "C", "D"])
    def test_inner_boundary_rows_hold(self, cid, case_data):
        data = case_data(cid)
        sol = data.sol1
        spec, N = data.spec, data.cfg.N
        r = spec.r
        one_m = 1.0 - r**-2
        f = harmonic_array(spec, N)
        fmax = spec.traction.max_abs()
        for k in [*range(-N, -1), *range(0, N)]:
            lhs = (
                sol.a_at(k) * r ** float(k)
                + (k + 1) * one_m * r ** float(-k) * np.conj(sol.a_at(-k))
                - sol.b_at(k) * r ** float(-k - 2)
            )
            assert abs(lhs - f[k + N]) <= 1e-10 * fmax

    @pytest.mark.parametrize("cid", ["A", "D"])
    def test_resultant_balance(self, cid, case_data):
        data = case_data(cid)
        sol = data.sol1
        want = data.spec.traction.value(-1)
        got = (sol.a_at(-1) - sol.b_at(-1)) / data.spec.r
        assert abs(got - want) <= 1e-10
