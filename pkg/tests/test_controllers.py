import numpy as np
import pytest

from arolc.controllers import (
    ArolcConfig,
    ArolcState,
    PconConfig,
    PconState,
    adapt_gain,
    arolc_step,
    nominal_control,
    pcon_integral_error,
    pcon_step,
    sliding_variable,
    switching_control,
    uncertainty_residual,
)
from arolc.delays import DelayBuffer
from arolc.stability import GainSet

CFG = ArolcConfig.from_gains(GainSet.identity(1), alpha=2.0, epsilon=0.1,
                             gamma=1e-3, c_hat_init=1.0)


class TestSlidingVariable:
    def test_zero_error(self):
        np.testing.assert_allclose(sliding_variable(np.zeros(2), CFG), [0.0])

    def test_position_component(self):
        # bottom row of P = [0.5, 1.0]; e = [1, 0] -> s = 0.5
        np.testing.assert_allclose(sliding_variable([1.0, 0.0], CFG), [0.5])

    def test_velocity_component(self):
        np.testing.assert_allclose(sliding_variable([0.0, 1.0], CFG), [1.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            sliding_variable(np.zeros(3), CFG)


class TestNominalControl:
    def test_perfect_tracking(self):
        np.testing.assert_allclose(
            nominal_control([0.0], [0.0], [2.5], CFG), [2.5]
        )

    def test_unit_gains(self):
        np.testing.assert_allclose(nominal_control([1.0], [2.0], [0.0], CFG), [3.0])

    def test_scaled_gains(self):
        cfg = ArolcConfig(K1=2.0 * np.eye(1), K2=np.eye(1), P=CFG.P, B=CFG.B)
        np.testing.assert_allclose(nominal_control([1.0], [1.0], [1.0], cfg), [4.0])


class TestSwitchingControl:
    def test_zero_s(self):
        np.testing.assert_allclose(switching_control(np.zeros(2), 1.0, CFG), [0.0, 0.0])

    def test_outside_boundary_layer(self):
        # ||s|| = 5: unit direction scaled by alpha * c_hat = 2
        np.testing.assert_allclose(
            switching_control([3.0, 4.0], 1.0, CFG), [1.2, 1.6]
        )

    def test_inside_boundary_layer(self):
        np.testing.assert_allclose(switching_control([0.05], 1.0, CFG), [1.0])

    def test_continuity_at_boundary(self):
        direction = np.array([0.6, 0.8])
        below = switching_control((CFG.epsilon - 1e-14) * direction, 1.3, CFG)
        above = switching_control((CFG.epsilon + 1e-14) * direction, 1.3, CFG)
        assert np.abs(below - above).max() < 1e-12

    def test_magnitude_cap(self):
        rng = np.random.default_rng(0)
        for _ in range(500):
            s = rng.standard_normal(2) * 10.0 ** rng.integers(-3, 2)
            c_hat = float(rng.random() * 4 + 1e-3)
            du = switching_control(s, c_hat, CFG)
            assert np.linalg.norm(du) <= CFG.alpha * c_hat * (1 + 1e-12)

    def test_parallel_to_s(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            s = rng.standard_normal(3)
            cfg = ArolcConfig(K1=np.eye(3), K2=np.eye(3), P=np.eye(6),
                              B=np.vstack([np.zeros((3, 3)), np.eye(3)]))
            du = switching_control(s, 0.7, cfg)
            assert float(s @ du) >= 0.0


class TestAdaptGain:
    def test_floor_branch(self):
        state = ArolcState(c_hat=0.0005)
        cfg = ArolcConfig(K1=CFG.K1, K2=CFG.K2, P=CFG.P, B=CFG.B,
                          gamma=1e-3, c_hat_init=1e-3, dt_control=0.01)
        new = adapt_gain(state, [5.0], 0.01, cfg)
        # rate is +gamma while at/below the floor
        assert new.c_hat == pytest.approx(max(0.0005 + 1e-3 * 0.01, 1e-3))

    def test_growth_branch(self):
        state = ArolcState(c_hat=1.0, s_prev=np.array([1.0]), t_prev=0.0)
        new = adapt_gain(state, [2.0], 0.01, CFG)
        assert new.c_hat == pytest.approx(1.0 + 2.0 * CFG.dt_control)

    def test_decrease_branch(self):
        state = ArolcState(c_hat=1.0, s_prev=np.array([2.0]), t_prev=0.0)
        new = adapt_gain(state, [1.0], 0.01, CFG)
        assert new.c_hat == pytest.approx(1.0 - 1.0 * CFG.dt_control)

    def test_equality_goes_to_decrease(self):
        state = ArolcState(c_hat=1.0, s_prev=np.array([1.0]), t_prev=0.0)
        new = adapt_gain(state, [1.0], 0.01, CFG)  # s_dot = 0
        assert new.c_hat == pytest.approx(1.0 - 1.0 * CFG.dt_control)

    def test_first_step_conservative(self):
        state = ArolcState(c_hat=1.0)
        new = adapt_gain(state, [3.0], 0.0, CFG)
        assert new.c_hat == pytest.approx(1.0 - 3.0 * CFG.dt_control)

    def test_never_below_gamma(self):
        rng = np.random.default_rng(5)
        state = ArolcState(c_hat=CFG.gamma)
        t = 0.0
        cfg = ArolcConfig(K1=CFG.K1, K2=CFG.K2, P=CFG.P, B=CFG.B,
                          gamma=1e-3, c_hat_init=1e-3, dt_control=0.01)
        for _ in range(200):
            t += cfg.dt_control
            state = adapt_gain(state, rng.standard_normal(1) * 5.0, t, cfg)
            assert state.c_hat >= cfg.gamma

    def test_time_must_advance(self):
        state = ArolcState(c_hat=1.0, s_prev=np.array([1.0]), t_prev=0.5)
        with pytest.raises(ValueError):
            adapt_gain(state, [1.0], 0.5, CFG)


class TestArolcStep:
    def test_perfect_tracking_zero_torque(self):
        state = ArolcState(c_hat=1.0)
        desired = (np.zeros(1), np.zeros(1), np.zeros(1))
        tau, new = arolc_step(state, np.zeros(1), np.zeros(1), desired,
                              (np.eye(1), np.zeros(1)), 0.0, CFG)
        np.testing.assert_allclose(tau, [0.0])
        # s = 0 falls in the decrease/hold branch
        assert new.c_hat <= 1.0

    def test_identity_nominal_model_passthrough(self):
        state = ArolcState(c_hat=1.0)
        desired = (np.array([1.0]), np.zeros(1), np.zeros(1))
        tau, _ = arolc_step(state, np.zeros(1), np.zeros(1), desired,
                            (np.eye(1), np.zeros(1)), 0.0, CFG)
        # tau = u exactly: u_hat = 1, du = alpha c_hat sign(s) = 2
        np.testing.assert_allclose(tau, [3.0])

    def test_worked_example(self):
        # e = [1, 0], qdd_d = 0, alpha = 2, c_hat = 1, eps = 0.1, Mhat = 2,
        # Nhat = 0.5: s = 0.5, u_hat = 1, du = 2 * 1 * s/||s|| = 2, u = 3,
        # tau = 2 * 3 + 0.5 = 6.5 (hand-evaluated independently)
        state = ArolcState(c_hat=1.0)
        desired = (np.array([1.0]), np.zeros(1), np.zeros(1))
        tau, _ = arolc_step(state, np.zeros(1), np.zeros(1), desired,
                            (np.array([[2.0]]), np.array([0.5])), 0.0, CFG)
        np.testing.assert_allclose(tau, [6.5])

    def test_switching_disabled(self):
        cfg = ArolcConfig(K1=CFG.K1, K2=CFG.K2, P=CFG.P, B=CFG.B,
                          switching=False, c_hat_init=1.0)
        state = cfg.initial_state()
        desired = (np.array([1.0]), np.zeros(1), np.zeros(1))
        tau, _ = arolc_step(state, np.zeros(1), np.zeros(1), desired,
                            (np.eye(1), np.zeros(1)), 0.0, cfg)
        np.testing.assert_allclose(tau, [1.0])


class TestPcon:
    def make_state(self, h):
        return PconState(input_history=DelayBuffer(window=5.0, dim=1), h_estimate=h)

    def test_integral_constant(self):
        state = self.make_state(0.5)
        state.input_history.push(-1.0, [2.0])
        state.input_history.push(-0.01, [2.0])
        np.testing.assert_allclose(pcon_integral_error(state, 0.0), [1.0])

    def test_integral_empty(self):
        state = self.make_state(0.5)
        np.testing.assert_allclose(pcon_integral_error(state, 0.0), [0.0])

    def test_integral_linear(self):
        state = self.make_state(1.0)
        for t in np.linspace(0.0, 1.0, 21):
            state.input_history.push(float(t), [float(t)])
        np.testing.assert_allclose(pcon_integral_error(state, 1.0), [0.5], atol=1e-12)

    def test_zero_error_zero_torque(self):
        state = self.make_state(0.0)
        cfg = PconConfig(kappa=1.0, vartheta=np.eye(1), k_b=2.0)
        desired = (np.zeros(1), np.zeros(1), np.zeros(1))
        tau, _ = pcon_step(state, np.zeros(1), np.zeros(1), desired, 0.0, cfg)
        np.testing.assert_allclose(tau, [0.0])

    def test_filtered_error_arithmetic(self):
        # rho = 0 + 1 * 1 - 1 * 0.25 = 0.75, tau = 2 * 0.75 = 1.5
        state = self.make_state(0.5)
        state.input_history.push(-0.6, [0.5])
        state.input_history.push(-0.05, [0.5])
        cfg = PconConfig(kappa=1.0, vartheta=np.eye(1), k_b=2.0)
        desired = (np.array([1.0]), np.zeros(1), np.zeros(1))
        tau, _ = pcon_step(state, np.zeros(1), np.zeros(1), desired, 0.0, cfg)
        np.testing.assert_allclose(tau, [1.5])

    def test_torque_appended_to_history(self):
        state = self.make_state(0.1)
        cfg = PconConfig(kappa=1.0, vartheta=np.eye(1), k_b=2.0)
        desired = (np.array([1.0]), np.zeros(1), np.zeros(1))
        tau, state = pcon_step(state, np.zeros(1), np.zeros(1), desired, 0.0, cfg)
        np.testing.assert_allclose(state.input_history.sample(0.0), tau)

    def test_zero_vartheta_reduces_to_pd(self):
        state = self.make_state(0.5)
        state.input_history.push(-0.6, [4.0])
        state.input_history.push(-0.05, [4.0])
        cfg = PconConfig(kappa=2.0, vartheta=np.zeros((1, 1)), k_b=3.0)
        desired = (np.array([1.0]), np.array([0.5]), np.zeros(1))
        tau, _ = pcon_step(state, np.zeros(1), np.zeros(1), desired, 0.0, cfg)
        np.testing.assert_allclose(tau, [3.0 * (0.5 + 2.0 * 1.0)])


class _StubPlant:
    """Minimal plant with independently configurable true/nominal sides."""

    def __init__(self, m, n_vec, m_hat=None, n_hat=None):
        self._m = np.atleast_2d(np.asarray(m, float))
        self._n = np.atleast_1d(np.asarray(n_vec, float))
        self._mh = self._m if m_hat is None else np.atleast_2d(np.asarray(m_hat, float))
        self._nh = self._n if n_hat is None else np.atleast_1d(np.asarray(n_hat, float))
        self.dim = self._m.shape[0]

    def mass_matrix(self, q, t=None):
        return self._m

    def bias_vector(self, q, q_dot, t):
        return self._n

    def nominal_mass_matrix(self, q):
        return self._mh

    def nominal_bias_vector(self, q, q_dot):
        return self._nh


class TestUncertaintyResidual:
    def test_perfect_model_zero_delay(self):
        plant = _StubPlant(np.eye(2), np.array([0.3, -0.1]))
        q = np.array([0.2, 0.4])
        qd = np.array([1.0, -1.0])
        u = np.array([0.7, 0.7])
        qdd_d = np.array([0.1, 0.1])
        sigma = uncertainty_residual(q, qd, q, qd, u, qdd_d, qdd_d, plant, plant)
        np.testing.assert_allclose(sigma, np.zeros(2), atol=1e-14)

    def test_bias_mismatch(self):
        plant = _StubPlant(np.eye(1), [1.0], n_hat=[0.0])
        sigma = uncertainty_residual([0.0], [0.0], [0.0], [0.0], [0.0],
                                     [0.5], [0.5], plant, plant)
        np.testing.assert_allclose(sigma, [1.0])

    def test_inertia_mismatch(self):
        # sigma = (1 - 2^-1 * 1) * 4 = 2
        plant = _StubPlant([[2.0]], [0.0], m_hat=[[1.0]])
        sigma = uncertainty_residual([0.0], [0.0], [0.0], [0.0], [4.0],
                                     [0.0], [0.0], plant, plant)
        np.testing.assert_allclose(sigma, [2.0])
