import numpy as np
import pytest
from scipy.linalg import expm

from arolc.controllers import ArolcConfig, PconConfig
from arolc.delays import DelayBuffer, DelayProfile, delay_at
from arolc.plants import (
    TwoLinkParams,
    oscillator_plant,
    point_mass_plant,
    two_link_plant,
)
from arolc.sim import (
    Scenario,
    SimulationDiverged,
    error_dynamics_residual,
    simulate,
    trace_to_csv,
)
from arolc.stability import GainSet, build_error_system
from arolc.trajectories import SinusoidTrajectory

ZERO_TRAJ = SinusoidTrajectory(amplitude=(1e-12,), frequency=(1.0,))


def free_scenario(**kwargs):
    defaults = dict(
        plant=point_mass_plant(1),
        trajectory=ZERO_TRAJ,
        delay=DelayProfile("none"),
        controller="none",
        duration=2.0,
        dt=1e-3,
        dt_control=1e-2,
    )
    defaults.update(kwargs)
    return Scenario(**defaults)


class TestFreeMotion:
    def test_constant_velocity(self):
        sc = free_scenario(q0=np.array([0.5]), qdot0=np.array([1.0]))
        trace = simulate(sc)
        np.testing.assert_allclose(trace.q[:, 0], 0.5 + trace.t, atol=1e-12)

    def test_row_count(self):
        trace = simulate(free_scenario(duration=2.0, dt_control=1e-2))
        assert len(trace) == 201


class TestOscillator:
    def make(self, dt):
        return Scenario(
            plant=oscillator_plant(stiffness=1.0, mass=1.0),
            trajectory=ZERO_TRAJ,
            delay=DelayProfile("none"),
            controller="none",
            duration=5.0,
            dt=dt,
            dt_control=1e-2,
            q0=np.array([1.0]),
            qdot0=np.array([0.0]),
        )

    def test_energy_drift(self):
        trace = simulate(self.make(1e-4))
        energy = 0.5 * (trace.q_dot[:, 0] ** 2 + trace.q[:, 0] ** 2)
        assert np.abs(energy - energy[0]).max() < 1e-8

    def test_rk4_convergence_order(self):
        # analytic solution q = cos t
        errors = []
        for dt in (2e-3, 1e-3):
            trace = simulate(self.make(dt))
            errors.append(abs(trace.q[-1, 0] - np.cos(trace.t[-1])))
        ratio = errors[0] / errors[1]
        assert 8.0 < ratio < 32.0


class TestLinearClosedLoop:
    def test_matches_matrix_exponential(self):
        gains = GainSet.identity(1)
        cfg = ArolcConfig.from_gains(gains, switching=False)
        traj = SinusoidTrajectory(amplitude=(0.5,), frequency=(0.8,))
        sc = Scenario(
            plant=point_mass_plant(1),
            trajectory=traj,
            delay=DelayProfile("none"),
            controller="arolc",
            arolc=cfg,
            gains=gains,
            duration=5.0,
            dt=1e-4,
            dt_control=1e-2,
            control_mode="continuous",
            q0=np.array([traj(0.0)[0][0] - 1.0]),  # e1(0) = 1
            qdot0=np.array([traj(0.0)[1][0]]),     # e1_dot(0) = 0
        )
        trace = simulate(sc)
        a = build_error_system(gains).A
        e0 = np.array([1.0, 0.0])
        worst = 0.0
        for k, t in enumerate(trace.t):
            expected = expm(a * t) @ e0
            e1_dot = traj(float(t))[1][0] - trace.q_dot[k, 0]
            err = max(abs(trace.e1[k, 0] - expected[0]),
                      abs(e1_dot - expected[1]))
            worst = max(worst, err)
        assert worst < 1e-6


class TestEnergyConservation:
    def test_two_link_kinetic_energy(self):
        # no friction, no gravity, zero input: kinetic energy is conserved
        params = TwoLinkParams(gravity=0.0, viscous=0.0)
        plant = two_link_plant(params)
        sc = Scenario(
            plant=plant,
            trajectory=SinusoidTrajectory(amplitude=(1e-12, 1e-12),
                                          frequency=(1.0, 1.0)),
            delay=DelayProfile("none"),
            controller="none",
            duration=10.0,
            dt=1e-4,
            dt_control=1e-2,
            q0=np.array([0.3, -0.4]),
            qdot0=np.array([0.4, -0.2]),
        )
        trace = simulate(sc)
        energy = np.empty(len(trace))
        for k in range(len(trace)):
            m = plant.mass_matrix(trace.q[k])
            energy[k] = 0.5 * trace.q_dot[k] @ m @ trace.q_dot[k]
        assert np.abs(energy - energy[0]).max() < 1e-6


class TestZeroDelayDecay:
    def test_error_decays_with_exponential_envelope(self):
        # slowest mode of [[0, 1], [-1, -1]] decays like exp(-t/2):
        # at 5 s the best possible contraction is sigma_min(expm(5A)) ~ 0.06,
        # so the 1e-2 envelope is checked at 10 s
        gains = GainSet.identity(1)
        cfg = ArolcConfig.from_gains(gains, switching=False)
        traj = SinusoidTrajectory(amplitude=(1e-12,), frequency=(1.0,))
        sc = Scenario(
            plant=point_mass_plant(1), trajectory=traj,
            delay=DelayProfile("none"), controller="arolc", arolc=cfg,
            gains=gains, duration=10.0, dt=1e-3, dt_control=1e-2,
            control_mode="continuous",
            q0=np.array([-1.0]), qdot0=np.array([0.0]),
        )
        trace = simulate(sc)
        e1_dot0 = traj(0.0)[1][0] - sc.qdot0[0]
        e1_dot_end = traj(float(trace.t[-1]))[1][0] - trace.q_dot[-1, 0]
        norm0 = np.hypot(trace.e1[0, 0], e1_dot0)
        norm_end = np.hypot(trace.e1[-1, 0], e1_dot_end)
        assert norm_end < 1e-2 * norm0


class TestDeterminism:
    def make(self):
        gains = GainSet.identity(2)
        return Scenario(
            plant=two_link_plant(TwoLinkParams(viscous=0.2), mismatch=0.2,
                                 disturbance_amp=0.1),
            trajectory=SinusoidTrajectory(),
            delay=DelayProfile("S1"),
            controller="arolc",
            arolc=ArolcConfig.from_gains(gains),
            gains=gains,
            duration=1.0,
            dt=1e-3,
            dt_control=1e-2,
        )

    def test_bit_identical(self):
        t1 = simulate(self.make())
        t2 = simulate(self.make())
        assert np.array_equal(t1.q, t2.q)
        assert np.array_equal(t1.tau_cmd, t2.tau_cmd)
        assert np.array_equal(t1.c_hat, t2.c_hat)


class TestCausality:
    def test_buffer_lookup_ignores_future_commands(self):
        profile = DelayProfile("S1")  # h >= 0.02
        rng = np.random.default_rng(0)
        commands = rng.standard_normal((60, 1))
        t_star = 0.30
        buf_a = DelayBuffer(window=2.0, dim=1)
        buf_b = DelayBuffer(window=2.0, dim=1)
        for k in range(60):
            t_k = 0.01 * k
            buf_a.push(t_k, commands[k])
            changed = commands[k] + (5.0 if t_k >= t_star else 0.0)
            buf_b.push(t_k, changed)
        for t in np.arange(0.0, t_star + 0.02, 0.001):
            theta = t - delay_at(profile, float(t))
            if t < t_star + 0.02:
                np.testing.assert_array_equal(buf_a.sample(theta), buf_b.sample(theta))

    def test_closed_loop_state_lags_command_change(self):
        gains = GainSet.identity(2)
        base = dict(
            plant=two_link_plant(TwoLinkParams(), mismatch=0.1),
            delay=DelayProfile("S1"),
            controller="arolc",
            arolc=ArolcConfig.from_gains(gains),
            gains=gains,
            duration=1.0,
            dt=1e-3,
            dt_control=1e-2,
        )
        t_star = 0.5
        shifted = SinusoidTrajectory(amplitude=(0.5, 0.3), frequency=(0.5, 0.7))

        class SwitchedTraj:
            dim = 2
            diameter = 1.0

            def __call__(self, t):
                qd, qd_dot, qd_ddot = shifted(t)
                if t >= t_star:
                    qd = qd + 0.2
                return qd, qd_dot, qd_ddot

        tr_a = simulate(Scenario(trajectory=shifted, **base))
        tr_b = simulate(Scenario(trajectory=SwitchedTraj(), **base))
        rows_before = tr_a.t < t_star + 0.015  # min delay is 0.02
        np.testing.assert_array_equal(tr_a.q[rows_before], tr_b.q[rows_before])
        np.testing.assert_array_equal(
            tr_a.tau_applied[rows_before], tr_b.tau_applied[rows_before]
        )
        # the commands themselves do change right at t_star
        row_at = np.searchsorted(tr_b.t, t_star)
        assert not np.allclose(tr_a.tau_cmd[row_at], tr_b.tau_cmd[row_at])


class TestErrorDynamicsIdentity:
    def test_short_mismatched_run(self):
        gains = GainSet.identity(2)
        sc = Scenario(
            plant=two_link_plant(TwoLinkParams(viscous=0.1), mismatch=0.2),
            trajectory=SinusoidTrajectory(),
            delay=DelayProfile("S1"),
            controller="arolc",
            arolc=ArolcConfig.from_gains(gains),
            gains=gains,
            duration=2.0,
            dt=1e-4,
            dt_control=1e-2,
        )
        trace = simulate(sc, diagnostics=True)
        times, resid = error_dynamics_residual(trace, sc)
        assert len(times) > 1000
        assert resid.max() <= 1e-4


class TestWarningsAndErrors:
    def test_margin_warning(self):
        gains = GainSet.identity(2)
        sc = Scenario(
            plant=two_link_plant(TwoLinkParams()),
            trajectory=SinusoidTrajectory(),
            delay=DelayProfile("S2"),  # peak 0.125 s >= margin 0.1249 s
            controller="arolc",
            arolc=ArolcConfig.from_gains(gains),
            gains=gains,
            duration=0.1,
            dt=1e-3,
            dt_control=1e-2,
        )
        with pytest.warns(UserWarning, match="delay margin"):
            simulate(sc)

    def test_zero_duration_rejected(self):
        with pytest.raises(ValueError, match="duration"):
            simulate(free_scenario(duration=0.0))

    def test_dt_coarser_than_control_rejected(self):
        with pytest.raises(ValueError):
            simulate(free_scenario(dt=0.02, dt_control=0.01))

    def test_divergence_carries_partial_trace(self):
        sc = Scenario(
            plant=two_link_plant(TwoLinkParams()),
            trajectory=SinusoidTrajectory(),
            delay=DelayProfile("S4"),
            controller="pcon",
            pcon=PconConfig(kappa=50.0, vartheta=np.eye(2), k_b=2000.0),
            duration=20.0,
            dt=1e-3,
            dt_control=1e-2,
        )
        with pytest.raises(SimulationDiverged) as excinfo:
            simulate(sc)
        exc = excinfo.value
        assert 0.0 < exc.time <= 20.0
        assert len(exc.partial_trace) >= 1


class TestTraceCsv:
    def test_header_and_roundtrip(self, tmp_path):
        trace = simulate(free_scenario(duration=0.5))
        path = tmp_path / "trace.csv"
        trace_to_csv(trace, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,q_0,qd_0,e1_0,tau_cmd_0,tau_app_0,c_hat,s_norm,h"
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape == (len(trace), 9)
        np.testing.assert_allclose(data[:, 0], trace.t, atol=1e-9)
