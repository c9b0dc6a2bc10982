"""Deterministic fixed-step simulation of the input-delayed closed loop.

The plant state (q, q_dot) is integrated with classical RK4 at a fixed step
dt. The controller runs every dt_control on the sampled state; its output
is stamped with the computation instant and pushed into a command buffer.
The actuator receives tau_applied(t) = buffer(t - h(t)), so the delay acts
between command computation and application, and the integrator sees the
applied input as a known function of time (method-of-steps treatment; only
the input is delayed, never the state).

Two control modes exist:

* "sampled" (default): zero-order-hold commands at the control rate,
  routed through the delay buffer. This is the realistic pathway.
* "continuous": the control law is re-evaluated inside every integrator
  stage from the stage state. Only valid for zero-delay scenarios; it
  realizes the exact continuous closed loop that analytic oracles
  (matrix exponentials) describe.

``simulate`` returns a Trace sampled at the control rate. With
``diagnostics=True`` the trace additionally carries the fine-grid state
history and the per-command controller records needed to check the
delayed error-dynamics identity offline (``error_dynamics_residual``).
"""

from __future__ import annotations

import warnings
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .controllers import (
    ArolcConfig,
    PconConfig,
    PconState,
    _arolc_step_full,
    nominal_control,
    pcon_step,
    sliding_variable,
    switching_control,
    uncertainty_residual,
)
from .delays import DelayBuffer, DelayProfile, delay_at, max_delay
from .plants import PlantModel
from .stability import GainSet, delay_margin

__all__ = [
    "Scenario",
    "Trace",
    "FineRecord",
    "SimulationDiverged",
    "simulate",
    "trace_to_csv",
    "error_dynamics_residual",
    "TRACE_FLOAT_FORMAT",
]

TRACE_FLOAT_FORMAT = "%.9g"

_DIVERGENCE_LIMIT = 1e8


class SimulationDiverged(RuntimeError):
    """Raised when the state leaves the finite range; carries the failure
    time and the trace accumulated so far."""

    def __init__(self, time: float, partial_trace: "Trace"):
        super().__init__(f"simulation diverged at t = {time:.6g} s")
        self.time = time
        self.partial_trace = partial_trace


@dataclass
class Scenario:
    """Everything needed for one closed-loop run."""

    plant: PlantModel
    trajectory: object
    delay: DelayProfile = field(default_factory=lambda: DelayProfile("none"))
    controller: str = "none"  # arolc | pcon | pconf | none
    arolc: ArolcConfig | None = None
    pcon: PconConfig | None = None
    gains: GainSet | None = None
    duration: float = 10.0
    dt: float = 1e-4
    dt_control: float = 1e-2
    seed: int = 0
    q0: np.ndarray | None = None
    qdot0: np.ndarray | None = None
    control_mode: str = "sampled"
    pconf_h: float = 0.0  # fixed integral window for the pconf variant
    label: str = ""
    meta: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.duration <= 0.0:
            raise ValueError("duration > 0 required")
        if self.dt <= 0.0 or self.dt_control <= 0.0:
            raise ValueError("dt and dt_control must be positive")
        if self.dt > self.dt_control + 1e-15:
            raise ValueError("dt_integration must not exceed dt_control")
        steps = round(self.dt_control / self.dt)
        if steps < 1 or abs(steps * self.dt - self.dt_control) > 1e-9 * self.dt_control:
            raise ValueError("dt_control must be an integer multiple of dt")
        if self.controller not in ("arolc", "pcon", "pconf", "none"):
            raise ValueError(f"unknown controller kind {self.controller!r}")
        if self.controller == "arolc" and self.arolc is None:
            raise ValueError("arolc controller requires an ArolcConfig")
        if self.controller in ("pcon", "pconf") and self.pcon is None:
            raise ValueError("pcon controller requires a PconConfig")
        if self.control_mode not in ("sampled", "continuous"):
            raise ValueError(f"unknown control mode {self.control_mode!r}")
        if self.control_mode == "continuous" and max_delay(self.delay) > 0.0:
            raise ValueError("continuous control mode requires zero delay")
        if self.control_mode == "continuous" and self.controller in ("pcon", "pconf"):
            raise ValueError("continuous control mode supports arolc or none")


@dataclass
class FineRecord:
    """Integration-rate state history plus per-command controller records."""

    t: np.ndarray
    q: np.ndarray
    q_dot: np.ndarray
    cmd_t: np.ndarray
    cmd_q: np.ndarray
    cmd_q_dot: np.ndarray
    cmd_e1: np.ndarray
    cmd_e1_dot: np.ndarray
    cmd_u: np.ndarray
    cmd_du: np.ndarray
    cmd_tau: np.ndarray


@dataclass
class Trace:
    """Control-rate time series of one run."""

    t: np.ndarray
    q: np.ndarray
    q_dot: np.ndarray
    q_desired: np.ndarray
    e1: np.ndarray
    tau_cmd: np.ndarray
    tau_applied: np.ndarray
    c_hat: np.ndarray
    s_norm: np.ndarray
    h: np.ndarray
    fine: FineRecord | None = None

    def __len__(self) -> int:
        return len(self.t)

    @property
    def n(self) -> int:
        return self.q.shape[1]


def _rk4_step(rhs, t, y, dt):
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k1)
    k3 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate(sc: Scenario, diagnostics: bool = False) -> Trace:
    """Run the scenario and return its Trace.

    Deterministic: identical scenarios produce bit-identical traces. Raises
    SimulationDiverged (with the partial trace attached) if the state blows
    up. Emits a warning when an adaptive-robust run is configured with a
    peak delay at or beyond the Razumikhin margin of its gain set.
    """
    sc.validate()
    plant = sc.plant
    n = plant.dim
    profile = sc.delay
    trajectory = sc.trajectory

    if sc.controller == "arolc" and sc.gains is not None:
        margin = delay_margin(sc.gains)
        if max_delay(profile) >= margin:
            warnings.warn(
                f"peak input delay {max_delay(profile):.4g} s reaches the "
                f"delay margin {margin:.4g} s; boundedness is not guaranteed",
                stacklevel=2,
            )

    steps_per_control = round(sc.dt_control / sc.dt)
    n_periods = max(1, round(sc.duration / sc.dt_control))
    n_rows = n_periods + 1

    qd0 = trajectory(0.0)[0]
    q = np.array(sc.q0, dtype=float) if sc.q0 is not None else np.asarray(qd0, float).copy()
    q_dot = np.array(sc.qdot0, dtype=float) if sc.qdot0 is not None else np.zeros(n)
    if q.shape != (n,) or q_dot.shape != (n,):
        raise ValueError("initial state has wrong dimension")
    y = np.concatenate([q, q_dot])

    window = max(max_delay(profile), sc.pconf_h) + 5.0 * sc.dt_control + 0.05
    buf = DelayBuffer(window=window, dim=n)

    arolc_state = sc.arolc.initial_state() if sc.controller == "arolc" else None
    pcon_state = None
    if sc.controller in ("pcon", "pconf"):
        pcon_state = PconState(input_history=buf, h_estimate=0.0)

    sampled = sc.control_mode == "sampled"
    held = {"tau": np.zeros(n),
            "c_hat": arolc_state.c_hat if arolc_state is not None else 0.0}

    def continuous_tau(t, qq, qq_dot):
        # control law re-evaluated at the integrator stage; the adaptive
        # gain stays the row value (it is a slow state of the controller)
        cfg = sc.arolc
        qd, qd_dot, qd_ddot = trajectory(t)
        e1 = np.asarray(qd, float) - qq
        e1_dot = np.asarray(qd_dot, float) - qq_dot
        u = nominal_control(e1, e1_dot, qd_ddot, cfg)
        if cfg.switching:
            s = sliding_variable(np.concatenate([e1, e1_dot]), cfg)
            u = u + switching_control(s, held["c_hat"], cfg)
        return plant.nominal_mass_matrix(qq) @ u + \
            plant.nominal_bias_vector(qq, qq_dot)

    def rhs(t, yy):
        qq = yy[:n]
        qq_dot = yy[n:]
        if sampled:
            tau = buf.sample(t - delay_at(profile, t))
        elif sc.controller == "arolc":
            tau = continuous_tau(t, qq, qq_dot)
        else:
            tau = held["tau"]
        acc = plant.accel(qq, qq_dot, tau, t)
        out = np.empty(2 * n)
        out[:n] = qq_dot
        out[n:] = acc
        return out

    # control-rate records
    ts = np.zeros(n_rows)
    qs = np.zeros((n_rows, n))
    q_dots = np.zeros((n_rows, n))
    q_des = np.zeros((n_rows, n))
    e1s = np.zeros((n_rows, n))
    tau_cmds = np.zeros((n_rows, n))
    tau_apps = np.zeros((n_rows, n))
    c_hats = np.zeros(n_rows)
    s_norms = np.zeros(n_rows)
    hs = np.zeros(n_rows)

    record_fine = diagnostics
    if record_fine:
        n_fine = n_periods * steps_per_control + 1
        fine_t = np.zeros(n_fine)
        fine_q = np.zeros((n_fine, n))
        fine_qd = np.zeros((n_fine, n))
        cmd_log: dict[str, list] = {k: [] for k in
                                    ("t", "q", "q_dot", "e1", "e1_dot", "u", "du", "tau")}
    fine_idx = 0

    def build_trace(rows: int) -> Trace:
        fine = None
        if record_fine:
            fine = FineRecord(
                t=fine_t[:fine_idx + 1].copy(),
                q=fine_q[:fine_idx + 1].copy(),
                q_dot=fine_qd[:fine_idx + 1].copy(),
                cmd_t=np.array(cmd_log["t"]),
                cmd_q=np.array(cmd_log["q"]),
                cmd_q_dot=np.array(cmd_log["q_dot"]),
                cmd_e1=np.array(cmd_log["e1"]),
                cmd_e1_dot=np.array(cmd_log["e1_dot"]),
                cmd_u=np.array(cmd_log["u"]),
                cmd_du=np.array(cmd_log["du"]),
                cmd_tau=np.array(cmd_log["tau"]),
            )
        return Trace(
            t=ts[:rows].copy(), q=qs[:rows].copy(), q_dot=q_dots[:rows].copy(),
            q_desired=q_des[:rows].copy(), e1=e1s[:rows].copy(),
            tau_cmd=tau_cmds[:rows].copy(), tau_applied=tau_apps[:rows].copy(),
            c_hat=c_hats[:rows].copy(), s_norm=s_norms[:rows].copy(),
            h=hs[:rows].copy(), fine=fine,
        )

    for k in range(n_rows):
        t_k = k * sc.dt_control
        qq = y[:n]
        qq_dot = y[n:]
        desired = trajectory(t_k)

        c_hat_row = 0.0
        s_norm_row = 0.0
        if sc.controller == "arolc":
            data = _arolc_step_full(
                arolc_state, qq, qq_dot, desired,
                (plant.nominal_mass_matrix(qq),
                 plant.nominal_bias_vector(qq, qq_dot)),
                t_k, sc.arolc,
            )
            tau_cmd = data.tau
            arolc_state = data.state
            c_hat_row = arolc_state.c_hat
            s_norm_row = float(np.linalg.norm(data.s))
            if sampled:
                buf.push(t_k, tau_cmd)
            else:
                held["tau"] = tau_cmd
                held["c_hat"] = arolc_state.c_hat
            if record_fine:
                cmd_log["t"].append(t_k)
                cmd_log["q"].append(qq.copy())
                cmd_log["q_dot"].append(qq_dot.copy())
                cmd_log["e1"].append(data.e1)
                cmd_log["e1_dot"].append(data.e1_dot)
                cmd_log["u"].append(data.u)
                cmd_log["du"].append(data.du)
                cmd_log["tau"].append(tau_cmd)
        elif sc.controller in ("pcon", "pconf"):
            pcon_state.h_estimate = (
                sc.pconf_h if sc.controller == "pconf"
                else delay_at(profile, t_k)
            )
            tau_cmd, pcon_state = pcon_step(
                pcon_state, qq, qq_dot, desired, t_k, sc.pcon
            )
        else:
            tau_cmd = np.zeros(n)
            if sampled:
                buf.push(t_k, tau_cmd)
            else:
                held["tau"] = tau_cmd

        h_k = delay_at(profile, t_k)
        ts[k] = t_k
        qs[k] = qq
        q_dots[k] = qq_dot
        q_des[k] = desired[0]
        e1s[k] = np.asarray(desired[0], float) - qq
        tau_cmds[k] = tau_cmd
        tau_apps[k] = buf.sample(t_k - h_k) if sampled else tau_cmd
        c_hats[k] = c_hat_row
        s_norms[k] = s_norm_row
        hs[k] = h_k

        if record_fine and k == 0:
            fine_t[0] = 0.0
            fine_q[0] = qq
            fine_qd[0] = qq_dot

        if k == n_rows - 1:
            break

        for i in range(steps_per_control):
            t = t_k + i * sc.dt
            y = _rk4_step(rhs, t, y, sc.dt)
            if not np.all(np.isfinite(y)) or np.abs(y).max() > _DIVERGENCE_LIMIT:
                raise SimulationDiverged(t + sc.dt, build_trace(k + 1))
            if record_fine:
                fine_idx += 1
                fine_t[fine_idx] = t + sc.dt
                fine_q[fine_idx] = y[:n]
                fine_qd[fine_idx] = y[n:]

    return build_trace(n_rows)


def trace_to_csv(trace: Trace, path) -> None:
    """Write the control-rate trace with the canonical column layout."""
    n = trace.n
    header = ["t"]
    header += [f"q_{i}" for i in range(n)]
    header += [f"qd_{i}" for i in range(n)]
    header += [f"e1_{i}" for i in range(n)]
    header += [f"tau_cmd_{i}" for i in range(n)]
    header += [f"tau_app_{i}" for i in range(n)]
    header += ["c_hat", "s_norm", "h"]
    data = np.column_stack([
        trace.t, trace.q, trace.q_desired, trace.e1,
        trace.tau_cmd, trace.tau_applied,
        trace.c_hat, trace.s_norm, trace.h,
    ])
    np.savetxt(path, data, fmt=TRACE_FLOAT_FORMAT, delimiter=",",
               header=",".join(header), comments="")


def error_dynamics_residual(trace: Trace, sc: Scenario,
                            warmup: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Check the delayed error-dynamics identity along an adaptive-robust run.

    For every fine-grid instant t the realized error acceleration
    (central difference of e1_dot) is compared against

        -K2 e1_dot(t_c) - K1 e1(t_c) + sigma(t) - du(t_c)

    evaluated on the command records t_c bracketing the delay lookup
    t - h(t), blended with the same interpolation weight the actuator
    buffer uses; sigma comes from ``uncertainty_residual``. Returns
    (times, residual 2-norms) for all checked instants, skipping the
    warmup interval and lookups into the pre-command past.

    Requires a trace produced with diagnostics=True.
    """
    if trace.fine is None:
        raise ValueError("error_dynamics_residual needs a diagnostics trace")
    if sc.controller != "arolc" or sc.arolc is None:
        raise ValueError("the identity applies to adaptive-robust runs")
    fine = trace.fine
    cfg = sc.arolc
    plant = sc.plant
    trajectory = sc.trajectory
    profile = sc.delay

    times = fine.t
    dt = times[1] - times[0]
    n_pts = len(times)
    n = trace.n

    qd_d = np.zeros((n_pts, n))
    qd_dot_d = np.zeros((n_pts, n))
    qd_ddot_d = np.zeros((n_pts, n))
    for i, t in enumerate(times):
        qd_d[i], qd_dot_d[i], qd_ddot_d[i] = trajectory(float(t))
    e1_dot = qd_dot_d - fine.q_dot
    # central difference of the realized error rate
    e1_ddot = (e1_dot[2:] - e1_dot[:-2]) / (2.0 * dt)

    cmd_t = fine.cmd_t
    cmd_times = list(cmd_t)

    def rhs_for(j: int, i: int, t: float) -> np.ndarray:
        sigma = uncertainty_residual(
            fine.q[i], fine.q_dot[i], fine.cmd_q[j], fine.cmd_q_dot[j],
            fine.cmd_u[j], qd_ddot_d[i], trajectory(float(cmd_t[j]))[2],
            plant, plant, t=t,
        )
        return (-cfg.K2 @ fine.cmd_e1_dot[j] - cfg.K1 @ fine.cmd_e1[j]
                + sigma - fine.cmd_du[j])

    out_t = []
    out_r = []
    for i in range(1, n_pts - 1):
        t = float(times[i])
        if t < warmup:
            continue
        theta = t - delay_at(profile, t)
        idx = bisect_right(cmd_times, theta)
        if idx == 0:
            continue  # lookup precedes the first command
        if idx == len(cmd_times):
            rhs_val = rhs_for(idx - 1, i, t)
        else:
            t0, t1 = cmd_t[idx - 1], cmd_t[idx]
            lam = (theta - t0) / (t1 - t0)
            rhs_val = (1.0 - lam) * rhs_for(idx - 1, i, t) + lam * rhs_for(idx, i, t)
        out_t.append(t)
        out_r.append(float(np.linalg.norm(e1_ddot[i - 1] - rhs_val)))
    return np.array(out_t), np.array(out_r)
