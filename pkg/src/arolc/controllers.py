"""Discrete-time control-step implementations.

Two controllers are provided:

* AROLC, the adaptive-robust outer-loop law. The commanded torque is
  tau = Mhat(q) u + Nhat(q, q_dot) with auxiliary input u = u_hat + du:
  a nominal part u_hat = qdd_d + K2 e1_dot + K1 e1 and a switching part du
  whose magnitude alpha * c_hat adapts online from the sliding variable
  s = B^T P e. No knowledge of the delay or of uncertainty bounds is used.

* PCON, a predictor-style baseline. It filters the tracking error with the
  integral of the recent input history over the delay window,
  rho = e1_dot + kappa e1 - vartheta * integral(tau, t-h..t), tau = k_b rho,
  and therefore needs the delay (or an estimate of it) to be supplied.

The switching law uses a boundary layer of width epsilon: outside it the
robust term has constant magnitude alpha * c_hat along s/||s||, inside it
the term is linear in s, which keeps du continuous and avoids chattering.

The adaptive gain c_hat integrates
    +||s||  while c_hat > gamma and s . s_dot > 0   (error growing)
    -||s||  while c_hat > gamma and s . s_dot <= 0  (error shrinking)
    +gamma  while c_hat <= gamma                    (floor recovery)
by explicit Euler at the control period, clamped below at gamma. s_dot is
estimated by a backward difference of consecutive sliding variables; the
first step, having no history, takes the decrease branch so the gain never
grows on estimator startup transients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .delays import DelayBuffer
from .stability import GainSet, build_error_system

__all__ = [
    "ArolcConfig",
    "ArolcState",
    "PconConfig",
    "PconState",
    "sliding_variable",
    "nominal_control",
    "switching_control",
    "adapt_gain",
    "arolc_step",
    "pcon_integral_error",
    "pcon_step",
    "uncertainty_residual",
]


@dataclass(frozen=True)
class ArolcConfig:
    """Gains and scalars of the adaptive-robust controller."""

    K1: np.ndarray
    K2: np.ndarray
    P: np.ndarray
    B: np.ndarray
    alpha: float = 2.0
    epsilon: float = 0.1
    gamma: float = 1e-3
    c_hat_init: float = 1e-3
    dt_control: float = 0.01
    switching: bool = True  # diagnostic switch; False disables du entirely

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if self.epsilon <= 0.0 or self.gamma <= 0.0:
            raise ValueError("epsilon and gamma must be positive")
        if self.c_hat_init < self.gamma:
            raise ValueError("c_hat_init must be at least gamma")
        if self.dt_control <= 0.0:
            raise ValueError("dt_control must be positive")
        object.__setattr__(self, "K1", np.asarray(self.K1, dtype=float))
        object.__setattr__(self, "K2", np.asarray(self.K2, dtype=float))
        object.__setattr__(self, "P", np.asarray(self.P, dtype=float))
        object.__setattr__(self, "B", np.asarray(self.B, dtype=float))

    @property
    def n(self) -> int:
        return self.K1.shape[0]

    @classmethod
    def from_gains(cls, gains: GainSet, **kwargs) -> "ArolcConfig":
        """Build the config from a GainSet, solving for P along the way."""
        system = build_error_system(gains)
        return cls(K1=gains.K1, K2=gains.K2, P=system.P, B=system.B, **kwargs)

    def initial_state(self) -> "ArolcState":
        return ArolcState(c_hat=self.c_hat_init)


@dataclass(frozen=True)
class ArolcState:
    """Adaptive gain plus the memory used to estimate sign(s . s_dot)."""

    c_hat: float
    s_prev: np.ndarray | None = None
    t_prev: float = -np.inf


def sliding_variable(e: np.ndarray, cfg: ArolcConfig) -> np.ndarray:
    """s = B^T P e for the stacked error e = [e1; e1_dot]."""
    e = np.asarray(e, dtype=float)
    if e.shape[0] != 2 * cfg.n:
        raise ValueError(f"expected error of length {2 * cfg.n}, got {e.shape[0]}")
    return cfg.B.T @ (cfg.P @ e)


def nominal_control(e1, e1_dot, qdd_desired, cfg: ArolcConfig) -> np.ndarray:
    """u_hat = qdd_d + K2 e1_dot + K1 e1."""
    return np.asarray(qdd_desired, float) + cfg.K2 @ np.asarray(e1_dot, float) \
        + cfg.K1 @ np.asarray(e1, float)


def switching_control(s: np.ndarray, c_hat: float, cfg: ArolcConfig) -> np.ndarray:
    """Robust term: alpha c_hat s/||s|| outside the boundary layer,
    alpha c_hat s/epsilon inside it (continuous at ||s|| = epsilon)."""
    if c_hat <= 0.0:
        raise ValueError("c_hat must be positive")
    s = np.asarray(s, dtype=float)
    norm = float(np.linalg.norm(s))
    if norm >= cfg.epsilon:
        return (cfg.alpha * c_hat / norm) * s
    return (cfg.alpha * c_hat / cfg.epsilon) * s


def adapt_gain(state: ArolcState, s: np.ndarray, t: float, cfg: ArolcConfig) -> ArolcState:
    """One Euler step of the adaptive gain law; returns the updated state."""
    s = np.asarray(s, dtype=float)
    if state.s_prev is not None and not t > state.t_prev:
        raise ValueError("time must advance between adaptation steps")
    if state.c_hat <= cfg.gamma:
        rate = cfg.gamma
    else:
        s_norm = float(np.linalg.norm(s))
        if state.s_prev is None:
            rate = -s_norm  # no slope estimate yet: conservative branch
        else:
            s_dot = (s - state.s_prev) / (t - state.t_prev)
            rate = s_norm if float(s @ s_dot) > 0.0 else -s_norm
    c_hat = max(state.c_hat + rate * cfg.dt_control, cfg.gamma)
    return ArolcState(c_hat=c_hat, s_prev=s, t_prev=t)


class ArolcStepData(NamedTuple):
    """Full record of one control step, used by the simulator diagnostics."""

    tau: np.ndarray
    state: ArolcState
    e1: np.ndarray
    e1_dot: np.ndarray
    s: np.ndarray
    u: np.ndarray
    du: np.ndarray


def _arolc_step_full(state, q, q_dot, desired, nominal_model, t, cfg) -> ArolcStepData:
    qd, qd_dot, qd_ddot = desired
    e1 = np.asarray(qd, float) - np.asarray(q, float)
    e1_dot = np.asarray(qd_dot, float) - np.asarray(q_dot, float)
    e = np.concatenate([e1, e1_dot])
    s = sliding_variable(e, cfg)
    u_hat = nominal_control(e1, e1_dot, qd_ddot, cfg)
    if cfg.switching:
        du = switching_control(s, state.c_hat, cfg)
    else:
        du = np.zeros_like(u_hat)
    new_state = adapt_gain(state, s, t, cfg)
    u = u_hat + du
    m_hat, n_hat = nominal_model
    tau = np.asarray(m_hat, float) @ u + np.asarray(n_hat, float)
    return ArolcStepData(tau, new_state, e1, e1_dot, s, u, du)


def arolc_step(state: ArolcState, q, q_dot, desired, nominal_model, t, cfg):
    """Evaluate the control law at time t.

    desired is the triple (qd, qd_dot, qd_ddot); nominal_model the pair
    (Mhat(q), Nhat(q, q_dot)) already evaluated at the current state.
    Returns (tau, new_state). The switching term uses the pre-update gain;
    the adaptation result takes effect on the next step.
    """
    data = _arolc_step_full(state, q, q_dot, desired, nominal_model, t, cfg)
    return data.tau, data.state


@dataclass(frozen=True)
class PconConfig:
    """Baseline predictor-controller gains."""

    kappa: float = 2.0
    vartheta: np.ndarray = field(default_factory=lambda: np.eye(1))
    k_b: float = 5.0

    def __post_init__(self):
        if self.kappa <= 0.0 or self.k_b <= 0.0:
            raise ValueError("kappa and k_b must be positive")
        v = np.asarray(self.vartheta, dtype=float)
        # semidefinite allowed: vartheta = 0 degenerates to a PD law
        if np.linalg.eigvalsh(0.5 * (v + v.T))[0] < 0.0:
            raise ValueError("vartheta must be positive semidefinite")
        object.__setattr__(self, "vartheta", v)


@dataclass
class PconState:
    """Input history (shared with the simulator) and current delay estimate."""

    input_history: DelayBuffer
    h_estimate: float = 0.0

    def __post_init__(self):
        if self.h_estimate < 0.0:
            raise ValueError("h_estimate must be nonnegative")


def pcon_integral_error(state: PconState, t: float) -> np.ndarray:
    """Integral of the stored commands over [t - h_estimate, t]."""
    return state.input_history.integrate(t - state.h_estimate, t)


def pcon_step(state: PconState, q, q_dot, desired, t, cfg: PconConfig):
    """tau = k_b (e1_dot + kappa e1 - vartheta e_z); appends tau to the history."""
    qd, qd_dot, _ = desired
    e1 = np.asarray(qd, float) - np.asarray(q, float)
    e1_dot = np.asarray(qd_dot, float) - np.asarray(q_dot, float)
    if len(state.input_history) > 0:
        e_z = pcon_integral_error(state, t)
    else:
        e_z = np.zeros_like(e1)
    rho = e1_dot + cfg.kappa * e1 - cfg.vartheta @ e_z
    tau = cfg.k_b * rho
    state.input_history.push(t, tau)
    return tau, state


def uncertainty_residual(q, q_dot, q_h, q_dot_h, u_h, qdd_d, qdd_d_h,
                         true_model, nominal_model, t: float = 0.0) -> np.ndarray:
    """Lumped uncertainty entering the delayed error dynamics.

    sigma = (I - M(q)^-1 Mhat(q_h)) u_h
          + M(q)^-1 (N(q, q_dot, t) - Nhat(q_h, q_dot_h))
          + qdd_d(t) - qdd_d(t - h)

    Diagnostic only: the controller never evaluates sigma. true_model and
    nominal_model are plant objects exposing mass_matrix / bias_vector and
    nominal_mass_matrix / nominal_bias_vector respectively.
    """
    q = np.asarray(q, float)
    m = true_model.mass_matrix(q, t)
    n_vec = true_model.bias_vector(q, np.asarray(q_dot, float), t)
    m_hat = nominal_model.nominal_mass_matrix(np.asarray(q_h, float))
    n_hat = nominal_model.nominal_bias_vector(
        np.asarray(q_h, float), np.asarray(q_dot_h, float)
    )
    u_h = np.asarray(u_h, float)
    try:
        m_inv_mu = np.linalg.solve(m, m_hat @ u_h)
        m_inv_dn = np.linalg.solve(m, n_vec - n_hat)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular mass matrix") from exc
    return u_h - m_inv_mu + m_inv_dn + np.asarray(qdd_d, float) - np.asarray(qdd_d_h, float)
