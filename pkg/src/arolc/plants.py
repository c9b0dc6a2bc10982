"""Plant models exposing M(q) and N(q, q_dot, t) for M qdd + N = tau_applied.

Every plant carries two faces: the true dynamics (with friction, payload and
disturbance terms) used by the integrator, and a deterministic nominal model
(what the controller believes) exposed via nominal_mass_matrix and
nominal_bias_vector. Time enters the true side only, through disturbances
and the payload schedule.

The wheeled-mobile-robot support comes in two layers:

* ``wmr_matrices`` assembles the full 5-coordinate matrices
  (coordinates x_c, y_c, phi, theta_r, theta_l; inputs u_r, u_l) in the
  multiplier-eliminated form whose k1..k5 couplings tie the body
  coordinates to the wheel angles.

* ``reduced_wmr_dynamics`` returns the 2-DOF wheel-space plant a square
  controller can act on. Projecting the coupled 5x5 form through the
  constraint null space does not yield a positive definite inertia (its
  k1..k5 entries already fold constraint elimination into the off-diagonal
  blocks, so the projection double-counts them); the reduction is instead
  derived from the kinetic energy of the same physical parameters, written
  at the axle midpoint:

      T = 1/2 m v^2 + 1/2 (I_bar + m d^2) w^2 + 1/2 I_w (tr^2 + tl^2),
      v = r_bar (tr + tl) / 2,  w = r_bar (tr - tl) / (2 b),

  giving a constant SPD wheel-space inertia and the gyroscopic bias
  2 K a c^2 (tr - tl) [tl, -tr] from the centre-of-mass offset. Posture
  (x_c, y_c, phi) is reconstructed kinematically from wheel rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "PlantModel",
    "el_accel",
    "WmrParams",
    "wmr_matrices",
    "PayloadSchedule",
    "payload_mass",
    "reduced_wmr_dynamics",
    "TwoLinkParams",
    "two_link_matrices",
    "two_link_plant",
    "point_mass_plant",
    "oscillator_plant",
    "body_twist",
    "reconstruct_posture",
]


class PlantModel:
    """Base class for second-order plants M(q) qdd + N(q, qd, t) = tau."""

    dim: int = 0

    def mass_matrix(self, q, t: float | None = None) -> np.ndarray:
        raise NotImplementedError

    def bias_vector(self, q, q_dot, t: float) -> np.ndarray:
        raise NotImplementedError

    def nominal_mass_matrix(self, q) -> np.ndarray:
        raise NotImplementedError

    def nominal_bias_vector(self, q, q_dot) -> np.ndarray:
        raise NotImplementedError

    def accel(self, q, q_dot, tau_applied, t: float) -> np.ndarray:
        """Forward dynamics; subclasses may override with a faster closed form."""
        return el_accel(self, q, q_dot, tau_applied, t)


def el_accel(plant: PlantModel, q, q_dot, tau_applied, t: float) -> np.ndarray:
    """qdd = M(q)^-1 (tau_applied - N(q, q_dot, t))."""
    m = plant.mass_matrix(q, t)
    n = plant.bias_vector(q, q_dot, t)
    try:
        return np.linalg.solve(m, np.asarray(tau_applied, float) - n)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular mass matrix") from exc


# ---------------------------------------------------------------------------
# Wheeled mobile robot
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WmrParams:
    """Differential-drive parameters.

    m     total mass [kg]
    I_bar body inertia about the vertical axis [kg m^2]
    K     mass-offset product m * d [kg m]
    d     centre-of-mass offset from the wheel axle [m]
    r_bar wheel radius [m]
    b     half axle width [m]
    I_w   wheel spin inertia [kg m^2]
    """

    m: float = 10.0
    I_bar: float = 0.5
    K: float = 0.5
    d: float = 0.05
    r_bar: float = 0.0975
    b: float = 0.165
    I_w: float = 0.0025

    def __post_init__(self):
        for name in ("m", "I_bar", "K", "d", "r_bar", "b", "I_w"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if not self.d < self.b:
            raise ValueError("d must be smaller than b")


def wmr_matrices(q, q_dot, params: WmrParams):
    """Full 5-coordinate matrices (M_bar, V_bar, G) of the coupled model.

    q = (x_c, y_c, phi, theta_r, theta_l); only phi enters M_bar, only the
    velocities enter V_bar; G is constant. M_bar is symmetric as written.
    """
    q = np.asarray(q, dtype=float)
    q_dot = np.asarray(q_dot, dtype=float)
    if q.shape[0] != 5 or q_dot.shape[0] != 5:
        raise ValueError("full WMR model uses 5 generalized coordinates")
    m, i_bar, k, d = params.m, params.I_bar, params.K, params.d
    r, b, i_w = params.r_bar, params.b, params.I_w
    phi = q[2]
    s, c = math.sin(phi), math.cos(phi)
    k1 = s * (m * d * r - k * r) / b - m * r * c / 2.0
    k2 = s * (k * r - m * d * r) / b - m * r * c / 2.0
    k3 = c * (k * r - m * d * r) / b - m * r * s / 2.0
    k4 = c * (m * d * r - k * r) / b - m * r * s / 2.0
    k5 = r * (i_bar - k * d) / b
    m_bar = np.array([
        [m, 0.0, k * s, k1, k2],
        [0.0, m, -k * c, k3, k4],
        [k * s, -k * c, i_bar, -k5, k5],
        [k1, k3, -k5, i_w, 0.0],
        [k2, k4, k5, 0.0, i_w],
    ])
    phi_dot, tr_dot, tl_dot = q_dot[2], q_dot[3], q_dot[4]
    wheel_sq = (tr_dot ** 2 - tl_dot ** 2) / (2.0 * b)
    v_bar = np.array([
        m * d * phi_dot ** 2 * c + m * r ** 2 * s * wheel_sq,
        m * d * phi_dot ** 2 * c - m * r ** 2 * s * wheel_sq,
        k * r ** 2 * wheel_sq,
        -k * r * phi_dot ** 2 / 2.0,
        -k * r * phi_dot ** 2 / 2.0,
    ])
    g = np.array([
        [0.0, 0.0],
        [0.0, 0.0],
        [0.0, 0.0],
        [1.0, 0.0],
        [0.0, 1.0],
    ])
    return m_bar, v_bar, g


@dataclass(frozen=True)
class PayloadSchedule:
    """Square-wave payload: extra_mass held for period_on, removed for
    period_off, placed at the next body-frame offset each cycle."""

    extra_mass: float = 3.5
    period_on: float = 5.0
    period_off: float = 5.0
    offsets: tuple[tuple[float, float], ...] = ((0.05, 0.02),)

    def __post_init__(self):
        if self.extra_mass < 0.0:
            raise ValueError("extra_mass must be nonnegative")
        if self.period_on <= 0.0 or self.period_off <= 0.0:
            raise ValueError("periods must be positive")
        if not self.offsets:
            raise ValueError("at least one offset is required")


def payload_mass(sched: PayloadSchedule, t: float):
    """(mass_delta, (dx, dy)) at time t; the first on-window starts at t = 0."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    period = sched.period_on + sched.period_off
    cycle = int(t // period)
    phase = t - cycle * period
    if phase < sched.period_on:
        return sched.extra_mass, sched.offsets[cycle % len(sched.offsets)]
    return 0.0, (0.0, 0.0)


class _ReducedWmrPlant(PlantModel):
    """Wheel-space (theta_r, theta_l) dynamics of the differential drive."""

    dim = 2

    def __init__(self, params, nominal_params, payload, viscous,
                 disturbance_amp, disturbance_freq, phases):
        self.params = params
        self.nominal_params = nominal_params
        self.payload = payload
        self.viscous = viscous
        self.disturbance_amp = disturbance_amp
        self.disturbance_freq = disturbance_freq
        self.phases = np.zeros(2) if phases is None else np.asarray(phases, float)

    def _effective(self, t: float | None):
        p = self.params
        m_eff = p.m
        j_eff = p.I_bar + p.m * p.d ** 2
        k_eff = p.K
        if self.payload is not None and t is not None:
            dm, (dx, dy) = payload_mass(self.payload, max(t, 0.0))
            m_eff += dm
            j_eff += dm * (dx * dx + dy * dy)
            k_eff += dm * dx
        return m_eff, j_eff, k_eff

    @staticmethod
    def _inertia(params_m, params_j, r_bar, b, i_w):
        a = r_bar / 2.0
        c = r_bar / (2.0 * b)
        diag = params_m * a * a + params_j * c * c + i_w
        off = params_m * a * a - params_j * c * c
        return np.array([[diag, off], [off, diag]])

    def mass_matrix(self, q, t: float | None = None) -> np.ndarray:
        m_eff, j_eff, _ = self._effective(t)
        return self._inertia(m_eff, j_eff, self.params.r_bar, self.params.b,
                             self.params.I_w)

    @staticmethod
    def _gyro(k_eff, r_bar, b, q_dot):
        # centre-of-mass offset couples spin rate into both wheels
        a = r_bar / 2.0
        c = r_bar / (2.0 * b)
        z = q_dot[0] - q_dot[1]
        return 2.0 * k_eff * a * c * c * z * np.array([q_dot[1], -q_dot[0]])

    def bias_vector(self, q, q_dot, t: float) -> np.ndarray:
        q_dot = np.asarray(q_dot, float)
        m_eff, _, k_eff = self._effective(t)
        n = self._gyro(k_eff, self.params.r_bar, self.params.b, q_dot)
        if self.viscous:
            # rolling resistance scales with the carried weight
            n = n + self.viscous * (m_eff / self.params.m) * q_dot
        if self.disturbance_amp:
            n = n + self.disturbance_amp * np.sin(
                self.disturbance_freq * t + self.phases
            )
        return n

    def nominal_mass_matrix(self, q) -> np.ndarray:
        p = self.nominal_params
        return self._inertia(p.m, p.I_bar + p.m * p.d ** 2, p.r_bar, p.b, p.I_w)

    def nominal_bias_vector(self, q, q_dot) -> np.ndarray:
        p = self.nominal_params
        return self._gyro(p.K, p.r_bar, p.b, np.asarray(q_dot, float))


def reduced_wmr_dynamics(params: WmrParams, mismatch: float = 0.0,
                         payload: PayloadSchedule | None = None,
                         viscous: float = 0.0,
                         disturbance_amp: float = 0.0,
                         disturbance_freq: float = 1.0,
                         phases=None) -> PlantModel:
    """2-DOF wheel-space plant; the nominal side scales the inertial
    parameters by (1 - mismatch) and omits payload, friction, disturbance."""
    if not -1.0 < mismatch < 1.0:
        raise ValueError("mismatch must lie in (-1, 1)")
    scale = 1.0 - mismatch
    nominal = replace(params, m=params.m * scale, I_bar=params.I_bar * scale,
                      K=params.K * scale, I_w=params.I_w * scale)
    return _ReducedWmrPlant(params, nominal, payload, viscous,
                            disturbance_amp, disturbance_freq, phases)


def body_twist(q_dot, params: WmrParams):
    """(forward speed, turn rate) from wheel rates (theta_r_dot, theta_l_dot)."""
    q_dot = np.asarray(q_dot, float)
    v = params.r_bar * (q_dot[0] + q_dot[1]) / 2.0
    w = params.r_bar * (q_dot[0] - q_dot[1]) / (2.0 * params.b)
    return v, w


def reconstruct_posture(times, q_dots, params: WmrParams, pose0=(0.0, 0.0, 0.0)):
    """Integrate the rolling kinematics to recover (x_c, y_c, phi) series.

    times and q_dots are sampled series (wheel rates per row); trapezoidal
    integration of the heading and midpoint integration of the position.
    Returns an array of shape (len(times), 3). The reported (x_c, y_c) is
    the centre of mass, offset d ahead of the axle midpoint.
    """
    times = np.asarray(times, float)
    q_dots = np.asarray(q_dots, float)
    out = np.zeros((len(times), 3))
    x, y, phi = pose0
    x_a = x - params.d * math.cos(phi)
    y_a = y - params.d * math.sin(phi)
    out[0] = (x, y, phi)
    for i in range(1, len(times)):
        dt = times[i] - times[i - 1]
        v0, w0 = body_twist(q_dots[i - 1], params)
        v1, w1 = body_twist(q_dots[i], params)
        phi_mid = phi + 0.25 * (w0 + w1) * dt
        v_mid = 0.5 * (v0 + v1)
        x_a += v_mid * math.cos(phi_mid) * dt
        y_a += v_mid * math.sin(phi_mid) * dt
        phi += 0.5 * (w0 + w1) * dt
        out[i] = (x_a + params.d * math.cos(phi),
                  y_a + params.d * math.sin(phi), phi)
    return out


# ---------------------------------------------------------------------------
# Two-link manipulator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoLinkParams:
    """Planar two-revolute-link arm; lc_i is the centre-of-mass distance
    along link i, I_i the link inertia about its centre of mass. Point-mass
    links correspond to lc_i = l_i, I_i = 0. viscous adds -viscous * q_dot
    friction (true model only; nominal parameter sets use viscous = 0)."""

    m1: float = 1.0
    m2: float = 1.0
    l1: float = 1.0
    l2: float = 1.0
    lc1: float = 0.5
    lc2: float = 0.5
    I1: float = 0.05
    I2: float = 0.05
    gravity: float = 9.81
    viscous: float = 0.0

    def __post_init__(self):
        for name in ("m1", "m2", "l1", "l2", "lc1", "lc2"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.I1 < 0.0 or self.I2 < 0.0 or self.viscous < 0.0:
            raise ValueError("I1, I2, viscous must be nonnegative")


def two_link_matrices(q, q_dot, params: TwoLinkParams):
    """Mass matrix and bias (Coriolis + gravity + viscous) of the arm.

    Joint angles are measured from the horizontal, so gravity torques go
    with cos(q). Setting gravity = 0 and q_dot = 0 gives N = 0.
    """
    q = np.asarray(q, float)
    q_dot = np.asarray(q_dot, float)
    p = params
    c2 = math.cos(q[1])
    s2 = math.sin(q[1])
    a11 = p.m1 * p.lc1 ** 2 + p.I1 + p.I2 + p.m2 * (
        p.l1 ** 2 + p.lc2 ** 2 + 2.0 * p.l1 * p.lc2 * c2
    )
    a12 = p.m2 * (p.lc2 ** 2 + p.l1 * p.lc2 * c2) + p.I2
    a22 = p.m2 * p.lc2 ** 2 + p.I2
    m = np.array([[a11, a12], [a12, a22]])
    h = p.m2 * p.l1 * p.lc2 * s2
    coriolis = np.array([
        -h * q_dot[1] * (2.0 * q_dot[0] + q_dot[1]),
        h * q_dot[0] ** 2,
    ])
    g = p.gravity
    grav = np.array([
        (p.m1 * p.lc1 + p.m2 * p.l1) * g * math.cos(q[0])
        + p.m2 * p.lc2 * g * math.cos(q[0] + q[1]),
        p.m2 * p.lc2 * g * math.cos(q[0] + q[1]),
    ])
    n = coriolis + grav
    if p.viscous:
        n = n + p.viscous * q_dot
    return m, n


class _TwoLinkPlant(PlantModel):
    dim = 2

    def __init__(self, params, nominal_params, disturbance_amp,
                 disturbance_freq, phases):
        self.params = params
        self.nominal_params = nominal_params
        self.disturbance_amp = disturbance_amp
        self.disturbance_freq = disturbance_freq
        self.phases = np.zeros(2) if phases is None else np.asarray(phases, float)

    def mass_matrix(self, q, t: float | None = None) -> np.ndarray:
        return two_link_matrices(q, np.zeros(2), self.params)[0]

    def bias_vector(self, q, q_dot, t: float) -> np.ndarray:
        n = two_link_matrices(q, q_dot, self.params)[1]
        if self.disturbance_amp:
            n = n + self.disturbance_amp * np.sin(
                self.disturbance_freq * t + self.phases
            )
        return n

    def nominal_mass_matrix(self, q) -> np.ndarray:
        return two_link_matrices(q, np.zeros(2), self.nominal_params)[0]

    def nominal_bias_vector(self, q, q_dot) -> np.ndarray:
        return two_link_matrices(q, q_dot, self.nominal_params)[1]

    def accel(self, q, q_dot, tau_applied, t: float) -> np.ndarray:
        m, n = two_link_matrices(q, q_dot, self.params)
        rhs = np.asarray(tau_applied, float) - n
        if self.disturbance_amp:
            rhs = rhs - self.disturbance_amp * np.sin(
                self.disturbance_freq * t + self.phases
            )
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        return np.array([
            (m[1, 1] * rhs[0] - m[0, 1] * rhs[1]) / det,
            (m[0, 0] * rhs[1] - m[1, 0] * rhs[0]) / det,
        ])


def two_link_plant(params: TwoLinkParams, mismatch: float = 0.0,
                   disturbance_amp: float = 0.0,
                   disturbance_freq: float = 1.0,
                   phases=None) -> PlantModel:
    """Two-link arm; nominal side scales masses/inertias by (1 - mismatch)
    and never includes friction or disturbances."""
    if not -1.0 < mismatch < 1.0:
        raise ValueError("mismatch must lie in (-1, 1)")
    scale = 1.0 - mismatch
    nominal = replace(params, m1=params.m1 * scale, m2=params.m2 * scale,
                      I1=params.I1 * scale, I2=params.I2 * scale, viscous=0.0)
    return _TwoLinkPlant(params, nominal, disturbance_amp, disturbance_freq,
                         phases)


# ---------------------------------------------------------------------------
# Simple test plants
# ---------------------------------------------------------------------------


class _PointMassPlant(PlantModel):
    def __init__(self, n, mass):
        self.dim = n
        self.mass = mass

    def mass_matrix(self, q, t=None):
        return self.mass * np.eye(self.dim)

    def bias_vector(self, q, q_dot, t):
        return np.zeros(self.dim)

    def nominal_mass_matrix(self, q):
        return self.mass * np.eye(self.dim)

    def nominal_bias_vector(self, q, q_dot):
        return np.zeros(self.dim)

    def accel(self, q, q_dot, tau_applied, t):
        return np.asarray(tau_applied, float) / self.mass


class _OscillatorPlant(PlantModel):
    dim = 1

    def __init__(self, stiffness, mass):
        self.stiffness = stiffness
        self.mass = mass

    def mass_matrix(self, q, t=None):
        return np.array([[self.mass]])

    def bias_vector(self, q, q_dot, t):
        return np.array([self.stiffness * np.asarray(q, float)[0]])

    def nominal_mass_matrix(self, q):
        return np.array([[self.mass]])

    def nominal_bias_vector(self, q, q_dot):
        return np.array([self.stiffness * np.asarray(q, float)[0]])

    def accel(self, q, q_dot, tau_applied, t):
        return (np.asarray(tau_applied, float)
                - np.array([self.stiffness * np.asarray(q, float)[0]])) / self.mass


def point_mass_plant(n: int = 1, mass: float = 1.0) -> PlantModel:
    """Friction-free unit plant M = mass * I, N = 0."""
    if n < 1 or mass <= 0.0:
        raise ValueError("need n >= 1 and positive mass")
    return _PointMassPlant(n, mass)


def oscillator_plant(stiffness: float = 1.0, mass: float = 1.0) -> PlantModel:
    """Undamped linear oscillator; conserves energy under zero input."""
    if stiffness <= 0.0 or mass <= 0.0:
        raise ValueError("stiffness and mass must be positive")
    return _OscillatorPlant(stiffness, mass)
