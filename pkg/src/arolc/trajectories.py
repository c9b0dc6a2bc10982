"""Desired trajectories with analytic first and second derivatives.

Three built-ins cover the test plants and the wheeled robot:

* ``SinusoidTrajectory``: independent sinusoid per coordinate.
* ``CircleTrajectory``: constant-speed circular path for a differential
  drive. A diff-drive cannot track x, y and heading independently, so the
  controller references are the wheel angles obtained by inverse
  kinematics; on a circle both wheel rates are constant. The Cartesian
  path itself stays available through ``cartesian`` for posture-level
  checks and error reporting.
* ``WheelRampTrajectory``: constant wheel rates commanded directly.

A trajectory is called as traj(t) -> (qd, qd_dot, qd_ddot).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SinusoidTrajectory",
    "CircleTrajectory",
    "WheelRampTrajectory",
    "desired_trajectory",
]


@dataclass(frozen=True)
class SinusoidTrajectory:
    """qd_i(t) = offset_i + amplitude_i * sin(frequency_i * t + phase_i)."""

    amplitude: tuple[float, ...] = (0.5, 0.3)
    frequency: tuple[float, ...] = (0.5, 0.7)
    phase: tuple[float, ...] | None = None
    offset: tuple[float, ...] | None = None
    path_diameter: float = 0.0  # 0 -> default 2 * max amplitude

    @property
    def dim(self) -> int:
        return len(self.amplitude)

    @property
    def diameter(self) -> float:
        return self.path_diameter if self.path_diameter > 0 \
            else 2.0 * max(self.amplitude)

    def __call__(self, t: float):
        amp = np.asarray(self.amplitude, float)
        freq = np.asarray(self.frequency, float)
        ph = np.zeros(self.dim) if self.phase is None else np.asarray(self.phase, float)
        off = np.zeros(self.dim) if self.offset is None else np.asarray(self.offset, float)
        arg = freq * t + ph
        qd = off + amp * np.sin(arg)
        qd_dot = amp * freq * np.cos(arg)
        qd_ddot = -amp * freq ** 2 * np.sin(arg)
        return qd, qd_dot, qd_ddot


@dataclass(frozen=True)
class CircleTrajectory:
    """Circle of given radius traversed at constant angular rate.

    The path is x(t) = radius sin(rate t) + cx, y(t) = radius cos(rate t)
    + cy (clockwise, starting at the top heading along +x). With wheel
    radius r_bar and half axle width b the rolling-consistent wheel
    references are the constant rates

        theta_r_dot = rate (radius - b) / r_bar,
        theta_l_dot = rate (radius + b) / r_bar.

    The heading reference implied by the path is the tangent direction
    -rate * t; an independently chosen heading profile would be
    kinematically unreachable and is not represented.
    """

    radius: float = 1.25
    rate: float = 0.35
    center: tuple[float, float] = (0.1, 1.35)
    r_bar: float = 0.0975
    b: float = 0.165
    path_diameter: float = 0.0

    dim = 2

    def __post_init__(self):
        if self.radius <= 0.0 or self.rate <= 0.0:
            raise ValueError("radius and rate must be positive")
        if self.r_bar <= 0.0 or self.b <= 0.0:
            raise ValueError("r_bar and b must be positive")

    @property
    def diameter(self) -> float:
        return self.path_diameter if self.path_diameter > 0 else 2.0 * self.radius

    @property
    def wheel_rates(self) -> tuple[float, float]:
        return (self.rate * (self.radius - self.b) / self.r_bar,
                self.rate * (self.radius + self.b) / self.r_bar)

    def __call__(self, t: float):
        rates = np.array(self.wheel_rates)
        return rates * t, rates, np.zeros(2)

    def cartesian(self, t: float):
        """(x, y, x_dot, y_dot, heading) of the reference path at time t."""
        a = self.rate * t
        x = self.radius * math.sin(a) + self.center[0]
        y = self.radius * math.cos(a) + self.center[1]
        x_dot = self.radius * self.rate * math.cos(a)
        y_dot = -self.radius * self.rate * math.sin(a)
        return x, y, x_dot, y_dot, -a


@dataclass(frozen=True)
class WheelRampTrajectory:
    """Constant wheel rates commanded directly: qd = (rate_r t, rate_l t)."""

    rate_r: float = 3.0
    rate_l: float = 2.0
    path_diameter: float = 2.5

    dim = 2

    def __call__(self, t: float):
        rates = np.array([self.rate_r, self.rate_l])
        return rates * t, rates, np.zeros(2)

    @property
    def diameter(self) -> float:
        return self.path_diameter


def desired_trajectory(spec, t: float):
    """Evaluate a trajectory spec: returns (qd, qd_dot, qd_ddot)."""
    return spec(t)
