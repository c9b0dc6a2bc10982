"""Input-delay profiles and the timestamped command history buffer.

The actuator of the simulated plant receives tau(t - h(t)). The buffer stores
commands at their computation instants; lookups linearly interpolate between
stored samples, return zero before the first sample (no command has reached
the actuator yet), and hold the latest value beyond the newest sample.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

__all__ = ["DelayProfile", "delay_at", "max_delay", "DelayBuffer", "buffer_sample"]

_PROFILE_KINDS = ("S1", "S2", "S3", "S4", "constant", "custom", "none")


@dataclass(frozen=True)
class DelayProfile:
    """Input-delay schedule h(t), all parameters in seconds.

    Built-in kinds:
      S1        0.020 + 0.080 |sin t|
      S2        0.005 + 0.120 |sin 0.1 t|
      S3        0.060
      S4        0.120
      constant  h0
      custom    a + b |sin(omega t)|
      none      0
    """

    kind: str
    h0: float = 0.0
    a: float = 0.0
    b: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        if self.kind not in _PROFILE_KINDS:
            raise ValueError(f"unknown delay profile kind {self.kind!r}")
        if self.h0 < 0.0 or self.a < 0.0 or self.b < 0.0:
            raise ValueError("delay parameters must be nonnegative")


def delay_at(profile: DelayProfile, t: float) -> float:
    """Evaluate h(t) >= 0."""
    kind = profile.kind
    if kind == "S1":
        return 0.020 + 0.080 * abs(np.sin(t))
    if kind == "S2":
        return 0.005 + 0.120 * abs(np.sin(0.1 * t))
    if kind == "S3":
        return 0.060
    if kind == "S4":
        return 0.120
    if kind == "constant":
        return profile.h0
    if kind == "custom":
        return profile.a + profile.b * abs(np.sin(profile.omega * t))
    return 0.0


def max_delay(profile: DelayProfile) -> float:
    """Supremum of h(t) over all t."""
    kind = profile.kind
    if kind == "S1":
        return 0.100
    if kind == "S2":
        return 0.125
    if kind == "S3":
        return 0.060
    if kind == "S4":
        return 0.120
    if kind == "constant":
        return profile.h0
    if kind == "custom":
        return profile.a + profile.b
    return 0.0


class DelayBuffer:
    """Time-ordered command history with linear-interpolation lookup.

    Samples older than (latest - window) are dropped; the one sample
    immediately before the cutoff is kept so interpolation at the window
    edge stays exact. The window must cover the largest delay plus the
    integration horizon of any consumer.
    """

    def __init__(self, window: float, dim: int | None = None):
        if window <= 0.0:
            raise ValueError("window must be positive")
        self.window = float(window)
        self.dim = dim
        self._times: list[float] = []
        self._values: list[np.ndarray] = []

    def __len__(self) -> int:
        return len(self._times)

    @property
    def times(self) -> list[float]:
        return list(self._times)

    def push(self, t: float, tau) -> None:
        if self._times and t <= self._times[-1]:
            raise ValueError("timestamps must be strictly increasing")
        self._times.append(float(t))
        self._values.append(np.asarray(tau, dtype=float))
        cutoff = t - self.window
        while len(self._times) > 2 and self._times[1] < cutoff:
            self._times.pop(0)
            self._values.pop(0)

    def sample(self, t_query: float) -> np.ndarray:
        """Command in flight at t_query: zero before history, interpolated
        inside, held at the latest value afterwards."""
        times = self._times
        if not times:
            if self.dim is None:
                raise ValueError("empty buffer of unknown dimension")
            return np.zeros(self.dim)
        i = bisect_right(times, t_query)
        if i == 0:
            return np.zeros_like(self._values[0])
        if i == len(times):
            return self._values[-1]
        t0, t1 = times[i - 1], times[i]
        lam = (t_query - t0) / (t1 - t0)
        return (1.0 - lam) * self._values[i - 1] + lam * self._values[i]

    def integrate(self, t0: float, t1: float) -> np.ndarray:
        """Trapezoidal integral of the stored signal over [t0, t1].

        The signal is zero before the first sample and held constant after
        the last one, matching sample(). Empty buffers integrate to zero.
        """
        if t1 < t0:
            raise ValueError("t1 must be >= t0")
        if not self._times:
            return np.zeros(self.dim if self.dim is not None else 0)
        times = self._times
        values = self._values
        n = values[0].shape[0] if values[0].ndim else 1
        total = np.zeros(n)
        lo = max(t0, times[0])
        if t1 <= lo:
            return total
        # knots: window ends plus every sample instant inside the window
        i = bisect_right(times, lo)
        knots = [lo] + [tt for tt in times[i:] if tt < t1] + [t1]
        prev_t = knots[0]
        prev_v = self.sample(prev_t)
        for tt in knots[1:]:
            v = self.sample(tt)
            total += 0.5 * (tt - prev_t) * (prev_v + v)
            prev_t, prev_v = tt, v
        return total


def buffer_sample(buf: DelayBuffer, t_query: float) -> np.ndarray:
    """Functional alias for DelayBuffer.sample."""
    return buf.sample(t_query)
