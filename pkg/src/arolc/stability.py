"""Delay-margin and ultimate-bound analysis for the delayed tracking-error loop.

The closed-loop tracking error e = [e1; e1_dot] of an Euler-Lagrange system
under the adaptive-robust outer-loop controller obeys

    e_dot(t) = A1 e(t) + B1 e(t - h) + B (sigma - du(t - h)),

with A1 = [[0, I], [0, 0]], B1 = [[0, 0], [-K1, -K2]], A = A1 + B1 Hurwitz,
and B = [0; I]. A Razumikhin-type argument with Lyapunov matrix P solving
A^T P + P A = -Q bounds the admissible input delay by

    h < lambda_min(Q) / ||E||,
    E = beta P B1 (A1 P^-1 A1^T + B1 P^-1 B1^T + P^-1) B1^T P + 2 (r/beta) P,

where r > 1 is the Razumikhin factor and beta > 0 a free Young-inequality
scalar. For feasible delays (Psi = Q - h E > 0) the error is uniformly
ultimately bounded; six bound formulas cover the combinations of switching
regime (outside/inside the boundary layer) and adaptive-gain branch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    invert,
    is_hurwitz,
    min_eig_symmetric,
    solve_lyapunov,
    spectral_norm,
    symmetrize,
)

__all__ = [
    "GainSet",
    "ErrorSystem",
    "BoundParams",
    "build_error_system",
    "delay_margin",
    "check_feasibility",
    "ultimate_bound",
    "reaching_time",
]


def _spd_or_raise(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if min_eig_symmetric(m) <= 0.0:
        raise ValueError(f"{name} must be symmetric positive definite")
    return m


@dataclass(frozen=True)
class GainSet:
    """Controller gains plus the scalar analysis parameters.

    K1, K2 are the position/velocity error gains (n x n, SPD), Q the
    Lyapunov right-hand side (2n x 2n, SPD), r > 1 the Razumikhin factor,
    beta > 0 the Young-inequality scalar.
    """

    K1: np.ndarray
    K2: np.ndarray
    Q: np.ndarray
    r: float = 1.1
    beta: float = 1.0

    def __post_init__(self):
        k1 = _spd_or_raise(self.K1, "K1")
        k2 = _spd_or_raise(self.K2, "K2")
        q = _spd_or_raise(self.Q, "Q")
        n = k1.shape[0]
        if k2.shape != (n, n):
            raise ValueError("K1 and K2 must have identical shape")
        if q.shape != (2 * n, 2 * n):
            raise ValueError("Q must be 2n x 2n")
        if not self.r > 1.0:
            raise ValueError("r must exceed 1")
        if not self.beta > 0.0:
            raise ValueError("beta must be positive")
        object.__setattr__(self, "K1", k1)
        object.__setattr__(self, "K2", k2)
        object.__setattr__(self, "Q", q)

    @property
    def n(self) -> int:
        return self.K1.shape[0]

    @classmethod
    def identity(cls, n: int, k1: float = 1.0, k2: float = 1.0, q: float = 1.0,
                 r: float = 1.1, beta: float = 1.0) -> "GainSet":
        """Scalar-times-identity gains, the common tuning in practice."""
        return cls(k1 * np.eye(n), k2 * np.eye(n), q * np.eye(2 * n), r, beta)


@dataclass(frozen=True)
class ErrorSystem:
    """Matrices of the delayed error dynamics and the margin matrix E."""

    A1: np.ndarray
    B1: np.ndarray
    A: np.ndarray
    B: np.ndarray
    P: np.ndarray
    E: np.ndarray

    @property
    def n(self) -> int:
        return self.B.shape[1]


def build_error_system(gains: GainSet) -> ErrorSystem:
    """Assemble the error-dynamics blocks, solve for P, and form E."""
    n = gains.n
    zero = np.zeros((n, n))
    eye = np.eye(n)
    a1 = np.block([[zero, eye], [zero, zero]])
    b1 = np.block([[zero, zero], [-gains.K1, -gains.K2]])
    a = a1 + b1
    # companion form of e1_ddot + K2 e1_dot + K1 e1 = 0; SPD gains make it stable
    assert is_hurwitz(a), "A = A1 + B1 must be Hurwitz for SPD K1, K2"
    b = np.vstack([zero, eye])
    p = solve_lyapunov(a, gains.Q)
    p_inv = invert(p)
    inner = a1 @ p_inv @ a1.T + b1 @ p_inv @ b1.T + p_inv
    e = gains.beta * (p @ b1 @ inner @ b1.T @ p) + 2.0 * (gains.r / gains.beta) * p
    e = symmetrize(e)  # symmetric by construction; remove float drift
    return ErrorSystem(A1=a1, B1=b1, A=a, B=b, P=p, E=e)


def delay_margin(gains: GainSet) -> float:
    """Maximum admissible input delay in seconds: lambda_min(Q) / ||E||."""
    system = build_error_system(gains)
    return min_eig_symmetric(gains.Q) / spectral_norm(system.E)


def check_feasibility(gains: GainSet, h: float) -> bool:
    """True iff delay h satisfies lambda_min(Q) > h ||E||."""
    if h < 0.0:
        raise ValueError("delay must be nonnegative")
    system = build_error_system(gains)
    return min_eig_symmetric(gains.Q) > h * spectral_norm(system.E)


@dataclass(frozen=True)
class BoundParams:
    """Scalars entering the ultimate-bound formulas.

    c        assumed (unknown) bound on the lumped uncertainty norm
    Gamma    bound on the integrated delay-window disturbance energy
    theta_norm  norm of the switching-input increment du(t) - du(t-h)
    alpha    switching-gain multiplier, > 1
    epsilon  boundary-layer width
    gamma    adaptive-gain floor
    c_hat    switching-gain value at which the bound is evaluated
    h        input delay in seconds
    """

    c: float = 0.0
    Gamma: float = 0.0
    theta_norm: float = 0.0
    alpha: float = 2.0
    epsilon: float = 0.1
    gamma: float = 1e-3
    c_hat: float = 1e-3
    h: float = 0.0

    def __post_init__(self):
        for name in ("c", "Gamma", "theta_norm", "epsilon", "gamma", "c_hat", "h"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")
        if not self.alpha > 1.0:
            raise ValueError("alpha must exceed 1")
        if self.epsilon <= 0.0 or self.gamma <= 0.0 or self.c_hat <= 0.0:
            raise ValueError("epsilon, gamma, c_hat must be positive")


def ultimate_bound(case_id: int, gains: GainSet, bp: BoundParams) -> float:
    """Ultimate tracking-error bound for one of the six switching regimes.

    Cases 1-3 hold outside the boundary layer (||s|| >= epsilon), 4-6 inside;
    within each group the branches follow the adaptive law: gain increasing,
    gain decreasing, gain at its floor. Negative intermediate factors are
    clamped to zero: a negative factor means the decrease condition already
    holds for every error, so zero is the valid conservative value.
    """
    if case_id not in (1, 2, 3, 4, 5, 6):
        raise ValueError("case_id must be 1..6")
    system = build_error_system(gains)
    psi = symmetrize(gains.Q - bp.h * system.E)
    lam = min_eig_symmetric(psi)
    if lam <= 0.0:
        raise ValueError("delay too large for bound")
    bp_norm = spectral_norm(system.B.T @ system.P)
    alpha, eps, gam = bp.alpha, bp.epsilon, bp.gamma
    c, c_hat, theta = bp.c, bp.c_hat, bp.theta_norm

    if case_id == 1:
        mu = theta * bp_norm / lam
        return mu + np.sqrt(2.0 * bp.Gamma / lam + mu * mu)
    if case_id == 2:
        mu = max(0.0, 2.0 * c - (alpha + 1.0) * c_hat + theta) * bp_norm / lam
        return mu + np.sqrt(2.0 * bp.Gamma / lam + mu * mu)
    if case_id == 3:
        mu = max(0.0, c - alpha * c_hat + theta) / lam
        return mu + np.sqrt(2.0 * (bp.Gamma + gam * gam) / lam + mu * mu)
    if case_id == 4:
        num = 4.0 * alpha * bp.Gamma * c_hat + eps * (c_hat + theta) ** 2
        return np.sqrt(num / (2.0 * alpha * c_hat * lam))
    if case_id == 5:
        num = 4.0 * alpha * bp.Gamma * c_hat + eps * max(0.0, 2.0 * c - c_hat + theta) ** 2
        return np.sqrt(num / (2.0 * alpha * c_hat * lam))
    num = 4.0 * alpha * c_hat * (bp.Gamma + gam * gam) + eps * (c + theta) ** 2
    return np.sqrt(num / (2.0 * alpha * c_hat * lam))


def reaching_time(e0_norm: float, bound: float, c0: float) -> float:
    """Worst-case time to reach the ultimate-bound ball from ||e(t0)|| = e0_norm.

    Zero when the initial error already lies inside the ball. c0 is the
    assumed decay-rate margin of the Lyapunov derivative, c0 > 0.
    """
    if c0 <= 0.0:
        raise ValueError("c0 must be positive")
    return max(0.0, (e0_norm - bound) / c0)
