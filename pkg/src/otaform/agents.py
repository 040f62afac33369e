"""Agent models: the unicycle with feedback-linearization tracking, a
first-order linear oracle agent, and tracking-certificate fitting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .topology import ConfigurationError

CONTROLLER_VARIANTS = {
    "perpendicular": kernels.VARIANT_PERPENDICULAR,
    "paper_literal": kernels.VARIANT_PAPER_LITERAL,
}

DEFAULT_SIGMA_GRID = tuple(round(0.05 * i, 2) for i in range(1, 21))


@dataclass(frozen=True)
class UnicycleState:
    x: float
    y: float
    theta: float  # wrapped to [0, 2pi) at readout only

    @property
    def position(self) -> np.ndarray:
        return np.array((self.x, self.y))

    @property
    def heading(self) -> float:
        return self.theta % (2.0 * math.pi)


@dataclass(frozen=True)
class ControllerParams:
    gamma: float          # contraction gain, 1/s
    mu_rot: float = 0.0   # rotation gain, 1/s (may be negative)
    kappa_eps: float = 0.5
    deadband: float = 1e-6  # meters; inputs zeroed inside
    variant: str = "perpendicular"

    def __post_init__(self):
        if self.gamma <= 0:
            raise ConfigurationError("gamma must be positive")
        if not (0.0 < self.kappa_eps < 1.0):
            raise ConfigurationError("kappa_eps must lie in (0, 1)")
        if self.deadband <= 0:
            raise ConfigurationError("deadband must be positive")
        if self.variant not in CONTROLLER_VARIANTS:
            raise ConfigurationError(f"unknown controller variant {self.variant!r}")


@dataclass(frozen=True)
class TrackingCertificate:
    """Witness of exponential convergence to the segment point
    s = (1 - sigma) * p(tau) + sigma * r over a flow interval."""

    C: float       # overshoot constant, >= 1
    lam: float     # decay rate, 1/s
    sigma: float   # segment fraction in (0, 1]

    def beta(self, t_min: float) -> float:
        """End-of-interval contraction factor C * exp(-lam * t_min)."""
        return self.C * math.exp(-self.lam * t_min)


@dataclass(frozen=True)
class AgentModel:
    """Dynamics/output/controller triple; dynamically independent of other
    agents, coupled only through the held reference."""

    name: str
    state_dim: int
    dynamics: Callable  # (t, x, u) -> dx/dt
    output: Callable    # (t, x) -> p in R^2
    controller: Callable  # (t, x, r) -> u


def unicycle_control(state: UnicycleState, r, params: ControllerParams):
    """Inputs (v, omega) driving the offset point toward the reference."""
    rx, ry = float(r[0]), float(r[1])
    return kernels.unicycle_control(
        state.x, state.y, state.theta, rx, ry, params.gamma, params.mu_rot,
        params.kappa_eps, params.deadband, CONTROLLER_VARIANTS[params.variant])


def unicycle_derivative(state: UnicycleState, v: float, omega: float):
    return (v * math.cos(state.theta), v * math.sin(state.theta), omega)


def unicycle_agent(params: ControllerParams) -> AgentModel:
    variant = CONTROLLER_VARIANTS[params.variant]

    def dynamics(t, x, u):
        v, omega = u
        return np.array((v * math.cos(x[2]), v * math.sin(x[2]), omega))

    def output(t, x):
        return np.asarray(x[:2])

    def controller(t, x, r):
        return kernels.unicycle_control(
            x[0], x[1], x[2], r[0], r[1], params.gamma, params.mu_rot,
            params.kappa_eps, params.deadband, variant)

    return AgentModel(name="unicycle", state_dim=3, dynamics=dynamics,
                      output=output, controller=controller)


def first_order_agent(lam: float) -> AgentModel:
    """Planar agent with flow p(t) = r + exp(-lam (t - tau)) (p(tau) - r).

    Moves on the straight segment toward the reference, so it satisfies the
    exponential-tracking assumption with C = 1 exactly; used as an
    integration and certificate oracle.
    """
    if lam <= 0:
        raise ConfigurationError("lambda must be positive")

    def dynamics(t, x, u):
        return np.asarray(u)

    def output(t, x):
        return np.asarray(x)

    def controller(t, x, r):
        return lam * (np.asarray(r) - np.asarray(x))

    return AgentModel(name="first_order", state_dim=2, dynamics=dynamics,
                      output=output, controller=controller)


def fit_certificate(times, positions, p0, r,
                    sigma_grid=DEFAULT_SIGMA_GRID,
                    deadband: float = 1e-6) -> Optional[TrackingCertificate]:
    """Fit the smallest exponential envelope toward a segment point.

    For each sigma on the grid, the segment point s = (1-sigma) p0 + sigma r
    is fixed, log distances are fit by least squares, and C is inflated so
    the envelope dominates every sample. Among sigmas admitting a decaying
    envelope (lam > 0), returns the certificate minimizing
    sigma * C * exp(-lam * T) with T the sampled interval length; returns
    None when no sigma decays.
    """
    t = np.asarray(times, dtype=float)
    p = np.asarray(positions, dtype=float)
    if t.size < 3:
        raise ValueError("need at least 3 samples to fit a certificate")
    p0 = np.asarray(p0, dtype=float)
    r = np.asarray(r, dtype=float)
    dist0 = float(np.linalg.norm(p0 - r))
    if dist0 <= deadband:
        raise ValueError("start position inside the deadband of the reference")
    tt = t - t[0]
    T = float(tt[-1])
    best = None
    best_score = math.inf
    for sigma in sigma_grid:
        s = (1.0 - sigma) * p0 + sigma * r
        d = np.linalg.norm(p - s, axis=1)
        d0 = sigma * dist0
        rel = np.maximum(d / d0, 1e-300)
        log_rel = np.log(rel)
        slope = np.polyfit(tt, log_rel, 1)[0]
        lam = -float(slope)
        # lam * T below noise level is a flat, non-decaying fit
        if not math.isfinite(lam) or lam * T <= 1e-9:
            continue
        # inflate C in log space so the envelope dominates every sample
        log_c = max(0.0, float(np.max(log_rel + lam * tt)))
        if log_c > 700.0:  # absurd overshoot, not a usable certificate
            continue
        C = math.exp(log_c)
        score = sigma * math.exp(log_c - lam * T)
        if score < best_score:
            best_score = score
            best = TrackingCertificate(C=C, lam=lam, sigma=float(sigma))
    return best
