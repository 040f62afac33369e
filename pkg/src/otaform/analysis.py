"""Disagreement metrics, convergence thresholds and trace verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .agents import fit_certificate
from .stochastic import certify_mixing

CONVERGED = "converged"
DIVERGED = "diverged"
UNDECIDED = "undecided"

MSE_RATIO_CONVERGED = 1e-3


def delta_seminorm(stacked) -> float:
    """Max pairwise Euclidean distance among the planar components."""
    x = np.asarray(stacked, dtype=float).reshape(-1, 2)
    diff = x[:, None, :] - x[None, :, :]
    return float(np.sqrt((diff ** 2).sum(axis=2)).max())


def formation_mse(positions, spec) -> float:
    """Mean squared deviation of shifted positions from their mean."""
    p = np.asarray(positions, dtype=float) - spec.displacements
    return float(((p - p.mean(axis=0)) ** 2).sum(axis=1).mean())


def theorem1_threshold(C_hat: float, lambda_min: float, mu: float,
                       L: int) -> float:
    """Minimum inter-communication time guaranteeing convergence.

    May be negative, in which case the condition is vacuous for any
    positive interval length.
    """
    if C_hat <= 0 or lambda_min <= 0:
        raise ValueError("C_hat and lambda_min must be positive")
    if not (0.0 < mu <= 1.0) or L < 1:
        raise ValueError("need mu in (0, 1] and L >= 1")
    return -math.log(((1.0 + mu) ** (1.0 / L) - 1.0) / (2.0 * C_hat)) / lambda_min


def theorem2_bound(sigma_min: float, mu: float, L: int) -> float:
    """Right-hand side of the geometry-aware condition on sigma_{i,k} beta_i."""
    if not (0.0 < sigma_min <= 1.0):
        raise ValueError("sigma_min must lie in (0, 1]")
    if not (0.0 < mu <= 1.0) or L < 1:
        raise ValueError("need mu in (0, 1] and L >= 1")
    return 0.5 * ((1.0 + sigma_min ** L * mu) ** (1.0 / L) - 1.0)


def theorem2_check(sigmas, betas, mu: float, L: int):
    """Evaluate sigma_{i,k} beta_i < bound for every agent and instant.

    Returns (satisfied, bound, sigma_beta) where sigma_beta has the
    schedule's shape.
    """
    values = sigmas.values * np.asarray(betas, dtype=float)[None, :]
    bound = theorem2_bound(sigmas.sigma_min, mu, L)
    return bool(values.max() < bound), bound, values


def beta_star(sigma_min: float, mu: float, L: int) -> float:
    """Radius-multiplier ceiling: bound / sigma_min."""
    return theorem2_bound(sigma_min, mu, L) / sigma_min


def end_of_interval_radius(beta_i: float, sigma_ik: float, p_k,
                           r_kplus) -> float:
    """Guaranteed ball radius around the segment point at interval end."""
    return beta_i * sigma_ik * float(np.linalg.norm(
        np.asarray(p_k, dtype=float) - np.asarray(r_kplus, dtype=float)))


@dataclass(frozen=True)
class MetricsSeries:
    times: np.ndarray
    delta: np.ndarray
    mse: np.ndarray


@dataclass(frozen=True)
class TheoremReport:
    L: int
    mu: float                      # realized mixing margin; <= 0: uncertified
    t_star: float                  # nan when mu is uncertified
    C_hat: float
    lambda_min: float
    beta_hat: float
    beta_i: np.ndarray             # per agent
    sigma_min: float
    sigma_beta: np.ndarray         # per (instant, agent); nan where unfitted
    theorem1_satisfied: bool
    theorem2_bound: float
    theorem2_satisfied: bool
    beta_star: float
    unfitted_intervals: int = field(default=0)


def verdict(metrics: MetricsSeries) -> str:
    """Empirical convergence verdict from the MSE series.

    The theorems give sufficient conditions only; this judges the realized
    trajectory.
    """
    mse = np.asarray(metrics.mse, dtype=float)
    if mse.size < 10:
        raise ValueError("need at least 10 communication instants for a verdict")
    mse0, mse_end = mse[0], mse[-1]
    if mse0 == 0.0:
        return CONVERGED
    if mse_end <= MSE_RATIO_CONVERGED * mse0:
        return CONVERGED
    if mse_end >= mse0:
        tail = mse[-(mse.size // 4):]
        slope = np.polyfit(np.arange(tail.size, dtype=float), tail, 1)[0]
        if slope > 0:
            return DIVERGED
    return UNDECIDED


def trace_metrics(trace) -> MetricsSeries:
    spec = trace.spec
    times = np.asarray(trace.times)
    delta = np.array([delta_seminorm((p - spec.displacements).reshape(-1))
                      for p in trace.positions])
    mse = np.array([formation_mse(p, spec) for p in trace.positions])
    return MetricsSeries(times=times, delta=delta, mse=mse)


def fit_trace_certificates(trace, sigma_grid=None):
    """Per-(interval, agent) tracking certificates from the dense samples.

    Intervals starting inside the deadband of the reference are skipped
    (already at the target; no contraction to certify) and left as None.
    """
    from .agents import DEFAULT_SIGMA_GRID
    grid = DEFAULT_SIGMA_GRID if sigma_grid is None else sigma_grid
    K, n = trace.updates, trace.n
    certs = [[None] * n for _ in range(K)]
    for k in range(K):
        for i in range(n):
            p0 = trace.positions[k, i]
            r = trace.references[k, i]
            if np.linalg.norm(p0 - r) <= trace.deadband:
                continue
            certs[k][i] = fit_certificate(
                trace.sample_times[k], trace.dense[k][i], p0, r,
                sigma_grid=grid, deadband=trace.deadband)
    return certs


def build_report(trace, L: Optional[int] = None) -> TheoremReport:
    """Mechanical check of the convergence conditions on a realized trace.

    mu and L come from certifying the realized H_k sequence, not the
    generating process. Per-agent constants aggregate conservatively over
    intervals (max C, min lambda).
    """
    n = trace.n
    K = trace.updates
    if L is None:
        L = max(1, n - 1)
    cert = certify_mixing([trace.h_matrices[k] for k in range(K)], L) \
        if K >= L else None
    mu = cert.contraction_margin if cert is not None else 0.0

    t_min = float(np.min(np.diff(trace.times)))
    fits = fit_trace_certificates(trace)

    C_i = np.full(n, np.nan)
    lam_i = np.full(n, np.nan)
    sigma = np.full((K, n), np.nan)
    unfitted = 0
    for i in range(n):
        cs, ls = [], []
        for k in range(K):
            f = fits[k][i]
            if f is None:
                if np.linalg.norm(trace.positions[k, i]
                                  - trace.references[k, i]) > trace.deadband:
                    unfitted += 1
                continue
            cs.append(f.C)
            ls.append(f.lam)
            sigma[k, i] = f.sigma
        if cs:
            C_i[i] = max(cs)
            lam_i[i] = min(ls)

    beta_i = C_i * np.exp(-lam_i * t_min)
    fitted = ~np.isnan(C_i)
    C_hat = float(np.nanmax(C_i)) if fitted.any() else math.nan
    lambda_min = float(np.nanmin(lam_i)) if fitted.any() else math.nan
    beta_hat = float(np.nanmax(beta_i)) if fitted.any() else math.nan

    certified = mu > 0.0 and fitted.any()
    if certified:
        t_star = theorem1_threshold(C_hat, lambda_min, mu, L)
        thm1 = t_min > t_star
        sig_vals = sigma[~np.isnan(sigma)]
        sigma_min = float(sig_vals.min()) if sig_vals.size else math.nan
        sb = sigma * beta_i[None, :]
        if sig_vals.size:
            bound = theorem2_bound(sigma_min, mu, L)
            bstar = beta_star(sigma_min, mu, L)
            # only certify when every off-reference interval was fitted
            thm2 = unfitted == 0 and bool(np.nanmax(sb) < bound)
        else:
            bound = math.nan
            bstar = math.nan
            thm2 = False
    else:
        t_star = math.nan
        thm1 = False
        sigma_min = math.nan
        sb = sigma * beta_i[None, :]
        bound = math.nan
        thm2 = False
        bstar = math.nan

    return TheoremReport(
        L=L, mu=mu, t_star=t_star, C_hat=C_hat, lambda_min=lambda_min,
        beta_hat=beta_hat, beta_i=beta_i, sigma_min=sigma_min, sigma_beta=sb,
        theorem1_satisfied=thm1, theorem2_bound=bound,
        theorem2_satisfied=thm2, beta_star=bstar,
        unfitted_intervals=unfitted)
