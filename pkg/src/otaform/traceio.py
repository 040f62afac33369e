"""CSV and report serialization for simulation traces."""

from __future__ import annotations

import math

import numpy as np

from .analysis import (MetricsSeries, TheoremReport, build_report,
                       trace_metrics, verdict)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_trace_csv(trace, path) -> MetricsSeries:
    """One row per communication instant: metrics, running transmission
    counts, per-agent positions/references, then the flattened H_k.

    The final row is the horizon endpoint; no update happens there, so its
    H entries are nan and counts repeat the totals.
    """
    metrics = trace_metrics(trace)
    n = trace.n
    K = trace.updates
    header = ["k", "t", "mse", "delta", "ota_count", "n2n_count"]
    for i in range(n):
        header += [f"p{i}_x", f"p{i}_y", f"r{i}_x", f"r{i}_y"]
    header += [f"h_{i}_{j}" for i in range(n) for j in range(n)]
    lines = [",".join(header)]
    for k in range(K + 1):
        if k < K:
            ota, n2n = trace.ledger_snapshots[k]
            h_flat = trace.h_matrices[k].entries.reshape(-1)
        else:
            ota, n2n = trace.ledger.ota_count, trace.ledger.n2n_count
            h_flat = np.full(n * n, math.nan)
        row = [str(k), _fmt(trace.times[k]), _fmt(metrics.mse[k]),
               _fmt(metrics.delta[k]), str(ota), str(n2n)]
        for i in range(n):
            row += [_fmt(trace.positions[k, i, 0]),
                    _fmt(trace.positions[k, i, 1]),
                    _fmt(trace.references[k, i, 0]),
                    _fmt(trace.references[k, i, 1])]
        row += [_fmt(v) for v in h_flat]
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return metrics


def write_dense_csv(trace, path) -> None:
    """Sidecar with the within-interval path samples used for fitting."""
    lines = ["k,agent,sample,t,x,y"]
    for k in range(trace.updates):
        stimes = trace.sample_times[k]
        for i in range(trace.n):
            for m, t in enumerate(stimes):
                p = trace.dense[k][i][m]
                lines.append(f"{k},{i},{m},{_fmt(t)},{_fmt(p[0])},{_fmt(p[1])}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def format_report(trace, metrics: MetricsSeries, report: TheoremReport) -> str:
    cfg = trace.config
    v = verdict(metrics) if len(metrics.mse) >= 10 else "n/a"
    out = []
    out.append("scenario:")
    out.append(f"  n = {cfg.n}")
    out.append(f"  horizon = {_fmt(cfg.horizon)} s")
    out.append(f"  t_min = {_fmt(cfg.t_min)} s, t_max = {_fmt(cfg.t_max)} s"
               f" ({cfg.schedule_mode} schedule)")
    out.append(f"  model = {cfg.model}, controller_variant = {cfg.controller_variant}")
    out.append(f"  mu_rot = {_fmt(cfg.mu_rot)} 1/s, kappa_eps = {_fmt(cfg.kappa_eps)}")
    out.append(f"  seed = {cfg.seed}")
    if trace.gammas is not None:
        out.append("  gamma = [" + ", ".join(_fmt(g) for g in trace.gammas) + "]")
    out.append("")
    out.append("metrics:")
    out.append(f"  updates = {trace.updates}")
    out.append(f"  mse_initial = {_fmt(metrics.mse[0])}")
    out.append(f"  mse_final = {_fmt(metrics.mse[-1])}")
    ratio = metrics.mse[-1] / metrics.mse[0] if metrics.mse[0] > 0 else math.nan
    out.append(f"  mse_ratio = {_fmt(ratio)}")
    out.append(f"  verdict = {v}")
    out.append("")
    out.append("transmissions:")
    out.append(f"  ota_count = {trace.ledger.ota_count}")
    out.append(f"  n2n_count = {trace.ledger.n2n_count}")
    out.append(f"  instants = {trace.ledger.instants}")
    out.append("")
    out.append("conditions (sufficient, checked on the realized trace):")
    out.append(f"  L = {report.L}, mu = {_fmt(report.mu)}"
               f" ({'certified' if report.mu > 0 else 'NOT certified at this L'})")
    out.append(f"  C_hat = {_fmt(report.C_hat)}, lambda_min = {_fmt(report.lambda_min)}")
    out.append(f"  beta_hat = {_fmt(report.beta_hat)}")
    out.append(f"  t_star = {_fmt(report.t_star)} s,"
               f" rate_condition_satisfied = {report.theorem1_satisfied}")
    out.append(f"  sigma_min = {_fmt(report.sigma_min)}")
    sb = report.sigma_beta[~np.isnan(report.sigma_beta)]
    out.append(f"  max sigma*beta = {_fmt(float(sb.max())) if sb.size else 'nan'}")
    out.append(f"  geometry_bound = {_fmt(report.theorem2_bound)},"
               f" geometry_condition_satisfied = {report.theorem2_satisfied}")
    out.append(f"  beta_star = {_fmt(report.beta_star)}")
    out.append(f"  unfitted_intervals = {report.unfitted_intervals}")
    out.append("")
    out.append("note: the conditions are sufficient only; an unsatisfied bound")
    out.append("does not imply the observed verdict must be divergence.")
    return "\n".join(out) + "\n"


def write_outputs(trace, out_dir, stem: str):
    """Write trace CSV, dense sidecar and a text report; returns (metrics,
    report, verdict string)."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    metrics = write_trace_csv(trace, os.path.join(out_dir, f"{stem}_trace.csv"))
    write_dense_csv(trace, os.path.join(out_dir, f"{stem}_dense.csv"))
    report = build_report(trace)
    text = format_report(trace, metrics, report)
    with open(os.path.join(out_dir, f"{stem}_report.txt"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    v = verdict(metrics) if len(metrics.mse) >= 10 else "n/a"
    return metrics, report, v
