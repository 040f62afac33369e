"""Deterministic jump-flow execution: scheduling, integration, traces."""

from __future__ import annotations

import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .agents import AgentModel, ControllerParams, first_order_agent
from .formation import FormationSpec, jump_update, regular_polygon
from .topology import (ChannelRealization, ConfigurationError, TopologyParams,
                       TransmissionLedger, effective_matrix,
                       generate_topology_sequence, record_instant)


class SimulationError(RuntimeError):
    """Raised when a run aborts (e.g., non-finite state)."""


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    horizon: float
    t_min: float
    t_max: float
    seed: int
    schedule_mode: str = "fixed"      # "fixed" or "random"
    step: float = 1e-3
    samples_per_interval: int = 20
    model: str = "unicycle"           # or "first_order"
    controller_variant: str = "perpendicular"
    kappa_eps: float = 0.5
    deadband: float = 1e-6
    mu_rot: float = 0.0
    gamma: object = "sampled"         # "sampled", a number, or per-agent list
    gamma_scale: float = 10.0
    gamma_a_low: float = 0.4
    gamma_a_high: float = 1.0
    first_order_lambda: float = 1.0
    formation_type: str = "polygon"   # or "explicit"
    formation_radius: float = 5.0
    displacements: Optional[tuple] = None
    topology: TopologyParams = field(default_factory=TopologyParams)
    init_low: float = -5.0
    init_high: float = 5.0

    def __post_init__(self):
        if self.n < 2:
            raise ConfigurationError("n must be >= 2")
        if not (0.0 < self.t_min <= self.t_max):
            raise ConfigurationError("need 0 < t_min <= t_max")
        if self.horizon <= 0:
            raise ConfigurationError("horizon must be positive")
        if self.step > self.t_min / 10.0 + 1e-15:
            raise ConfigurationError("integrator step must be <= t_min / 10")
        if self.schedule_mode not in ("fixed", "random"):
            raise ConfigurationError(f"unknown schedule mode {self.schedule_mode!r}")
        if self.schedule_mode == "fixed" and self.t_min != self.t_max:
            raise ConfigurationError("fixed schedule requires t_min == t_max")
        if self.model not in ("unicycle", "first_order"):
            raise ConfigurationError(f"unknown agent model {self.model!r}")
        if self.samples_per_interval < 3:
            raise ConfigurationError("samples_per_interval must be >= 3")
        if self.formation_type not in ("polygon", "explicit"):
            raise ConfigurationError(f"unknown formation type {self.formation_type!r}")
        if self.formation_type == "explicit" and self.displacements is None:
            raise ConfigurationError("explicit formation requires displacements")

    def formation_spec(self) -> FormationSpec:
        if self.formation_type == "polygon":
            return regular_polygon(self.n, self.formation_radius)
        d = np.asarray(self.displacements, dtype=float)
        if d.shape != (self.n, 2):
            raise ConfigurationError(
                f"displacements shape {d.shape} != ({self.n}, 2)")
        return FormationSpec(d)


# TOML schema: section -> key -> ScenarioConfig field (None = same name)
_SCHEMA = {
    "scenario": {"n": None, "horizon": None, "seed": None,
                 "integrator_step": "step",
                 "samples_per_interval": None},
    "schedule": {"mode": "schedule_mode", "t_min": None, "t_max": None},
    "agents": {"model": None, "controller_variant": None,
               "kappa_eps": None, "deadband": None, "mu_rot": None,
               "gamma": None, "gamma_scale": None, "gamma_a_low": None,
               "gamma_a_high": None, "lambda": "first_order_lambda"},
    "formation": {"type": "formation_type", "radius": "formation_radius",
                  "displacements": None},
    "topology": {"extra_arc_prob": None, "xi_min": None,
                 "cycle_backbone": None},
    "init": {"position_low": "init_low", "position_high": "init_high"},
}


def config_from_dict(data: dict, seed_override: Optional[int] = None
                     ) -> ScenarioConfig:
    kwargs = {}
    topo_kwargs = {}
    for section, content in data.items():
        if section not in _SCHEMA:
            raise ConfigurationError(f"unknown config section [{section}]")
        if not isinstance(content, dict):
            raise ConfigurationError(f"[{section}] must be a table")
        for key, value in content.items():
            if key not in _SCHEMA[section]:
                raise ConfigurationError(
                    f"unknown key {key!r} in section [{section}]")
            target = _SCHEMA[section][key] or key
            if section == "topology":
                topo_kwargs[target] = value
            elif key == "displacements":
                kwargs[target] = tuple(tuple(row) for row in value)
            else:
                kwargs[target] = value
    if topo_kwargs:
        kwargs["topology"] = TopologyParams(**topo_kwargs)
    if seed_override is not None:
        kwargs["seed"] = int(seed_override)
    missing = {"n", "horizon", "seed", "t_min", "t_max"} - kwargs.keys()
    if missing:
        raise ConfigurationError(f"missing required keys: {sorted(missing)}")
    return ScenarioConfig(**kwargs)


def load_config(path, seed_override: Optional[int] = None) -> ScenarioConfig:
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigurationError(f"cannot parse {path}: {exc}") from exc
    return config_from_dict(data, seed_override=seed_override)


def _streams(config: ScenarioConfig):
    """Independent child streams so changing one scenario dimension does not
    perturb the others."""
    topo, init, gains, sched = np.random.SeedSequence(config.seed).spawn(4)
    return topo, np.random.default_rng(init), np.random.default_rng(gains), \
        np.random.default_rng(sched)


def schedule_instants(config: ScenarioConfig) -> np.ndarray:
    """Communication instants: t_0 = 0, gaps within [t_min, t_max].

    Fixed mode lays a uniform grid; random mode draws gaps uniformly,
    deterministic in the config seed. A horizon shorter than t_min yields
    the single instant 0.
    """
    rng = _streams(config)[3]
    if config.horizon < config.t_min:
        return np.array([0.0])
    if config.schedule_mode == "fixed":
        T = config.t_min
        m = int(math.floor(config.horizon / T + 1e-9))
        return np.arange(m + 1) * T
    times = [0.0]
    while True:
        gap = rng.uniform(config.t_min, config.t_max)
        if times[-1] + gap > config.horizon + 1e-9:
            break
        times.append(times[-1] + gap)
    return np.array(times)


def integrate_interval(model: AgentModel, state, reference, dt_total: float,
                       step: float, samples: int = 20):
    """Classical fixed-step RK4 of the closed loop with the reference held.

    Returns (end_state, sample_times, sampled_positions); sample times are
    relative to the interval start, start and end inclusive.
    """
    x = np.asarray(state, dtype=float)
    r = np.asarray(reference, dtype=float)
    n_steps = max(1, int(round(dt_total / step)))
    h = dt_total / n_steps
    every = max(1, n_steps // samples)
    idx = list(range(0, n_steps + 1, every))
    if idx[-1] != n_steps:
        idx.append(n_steps)

    def deriv(t, x):
        return np.asarray(model.dynamics(t, x, model.controller(t, x, r)))

    out_states = [x.copy()]
    t = 0.0
    next_i = 1
    for s in range(n_steps):
        k1 = deriv(t, x)
        k2 = deriv(t + 0.5 * h, x + 0.5 * h * k1)
        k3 = deriv(t + 0.5 * h, x + 0.5 * h * k2)
        k4 = deriv(t + h, x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
        if next_i < len(idx) and s + 1 == idx[next_i]:
            out_states.append(x.copy())
            next_i += 1
    sample_times = np.array(idx, dtype=float) * h
    positions = np.array([model.output(ti, xs)
                          for ti, xs in zip(sample_times, out_states)])
    if not np.all(np.isfinite(x)):
        raise SimulationError("non-finite state after flow interval")
    return x, sample_times, positions


@dataclass
class SimTrace:
    config: ScenarioConfig
    spec: FormationSpec
    times: np.ndarray                  # (updates + 1,)
    positions: np.ndarray              # (updates + 1, n, 2)
    references: np.ndarray             # (updates + 1, n, 2)
    h_matrices: list                   # updates RowStochasticMatrix
    realizations: list                 # updates ChannelRealization
    dense: list                        # per update: (n, S_k, 2) positions
    sample_times: list                 # per update: (S_k,) absolute times
    ledger: TransmissionLedger
    ledger_snapshots: list             # per update: (ota, n2n)
    gammas: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def updates(self) -> int:
        return len(self.times) - 1

    @property
    def deadband(self) -> float:
        return self.config.deadband


def run_scenario(config: ScenarioConfig) -> SimTrace:
    """Alternate OTA reference jumps with tracked flow intervals."""
    topo_ss, init_rng, gains_rng, _ = _streams(config)
    times = schedule_instants(config)
    K = len(times) - 1
    spec = config.formation_spec()

    positions0 = init_rng.uniform(config.init_low, config.init_high,
                                  size=(config.n, 2))
    headings0 = init_rng.uniform(0.0, 2.0 * np.pi, size=config.n)

    gammas = None
    if config.model == "unicycle":
        if config.gamma == "sampled":
            a = gains_rng.uniform(config.gamma_a_low, config.gamma_a_high,
                                  size=config.n)
            gammas = -config.gamma_scale * np.log(a)
        elif isinstance(config.gamma, (int, float)):
            gammas = np.full(config.n, float(config.gamma))
        else:
            gammas = np.asarray(config.gamma, dtype=float)
            if gammas.shape != (config.n,):
                raise ConfigurationError("per-agent gamma list has wrong length")
        params = [ControllerParams(gamma=float(g), mu_rot=config.mu_rot,
                                   kappa_eps=config.kappa_eps,
                                   deadband=config.deadband,
                                   variant=config.controller_variant)
                  for g in gammas]
        states = np.column_stack((positions0, headings0))
        variant = 0 if config.controller_variant == "perpendicular" else 1
    else:
        model = first_order_agent(config.first_order_lambda)
        states = positions0.copy()

    reals = generate_topology_sequence(config.n, K, config.topology, topo_ss) \
        if K >= 1 else []

    positions = np.empty((K + 1, config.n, 2))
    references = np.empty((K + 1, config.n, 2))
    h_matrices = []
    dense = []
    dense_times = []
    snapshots = []
    ledger = TransmissionLedger()
    refs = positions0.copy()  # held until the first jump at t_0 = 0

    for k in range(K):
        p_k = states[:, :2].copy()
        positions[k] = p_k
        ref_state = jump_update(p_k, spec, reals[k])
        refs = ref_state.refs
        references[k] = refs
        h_matrices.append(effective_matrix(reals[k]))
        ledger = record_instant(ledger, reals[k], payload_dim=2)
        snapshots.append((ledger.ota_count, ledger.n2n_count))

        dt = float(times[k + 1] - times[k])
        n_steps = max(1, int(round(dt / config.step)))
        h = dt / n_steps
        every = max(1, n_steps // config.samples_per_interval)
        block = None
        stimes = None
        for i in range(config.n):
            if config.model == "unicycle":
                pr = params[i]
                end, samp = kernels.unicycle_flow(
                    states[i, 0], states[i, 1], states[i, 2],
                    refs[i, 0], refs[i, 1], pr.gamma, pr.mu_rot,
                    pr.kappa_eps, pr.deadband, variant, h, n_steps, every)
                states[i] = end
                samp_pos = samp[:, :2]
                idx = list(range(0, n_steps + 1, every))
                if idx[-1] != n_steps:
                    idx.append(n_steps)
                stimes = times[k] + np.array(idx, dtype=float) * h
            else:
                end, rel_t, samp_pos = integrate_interval(
                    model, states[i], refs[i], dt, config.step,
                    samples=config.samples_per_interval)
                states[i] = end
                stimes = times[k] + rel_t
            if block is None:
                block = np.empty((config.n,) + samp_pos.shape)
            block[i] = samp_pos
        if not np.all(np.isfinite(states)):
            raise SimulationError(f"non-finite state at instant index {k}")
        dense.append(block)
        dense_times.append(stimes)

    positions[K] = states[:, :2]
    references[K] = refs

    return SimTrace(config=config, spec=spec, times=times,
                    positions=positions, references=references,
                    h_matrices=h_matrices, realizations=reals, dense=dense,
                    sample_times=dense_times, ledger=ledger,
                    ledger_snapshots=snapshots, gammas=gammas)
