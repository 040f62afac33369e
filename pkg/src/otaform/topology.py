"""Time-varying digraphs, wireless superposition and transmission accounting.

Arc convention: (i, j) means agent i transmits to agent j. Channel
coefficients are stored receiver-major: xi[i, j] is the gain from
transmitter j into receiver i, positive exactly on arcs (j, i).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .stochastic import RowStochasticMatrix, ValidationError


class ConfigurationError(ValueError):
    """Raised for infeasible generator or scenario parameters."""


@dataclass(frozen=True)
class DirectedGraph:
    n: int
    arcs: frozenset  # of (i, j) pairs, i transmits to j

    def __post_init__(self):
        for i, j in self.arcs:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValidationError(f"arc ({i}, {j}) out of range for n={self.n}")
        missing = [i for i in range(self.n) if (i, i) not in self.arcs]
        if missing:
            raise ValidationError(f"nodes {missing} lack a self-loop")

    def in_neighbors(self, i: int):
        return sorted(j for (j, tgt) in self.arcs if tgt == i)

    def is_strongly_connected(self) -> bool:
        fwd = {i: [] for i in range(self.n)}
        rev = {i: [] for i in range(self.n)}
        for i, j in self.arcs:
            fwd[i].append(j)
            rev[j].append(i)
        return _reaches_all(fwd, 0, self.n) and _reaches_all(rev, 0, self.n)


def _reaches_all(adj, start, n) -> bool:
    seen = {start}
    stack = [start]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == n


@dataclass(frozen=True)
class ChannelRealization:
    """Arc set plus positive channel coefficients at one communication instant."""

    graph: DirectedGraph
    xi: np.ndarray  # (n, n), xi[receiver, transmitter]
    instant: int

    def __post_init__(self):
        x = np.asarray(self.xi, dtype=float)
        n = self.graph.n
        if x.shape != (n, n):
            raise ValidationError(f"xi shape {x.shape} != ({n}, {n})")
        on_arc = np.zeros((n, n), dtype=bool)
        for i, j in self.graph.arcs:
            on_arc[j, i] = True
        if np.any(x[on_arc] <= 0) or np.any(x[on_arc] > 1):
            raise ValidationError("arc coefficients must lie in (0, 1]")
        if np.any(x[~on_arc] != 0):
            raise ValidationError("nonzero coefficient off an arc")
        x = x.copy()
        x.setflags(write=False)
        object.__setattr__(self, "xi", x)

    @property
    def n(self) -> int:
        return self.graph.n


@dataclass(frozen=True)
class TransmissionLedger:
    """Running comparison of OTA channel use against a node-to-node scheme."""

    ota_count: int = 0
    n2n_count: int = 0
    instants: int = 0


def superpose(real: ChannelRealization, receiver: int, payload) -> float:
    """Superimposed scalar received over the WMAC: sum of xi_ij * alpha_j."""
    alpha = np.asarray(payload, dtype=float)
    return float(real.xi[receiver] @ alpha)


def normalized_aggregate(real: ChannelRealization, receiver: int, payload) -> np.ndarray:
    """Receiver-side normalized convex combination of broadcast 2-vectors.

    Each payload component goes out on its own orthogonal channel; one more
    channel carries the constant 1 used for normalization. Coefficients are
    held fixed across these channels within the instant.
    """
    mu = np.asarray(payload, dtype=float)
    row = real.xi[receiver]
    nu = row @ mu
    nu_prime = float(row.sum())
    return nu / nu_prime


def effective_matrix(real: ChannelRealization) -> RowStochasticMatrix:
    """Normalized channel coefficients H_k; row-stochastic, positive diagonal."""
    x = real.xi
    return RowStochasticMatrix(x / x.sum(axis=1, keepdims=True))


@dataclass(frozen=True)
class TopologyParams:
    extra_arc_prob: float = 0.2
    xi_min: float = 0.1
    cycle_backbone: bool = True

    def __post_init__(self):
        if not (0.0 <= self.extra_arc_prob <= 1.0):
            raise ConfigurationError("extra_arc_prob must lie in [0, 1]")
        if not (0.0 < self.xi_min <= 1.0):
            raise ConfigurationError("xi_min must lie in (0, 1]")
        if not self.cycle_backbone and self.extra_arc_prob == 0.0:
            raise ConfigurationError(
                "no cycle backbone and zero extra-arc probability cannot "
                "yield strongly connected graphs")


def generate_topology_sequence(n: int, K: int, params: TopologyParams,
                               seed) -> list:
    """K strongly connected realizations with self-loops, deterministic in seed.

    Graph structure and coefficient draws use independent child streams of
    the seed so changing one does not perturb the other.
    """
    if n < 2:
        raise ConfigurationError("need at least 2 agents")
    if K < 1:
        raise ConfigurationError("need at least 1 instant")
    ss = np.random.SeedSequence(seed) if not isinstance(seed, np.random.SeedSequence) else seed
    graph_rng, coef_rng = (np.random.default_rng(s) for s in ss.spawn(2))
    out = []
    for k in range(K):
        arcs = {(i, i) for i in range(n)}
        if params.cycle_backbone:
            perm = graph_rng.permutation(n)
            for a in range(n):
                arcs.add((int(perm[a]), int(perm[(a + 1) % n])))
        extra = graph_rng.random((n, n)) < params.extra_arc_prob
        for i in range(n):
            for j in range(n):
                if i != j and extra[i, j]:
                    arcs.add((i, j))
        graph = DirectedGraph(n=n, arcs=frozenset(arcs))
        if not params.cycle_backbone and not graph.is_strongly_connected():
            # resample structure until connected; coefficient stream untouched
            while not graph.is_strongly_connected():
                extra = graph_rng.random((n, n)) < params.extra_arc_prob
                arcs = {(i, i) for i in range(n)}
                arcs.update((i, j) for i in range(n) for j in range(n)
                            if i != j and extra[i, j])
                graph = DirectedGraph(n=n, arcs=frozenset(arcs))
        xi = np.zeros((n, n))
        draws = coef_rng.uniform(params.xi_min, 1.0, size=(n, n))
        for i, j in graph.arcs:
            xi[j, i] = draws[j, i]
        out.append(ChannelRealization(graph=graph, xi=xi, instant=k))
    return out


def record_instant(ledger: TransmissionLedger, real: ChannelRealization,
                   payload_dim: int) -> TransmissionLedger:
    """Account one communication instant: payload_dim + 1 OTA channels versus
    two node-to-node channels per non-self arc."""
    if payload_dim < 1:
        raise ConfigurationError("payload_dim must be >= 1")
    non_self = sum(1 for i, j in real.graph.arcs if i != j)
    return replace(
        ledger,
        ota_count=ledger.ota_count + payload_dim + 1,
        n2n_count=ledger.n2n_count + 2 * non_self,
        instants=ledger.instants + 1,
    )
