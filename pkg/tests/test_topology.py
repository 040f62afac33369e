import numpy as np
import pytest

from otaform.stochastic import ValidationError
from otaform.topology import (ChannelRealization, ConfigurationError,
                              DirectedGraph, TopologyParams,
                              TransmissionLedger, effective_matrix,
                              generate_topology_sequence, normalized_aggregate,
                              record_instant, superpose)


def two_agent_realization(xi11=0.5, xi12=0.5, xi21=0.5, xi22=0.5):
    g = DirectedGraph(2, frozenset({(0, 0), (1, 1), (0, 1), (1, 0)}))
    return ChannelRealization(g, np.array([[xi11, xi12], [xi21, xi22]]), 0)


class TestDirectedGraph:
    def test_self_loops_required(self):
        with pytest.raises(ValidationError):
            DirectedGraph(2, frozenset({(0, 0), (0, 1)}))

    def test_strong_connectivity(self):
        g = DirectedGraph(3, frozenset({(0, 0), (1, 1), (2, 2),
                                        (0, 1), (1, 2), (2, 0)}))
        assert g.is_strongly_connected()
        g2 = DirectedGraph(3, frozenset({(0, 0), (1, 1), (2, 2), (0, 1)}))
        assert not g2.is_strongly_connected()


class TestChannelRealization:
    def test_coefficient_bounds(self):
        g = DirectedGraph(2, frozenset({(0, 0), (1, 1), (0, 1), (1, 0)}))
        with pytest.raises(ValidationError):
            ChannelRealization(g, np.array([[1.5, 0.5], [0.5, 0.5]]), 0)
        with pytest.raises(ValidationError):
            ChannelRealization(g, np.array([[0.0, 0.5], [0.5, 0.5]]), 0)

    def test_off_arc_must_be_zero(self):
        g = DirectedGraph(2, frozenset({(0, 0), (1, 1), (0, 1)}))
        with pytest.raises(ValidationError):
            # (1, 0) is not an arc but xi[0, 1] nonzero
            ChannelRealization(g, np.array([[0.5, 0.3], [0.5, 0.5]]), 0)


class TestSuperpose:
    def test_weighted_sum(self):
        real = two_agent_realization()
        assert superpose(real, 0, [2.0, 4.0]) == pytest.approx(3.0)

    def test_zero_payload(self):
        real = two_agent_realization()
        assert superpose(real, 0, [0.0, 0.0]) == 0.0

    def test_unit_coefficient_sum(self):
        g = DirectedGraph(3, frozenset({(i, i) for i in range(3)}
                                       | {(1, 0), (2, 0)}))
        xi = np.zeros((3, 3))
        xi[0] = [0.2, 0.3, 0.5]
        xi[1, 1] = xi[2, 2] = 1.0
        real = ChannelRealization(g, xi, 0)
        assert superpose(real, 0, [1.0, 1.0, 1.0]) == pytest.approx(1.0)


class TestNormalizedAggregate:
    def test_consensus_on_equal_payloads(self):
        real = two_agent_realization(0.7, 0.2, 0.4, 0.9)
        v = np.array([3.0, -1.0])
        out = normalized_aggregate(real, 0, np.array([v, v]))
        assert np.allclose(out, v, atol=1e-14)

    def test_equal_weights_average(self):
        real = two_agent_realization(1.0, 1.0, 1.0, 1.0)
        out = normalized_aggregate(real, 0,
                                   np.array([[0.0, 0.0], [2.0, 0.0]]))
        assert np.allclose(out, [1.0, 0.0])

    def test_hand_value_three_agents(self):
        g = DirectedGraph(3, frozenset({(i, i) for i in range(3)}
                                       | {(1, 0), (2, 0)}))
        xi = np.zeros((3, 3))
        xi[0] = [0.2, 0.3, 0.5]
        xi[1, 1] = xi[2, 2] = 1.0
        real = ChannelRealization(g, xi, 0)
        payload = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        out = normalized_aggregate(real, 0, payload)
        assert np.allclose(out, [0.7, 0.8], atol=1e-15)

    def test_scale_invariance_of_normalization(self):
        real = two_agent_realization(0.3, 0.6, 0.2, 0.8)
        payload = np.array([[1.0, 2.0], [-3.0, 0.5]])
        base = normalized_aggregate(real, 0, payload)
        scaled = two_agent_realization(0.3 * 0.9, 0.6 * 0.9, 0.2, 0.8)
        assert np.allclose(normalized_aggregate(scaled, 0, payload), base,
                           atol=1e-14)


class TestEffectiveMatrix:
    def test_rows_sum_to_one(self):
        real = two_agent_realization(0.7, 0.2, 0.4, 0.9)
        h = effective_matrix(real)
        assert np.allclose(h.entries.sum(axis=1), 1.0)
        assert np.all(np.diag(h.entries) > 0)

    def test_uniform_complete_two_agents(self):
        real = two_agent_realization(0.5, 0.5, 0.5, 0.5)
        assert np.allclose(effective_matrix(real).entries, 0.5)

    def test_already_normalized_row(self):
        g = DirectedGraph(3, frozenset({(i, i) for i in range(3)}
                                       | {(1, 0), (2, 0)}))
        xi = np.zeros((3, 3))
        xi[0] = [0.2, 0.3, 0.5]
        xi[1, 1] = xi[2, 2] = 1.0
        h = effective_matrix(ChannelRealization(g, xi, 0))
        assert np.allclose(h.entries[0], [0.2, 0.3, 0.5], atol=1e-15)


class TestGenerator:
    def test_two_agents_forced_arcs(self):
        reals = generate_topology_sequence(2, 3, TopologyParams(), 0)
        for r in reals:
            assert {(0, 1), (1, 0), (0, 0), (1, 1)} <= set(r.graph.arcs)

    def test_determinism(self):
        a = generate_topology_sequence(5, 10, TopologyParams(), 123)
        b = generate_topology_sequence(5, 10, TopologyParams(), 123)
        for ra, rb in zip(a, b):
            assert ra.graph.arcs == rb.graph.arcs
            assert np.array_equal(ra.xi, rb.xi)

    def test_strong_connectivity_and_self_loops(self):
        for r in generate_topology_sequence(6, 20, TopologyParams(), 17):
            assert r.graph.is_strongly_connected()
            assert all((i, i) in r.graph.arcs for i in range(6))

    def test_xi_range(self):
        params = TopologyParams(xi_min=0.25)
        for r in generate_topology_sequence(4, 10, params, 9):
            on = r.xi[r.xi > 0]
            assert np.all(on >= 0.25) and np.all(on <= 1.0)

    def test_infeasible_params_rejected(self):
        with pytest.raises(ConfigurationError):
            TopologyParams(extra_arc_prob=0.0, cycle_backbone=False)
        with pytest.raises(ConfigurationError):
            generate_topology_sequence(1, 5, TopologyParams(), 0)

    def test_certifies_at_n_minus_1(self):
        n = 4
        reals = generate_topology_sequence(n, 10, TopologyParams(), 31)
        from otaform.stochastic import certify_mixing
        seq = [effective_matrix(r) for r in reals]
        assert certify_mixing(seq, n - 1).contraction_margin > 0


class TestLedger:
    def test_paper_count_shape(self):
        ledger = TransmissionLedger()
        reals = generate_topology_sequence(6, 300, TopologyParams(), 1)
        for r in reals:
            ledger = record_instant(ledger, r, payload_dim=2)
        assert ledger.ota_count == 900
        assert ledger.instants == 300
        non_self = sum(sum(1 for a in r.graph.arcs if a[0] != a[1])
                       for r in reals)
        assert ledger.n2n_count == 2 * non_self

    def test_empty_ledger(self):
        ledger = TransmissionLedger()
        assert ledger.ota_count == 0 and ledger.n2n_count == 0

    def test_complete_graph_count(self):
        n = 6
        arcs = frozenset((i, j) for i in range(n) for j in range(n))
        g = DirectedGraph(n, arcs)
        xi = np.full((n, n), 0.5)
        real = ChannelRealization(g, xi, 0)
        ledger = TransmissionLedger()
        for _ in range(300):
            ledger = record_instant(ledger, real, payload_dim=2)
        assert ledger.n2n_count == 18000
        assert ledger.ota_count == 900
