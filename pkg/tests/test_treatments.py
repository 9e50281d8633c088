"""CC, WCC, and CM treatments: examples, invariants, reference equivalence."""

import random
import sys

import numpy as np
import pytest

import wellconn as w
from conftest import (
    assert_valid_partition,
    clique_edges,
    graph_of,
    random_clustering,
    random_graph_any,
    reference_cc,
    reference_wcc,
    two_cliques,
)


def one_cluster(g: w.Graph) -> w.Clustering:
    return w.Clustering.from_assignment(np.zeros(g.n, np.int64))


class TestCC:
    def test_disconnected_cluster_splits(self):
        g = two_cliques(5, bridges=0)
        out = w.cc_treatment(g, one_cluster(g))
        assert [len(c) for c in out.clusters] == [5, 5]

    def test_connected_cluster_unchanged(self):
        g = graph_of(3, [(0, 1), (1, 2), (2, 0)])
        c = one_cluster(g)
        assert w.cc_treatment(g, c) == c

    def test_internally_isolated_node_becomes_singleton(self):
        # node 5 has no neighbors inside its cluster
        g = graph_of(6, clique_edges(5))
        c = one_cluster(g)
        out = w.cc_treatment(g, c)
        assert sorted(len(x) for x in out.clusters) == [1, 5]
        assert w.node_coverage(out) == w.node_coverage(c) - 100.0 / 6

    def test_matches_reference(self):
        rng = random.Random(9)
        for _ in range(25):
            g = random_graph_any(rng, rng.randint(2, 40), rng.uniform(0.05, 0.4))
            c = random_clustering(rng, g.n, kmax=6)
            assert w.cc_treatment(g, c) == reference_cc(g, c)

    def test_idempotent(self):
        rng = random.Random(10)
        for _ in range(15):
            g = random_graph_any(rng, rng.randint(2, 40), 0.15)
            c = random_clustering(rng, g.n, kmax=5)
            once = w.cc_treatment(g, c)
            assert w.cc_treatment(g, once) == once


class TestWCC:
    def test_two_k10_bridge_splits_into_cliques(self, threshold):
        g = two_cliques(10, bridges=1)
        out, trace = w.wcc_treatment(g, one_cluster(g), threshold)
        assert [sorted(c.tolist()) for c in out.clusters] == [
            list(range(10)),
            list(range(10, 20)),
        ]
        assert trace.cuts_performed == 1
        assert trace.clusters_out == 2

    def test_k10_unchanged(self, threshold):
        g = graph_of(10, clique_edges(10))
        c = one_cluster(g)
        out, trace = w.wcc_treatment(g, c, threshold)
        assert out == c
        assert trace.cuts_performed == 0

    def test_all_singletons_unchanged(self, threshold):
        g = graph_of(5, [(0, 1), (2, 3)])
        c = w.Clustering.from_assignment(range(5))
        out, _ = w.wcc_treatment(g, c, threshold)
        assert out == c

    def test_postcondition_well_connected(self, threshold):
        rng = random.Random(77)
        for _ in range(20):
            g = random_graph_any(rng, rng.randint(2, 70), rng.uniform(0.05, 0.3))
            c = random_clustering(rng, g.n, kmax=6)
            out, _ = w.wcc_treatment(g, c, threshold)
            assert_valid_partition(out, g.n)
            for members in out.clusters:
                if len(members) < 2:
                    continue
                sub, _ = w.induced_subgraph(g, members)
                assert len(w.connected_components(sub)) == 1
                cut = w.global_min_cut(sub)
                assert w.is_well_connected(cut.value, len(members), threshold)

    def test_matches_reference_engine(self, threshold):
        rng = random.Random(123)
        for _ in range(12):
            g = random_graph_any(rng, rng.randint(2, 60), rng.uniform(0.06, 0.35))
            c = random_clustering(rng, g.n, kmax=5)
            fast = w.wcc_treatment(g, c, threshold)[0]
            slow = reference_wcc(g, c, threshold)
            assert fast == slow

    def test_matches_reference_constant_threshold(self):
        rng = random.Random(321)
        t = w.ThresholdSpec.parse("2")
        for _ in range(8):
            g = random_graph_any(rng, rng.randint(2, 40), 0.2)
            c = random_clustering(rng, g.n, kmax=4)
            assert w.wcc_treatment(g, c, t)[0] == reference_wcc(g, c, t)

    def test_idempotent(self, threshold):
        rng = random.Random(5)
        for _ in range(12):
            g = random_graph_any(rng, rng.randint(2, 50), 0.15)
            c = random_clustering(rng, g.n, kmax=5)
            once, _ = w.wcc_treatment(g, c, threshold)
            twice, trace = w.wcc_treatment(g, once, threshold)
            assert twice == once
            assert trace.cuts_performed == 0

    def test_refinement_chain_and_coverage(self, threshold):
        rng = random.Random(6)
        for _ in range(15):
            g = random_graph_any(rng, rng.randint(2, 60), rng.uniform(0.05, 0.3))
            c = random_clustering(rng, g.n, kmax=6)
            cc_out = w.cc_treatment(g, c)
            wcc_out, trace = w.wcc_treatment(g, c, threshold)
            assert w.is_refinement(cc_out, c)
            assert w.is_refinement(wcc_out, cc_out)
            assert w.node_coverage(wcc_out) <= w.node_coverage(cc_out) + 1e-12
            assert w.node_coverage(cc_out) <= w.node_coverage(c) + 1e-12
            assert trace.clusters_out >= trace.clusters_in

    def test_constant_threshold_postcondition(self):
        t = w.ThresholdSpec.parse("5")
        rng = random.Random(55)
        for _ in range(8):
            g = random_graph_any(rng, rng.randint(5, 60), 0.3)
            c = random_clustering(rng, g.n, kmax=3)
            out, _ = w.wcc_treatment(g, c, t)
            for members in out.clusters:
                if len(members) < 2:
                    continue
                sub, _ = w.induced_subgraph(g, members)
                assert w.global_min_cut(sub).value > 5

    def test_connectivity_only_equals_cc(self):
        t = w.ThresholdSpec.parse("connectivity")
        rng = random.Random(8)
        for _ in range(10):
            g = random_graph_any(rng, rng.randint(2, 50), 0.12)
            c = random_clustering(rng, g.n, kmax=5)
            out, _ = w.wcc_treatment(g, c, t)
            assert out == w.cc_treatment(g, c)

    def test_parallel_matches_serial(self, threshold):
        rng = random.Random(99)
        g = random_graph_any(rng, 120, 0.08)
        c = random_clustering(rng, g.n, kmax=8)
        serial, trace1 = w.wcc_treatment(g, c, threshold, processes=1)
        parallel, trace2 = w.wcc_treatment(g, c, threshold, processes=4)
        assert serial == parallel
        assert trace1 == trace2


class TestCM:
    def test_identity_equals_wcc(self, threshold):
        rng = random.Random(42)
        for _ in range(10):
            g = random_graph_any(rng, rng.randint(2, 50), rng.uniform(0.05, 0.3))
            c = random_clustering(rng, g.n, kmax=5)
            wcc_out, wcc_trace = w.wcc_treatment(g, c, threshold)
            cm_out, cm_trace = w.cm_treatment(g, c, threshold, w.IdentityClusterer())
            assert cm_out == wcc_out
            assert cm_trace == wcc_trace

    def test_components_clusterer_on_gadget(self, threshold):
        g = two_cliques(10, bridges=1)
        c = one_cluster(g)
        out, _ = w.cm_treatment(g, c, threshold, w.ComponentsClusterer())
        assert out == w.wcc_treatment(g, c, threshold)[0]

    def test_k10_never_reclustered(self, threshold):
        g = graph_of(10, clique_edges(10))
        c = one_cluster(g)

        class Exploding:
            kind = "exploding"
            trivial_on_connected = False

            def cluster(self, graph):
                raise AssertionError("well-connected cluster must not be re-clustered")

        out, _ = w.cm_treatment(g, c, threshold, Exploding())
        assert out == c

    def test_requires_clusterer(self, threshold):
        g = graph_of(3, [(0, 1), (1, 2)])
        with pytest.raises(w.ContractViolation):
            w.cm_treatment(g, one_cluster(g), threshold, None)

    def test_cm_identity_idempotent(self, threshold):
        rng = random.Random(4)
        g = random_graph_any(rng, 40, 0.12)
        c = random_clustering(rng, g.n, kmax=4)
        once, _ = w.cm_treatment(g, c, threshold, w.IdentityClusterer())
        twice, _ = w.cm_treatment(g, once, threshold, w.IdentityClusterer())
        assert twice == once


class TestExternalClusterer:
    def _script(self, tmp_path, body: str) -> str:
        path = tmp_path / "reclusterer.py"
        path.write_text(body)
        return f"{sys.executable} {path} {{input}} {{output}}"

    def test_external_identity_matches_wcc(self, tmp_path, threshold):
        # every node into one cluster: exactly the identity clusterer
        script = self._script(
            tmp_path,
            "import sys\n"
            "nodes = set()\n"
            "for line in open(sys.argv[1]):\n"
            "    a, b = line.split()\n"
            "    nodes.update((a, b))\n"
            "with open(sys.argv[2], 'w') as out:\n"
            "    for v in sorted(nodes):\n"
            "        out.write(f'{v}\\tall\\n')\n",
        )
        g = two_cliques(10, bridges=1)
        c = one_cluster(g)
        out, _ = w.cm_treatment(g, c, threshold, w.ExternalClusterer(script))
        assert out == w.wcc_treatment(g, c, threshold)[0]

    def test_external_omitted_nodes_become_singletons(self, tmp_path, threshold):
        # the command writes no assignments at all: every node becomes a
        # singleton after the first split, so the result is all singletons
        script = self._script(
            tmp_path,
            "import sys\nopen(sys.argv[2], 'w').close()\n",
        )
        g = two_cliques(10, bridges=1)
        out, _ = w.cm_treatment(g, one_cluster(g), threshold, w.ExternalClusterer(script))
        assert all(len(c) == 1 for c in out.clusters)

    def test_external_failure_raises(self, tmp_path, threshold):
        script = self._script(tmp_path, "import sys\nsys.exit(3)\n")
        g = two_cliques(10, bridges=1)
        with pytest.raises(w.ExternalClustererError):
            w.cm_treatment(g, one_cluster(g), threshold, w.ExternalClusterer(script))

    def test_external_foreign_labels_rejected(self, tmp_path, threshold):
        script = self._script(
            tmp_path,
            "import sys\n"
            "with open(sys.argv[2], 'w') as out:\n"
            "    out.write('not-a-node\\tx\\n')\n",
        )
        g = two_cliques(10, bridges=1)
        with pytest.raises(w.ExternalClustererError):
            w.cm_treatment(g, one_cluster(g), threshold, w.ExternalClusterer(script))

    def test_command_template_validation(self):
        with pytest.raises(w.ContractViolation):
            w.ExternalClusterer("sort")  # no placeholders
        with pytest.raises(w.ContractViolation):
            w.ExternalClusterer("")

    def test_parse_clusterer(self):
        assert w.parse_clusterer("identity").kind == "identity"
        assert w.parse_clusterer("components").kind == "components"
        ext = w.parse_clusterer("external:cmd --in {input} --out {output}")
        assert ext.kind == "external"
        with pytest.raises(w.ContractViolation):
            w.parse_clusterer("bogus")


class TestTraces:
    def test_cc_trace_counts(self):
        g = two_cliques(5, bridges=0)
        _, trace = w.cc_treatment_with_trace(g, one_cluster(g))
        assert trace.components_splits == 1
        assert trace.cuts_performed == 0
        assert trace.clusters_in == 1
        assert trace.clusters_out == 2

    def test_wcc_trace_on_gadget(self, threshold):
        g = two_cliques(10, bridges=1)
        _, trace = w.wcc_treatment(g, one_cluster(g), threshold)
        assert trace.cuts_performed == 1
        assert trace.components_splits == 0
        assert trace.max_recursion_depth >= 1
