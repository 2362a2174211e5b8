import itertools
import math

import networkx as nx
import numpy as np
import pytest

from peria.cayley import explore_ball
from peria.errors import GraphError, NotCliqueGatedError, ParallelismNotTransitiveError, PartitionSpaceError
from peria.graphcore import check_axioms, compute_hyperplanes, is_paraclique, parse_parts, qm_closure, quasi_cubulate
from peria.graphcore.graphs import (
    FiniteGraph,
    cartesian_product,
    complete_graph,
    cycle_graph,
    hamming_graph,
    house_graph,
    hypercube,
    parse_graph,
    path_graph,
    wheel_of_three_squares,
)
from peria.graphcore.hyperplanes import crossing_sequence, hamming_embedding
from peria.graphcore.metrics import CliqueMetrics, delta_distance, random_coherent_metrics, well_separated_check
from peria.graphcore.partitions import PartitionSpace

from conftest import CORPUS, graph, pres


def dw_classes(g: FiniteGraph) -> list[frozenset]:
    """Djokovic-Winkler relation closed transitively; on partial cubes these are the hyperplanes."""
    d = g.dist
    edges = list(g.edges)
    G = nx.Graph()
    G.add_nodes_from(range(len(edges)))
    for i, (x, y) in enumerate(edges):
        for j, (u, v) in enumerate(edges):
            if i < j and d[x, u] + d[y, v] != d[x, v] + d[y, u]:
                G.add_edge(i, j)
    return sorted(frozenset(edges[i] for i in c) for c in nx.connected_components(G))


def hyperplane_edge_sets(g):
    hs = compute_hyperplanes(g)
    return sorted(frozenset(hs.edges(j)) for j in range(hs.count))


@pytest.mark.parametrize("g", [cycle_graph(6), cycle_graph(8), hypercube(2), hypercube(3), wheel_of_three_squares(),
                               cartesian_product(path_graph(3), path_graph(4)),
                               explore_ball(pres("i2_5"), (), 5).graph, explore_ball(pres("c4_racg"), (), 3).graph])
def test_hyperplanes_match_djokovic_winkler(g):
    assert hyperplane_edge_sets(g) == dw_classes(g)


def test_hamming_graph_hyperplanes():
    g = hamming_graph([3, 2, 4])
    hs = compute_hyperplanes(g)
    assert hs.count == 3
    assert sorted(hs.sector_count(j) for j in range(3)) == [2, 3, 4]
    assert all(hs.transverse(a, b) for a, b in itertools.combinations(range(3), 2))
    coords = hamming_embedding(g)
    assert coords.shape == (24, 3)


def test_recognizers_on_stated_examples():
    c6 = check_axioms(graph("cycle6"))
    assert c6.mediangle and not c6.quasimedian and c6.paraclique
    wheel = check_axioms(graph("wheel"))
    assert wheel.paraclique and not wheel.mediangle
    house = check_axioms(graph("house"))
    assert not house.paraclique
    k23 = check_axioms(graph("k23"))
    assert not k23.conditions["parallelism_transitive"].ok
    for name in ("q2", "q3"):
        r = check_axioms(graph(name))
        assert r.paraclique and r.mediangle and r.quasimedian


def test_corpus_graph_files_agree_with_builders():
    assert graph("house").edges == house_graph().edges
    assert graph("q3").dist.max() == 3
    assert graph("wheel").n == 7


def test_complete_graph_and_k3xk2_are_quasi_median():
    for g in (complete_graph(4), graph("k3xk2"), hamming_graph([3, 3])):
        r = check_axioms(g)
        assert r.quasimedian and r.mediangle and r.paraclique


def test_errors():
    with pytest.raises(ParallelismNotTransitiveError):
        compute_hyperplanes(graph("k23"))
    with pytest.raises(NotCliqueGatedError):
        from peria.graphcore.hyperplanes import compute_cliques_and_gates
        cg = compute_cliques_and_gates(graph("house"))
        if not cg.clique_gated:
            v, c = cg.first_failure
            raise NotCliqueGatedError(v, c)
    with pytest.raises(GraphError):
        check_axioms(FiniteGraph(4, [(0, 1), (2, 3)]))
    with pytest.raises(GraphError):
        parse_graph("3\n0 1 2\n")


def test_para_geodesics_cross_each_hyperplane_once():
    g = cycle_graph(8)
    hs = compute_hyperplanes(g)
    geo = [0, 1, 2, 3, 4]
    assert g.is_geodesic(geo) and len(set(crossing_sequence(hs, geo))) == 4
    back = [0, 1, 2, 1]
    seq = crossing_sequence(hs, back)
    assert len(set(seq)) < len(seq)


def test_delta_on_weighted_square_grid():
    g = cartesian_product(path_graph(3), path_graph(3))
    hs = compute_hyperplanes(g)
    weights = [np.array([[0, k + 1], [k + 1, 0]]) for k in range(hs.count)]
    cm = CliqueMetrics.from_hyperplane_metrics(hs, weights)
    r = delta_distance(g, cm, 0, 8)
    assert r.consistent and r.value == sum(k + 1 for k in range(hs.count))


def test_random_metrics_are_coherent_metrics():
    rng = np.random.default_rng(7)
    g = hamming_graph([3, 2])
    hs = compute_hyperplanes(g)
    cm = random_coherent_metrics(hs, rng)
    cm.check_metric_axioms()
    cm.check_coherent()
    for x, y in itertools.combinations(range(g.n), 2):
        assert delta_distance(g, cm, x, y).consistent


def test_well_separation():
    g = cartesian_product(path_graph(3), path_graph(3))
    hs = compute_hyperplanes(g)
    vert = [j for j in range(hs.count) if hs.separates(j, 0, 6)]
    horiz = [j for j in range(hs.count) if j not in vert]
    # vertex ids a * 3 + b; the two hyperplanes between rows are crossed by both column hyperplanes
    a, b = sorted(vert)
    r = well_separated_check(hs, a, b)
    assert r.separated and r.L == 2 and set(r.family) == set(horiz)
    c6 = compute_hyperplanes(cycle_graph(6))
    r = well_separated_check(c6, 0, 1)
    assert not r.separated and math.isinf(r.L)
    p = compute_hyperplanes(path_graph(4))
    assert well_separated_check(p, 0, 2).L == 0


def test_quasi_cubulation_of_corpus_partitions():
    qc = quasi_cubulate(parse_parts((CORPUS / "three_sectors.parts").read_text()))
    assert qc.graph.n == 3 and len(qc.graph.edges) == 3
    qc = quasi_cubulate(parse_parts((CORPUS / "square.parts").read_text()))
    assert qc.graph.n == 4 and check_axioms(qc.graph).quasimedian
    qc = quasi_cubulate(parse_parts((CORPUS / "nested.parts").read_text()))
    assert qc.graph.n == 3 and qc.graph.dist.max() == 2


def test_partition_axiom_violations():
    with pytest.raises(PartitionSpaceError):
        PartitionSpace.from_lists(3, [[[0], [1]]]).validate()
    with pytest.raises(PartitionSpaceError):
        PartitionSpace.from_lists(3, [[[0], [1, 2]], [[1, 2], [0]]]).validate()
    with pytest.raises(PartitionSpaceError):
        PartitionSpace.from_lists(2, [[[0], [1], []]]).validate()


@pytest.mark.parametrize("name", ["cycle6", "wheel", "cycle8", "q3"])
def test_qm_closure_properties(name):
    g = graph(name)
    res = qm_closure(g)
    assert all(res.checks.values()) and res.checks["isometric"]
    assert check_axioms(res.graph).quasimedian


def test_qm_closure_of_cycle6_is_a_cube():
    res = qm_closure(graph("cycle6"))
    assert res.graph.n == 8 and is_paraclique(res.graph)


def test_qm_closure_rejects_non_paraclique():
    with pytest.raises(GraphError):
        qm_closure(graph("house"))
