"""Evidence-graph construction, validation, and propagation coefficients."""

import math

import numpy as np
import pytest

from coldroute.errors import (
    DanglingReference,
    DuplicateId,
    NotAdjacent,
    ScoreOutOfRange,
    UnknownNode,
)
from coldroute.graph import (
    BenchmarkCard,
    DomainCard,
    Edge,
    EdgeKind,
    EvidenceGraph,
    FamilyCard,
    ModelCard,
    Node,
    NodeKind,
    QueryRecord,
    add_model_node,
    build_graph,
    closed_neighborhood,
    normalize_score,
    propagation_coefficient,
    remove_node,
)

from conftest import tiny_cards


def _build(cards, dim=4):
    return build_graph(
        cards.families, cards.models, cards.benchmarks, cards.domains, cards.queries, dim
    )


# --- construction ----------------------------------------------------------

def test_fixture_graph_shape(fixture_cards):
    graph = _build(fixture_cards, dim=64)
    # 2 domains + 3 benchmarks + 2 families + 4 models + 24 queries
    assert len(graph) == 35
    # 3 benchmark-domain + 4 model-family + 9 score + 24 query-benchmark edges
    assert len(graph.edges) == 40


def test_percent_scale_score_becomes_unit_weight(fixture_cards):
    graph = _build(fixture_cards, dim=8)
    edge = graph.edge_between("model_00_00", "bench_00_b")
    assert edge.weight == pytest.approx(0.85)
    assert graph.score_scales["bench_00_b"] == "percent"
    assert graph.score_scales["bench_00_a"] == "unit"


def test_scoreless_model_has_only_family_edge(fixture_cards):
    graph = _build(fixture_cards, dim=8)
    assert graph.neighbors("model_01_01") == ["fam_01"]


def test_normalize_score_cases():
    assert normalize_score(0.42, "unit", "m", "b") == pytest.approx(0.42)
    assert normalize_score(85.0, "percent", "m", "b") == pytest.approx(0.85)
    assert normalize_score(0.0, "unit", "m", "b") == 0.0
    assert normalize_score(100.0, "percent", "m", "b") == 1.0
    for value, scale in [(1.2, "unit"), (-0.1, "unit"), (140.0, "percent"), (-5.0, "percent")]:
        with pytest.raises(ScoreOutOfRange):
            normalize_score(value, scale, "m", "b")


def test_duplicate_and_dangling_cards_rejected():
    cards = tiny_cards()
    cards.models.append(ModelCard("model_00", "fam_00", "A twin id.", {}))
    with pytest.raises(DuplicateId):
        _build(cards)

    cards = tiny_cards()
    cards.models[0] = ModelCard("model_00", "fam_99", "Lost family.", {})
    with pytest.raises(DanglingReference):
        _build(cards)

    cards = tiny_cards()
    cards.queries[0] = QueryRecord("q_0000", "bench_99", "Lost benchmark?")
    with pytest.raises(DanglingReference):
        _build(cards)

    cards = tiny_cards()
    cards.benchmarks[0] = BenchmarkCard("bench_00", "dom_99", "Lost domain.")
    with pytest.raises(DanglingReference):
        _build(cards)


def test_out_of_range_model_score_rejected():
    cards = tiny_cards()
    cards.models[0] = ModelCard("model_00", "fam_00", "Overeager.", {"bench_00": 1.5})
    with pytest.raises(ScoreOutOfRange):
        _build(cards)


# --- propagation coefficient -----------------------------------------------

def test_coefficient_two_node_pair_is_half():
    cards = tiny_cards()
    cards.models = [ModelCard("model_00", "fam_00", "Only child.", {})]
    cards.benchmarks, cards.domains, cards.queries = [], [], []
    graph = _build(cards)
    # both closed neighborhoods have size 2 -> 1/sqrt(2*2)
    assert propagation_coefficient(graph, "model_00", "fam_00") == pytest.approx(0.5)


def test_coefficient_weighted_edge_hand_value():
    # model(closed 2) -- 0.8 -- benchmark(closed 3, via its domain link)
    graph = EvidenceGraph(
        nodes=[
            Node("model_aa", NodeKind.MODEL, "A loner model."),
            Node("bench_aa", NodeKind.BENCHMARK, "A bench."),
            Node("dom_aa", NodeKind.DOMAIN, "A domain."),
        ],
        edges=[
            Edge("model_aa", "bench_aa", EdgeKind.MODEL_BENCHMARK, 0.8),
            Edge("bench_aa", "dom_aa", EdgeKind.BENCHMARK_DOMAIN),
        ],
        dim=4,
    )
    expected = 0.8 / math.sqrt(2 * 3)
    assert propagation_coefficient(graph, "model_aa", "bench_aa") == pytest.approx(expected)


def test_coefficient_regular_graph_is_inverse_degree_plus_one():
    # a 2-regular query/benchmark cycle: every coefficient is 1/(2+1)
    graph = EvidenceGraph(
        nodes=[
            Node("q_0000", NodeKind.QUERY, "First question?"),
            Node("q_0001", NodeKind.QUERY, "Second question?"),
            Node("bench_aa", NodeKind.BENCHMARK, "First bench."),
            Node("bench_bb", NodeKind.BENCHMARK, "Second bench."),
        ],
        edges=[
            Edge("q_0000", "bench_aa", EdgeKind.QUERY_BENCHMARK),
            Edge("q_0000", "bench_bb", EdgeKind.QUERY_BENCHMARK),
            Edge("q_0001", "bench_aa", EdgeKind.QUERY_BENCHMARK),
            Edge("q_0001", "bench_bb", EdgeKind.QUERY_BENCHMARK),
        ],
        dim=4,
    )
    for u, v in [("q_0000", "bench_aa"), ("q_0001", "bench_bb"), ("q_0000", "bench_bb")]:
        assert propagation_coefficient(graph, u, v) == pytest.approx(1.0 / 3.0)


def test_coefficient_matches_formula_on_every_fixture_edge(fixture_cards):
    graph = _build(fixture_cards, dim=8)
    for edge in graph.edges:
        w = 1.0 if edge.weight is None else edge.weight
        expected = w / math.sqrt(
            len(closed_neighborhood(graph, edge.src)) * len(closed_neighborhood(graph, edge.dst))
        )
        assert propagation_coefficient(graph, edge.src, edge.dst) == pytest.approx(
            expected, abs=1e-12
        )
        # symmetry
        assert propagation_coefficient(graph, edge.dst, edge.src) == pytest.approx(
            expected, abs=1e-12
        )


def test_coefficient_self_term_and_not_adjacent(tiny_graph):
    size = len(closed_neighborhood(tiny_graph, "model_00"))
    assert propagation_coefficient(tiny_graph, "model_00", "model_00") == pytest.approx(1.0 / size)
    with pytest.raises(NotAdjacent):
        propagation_coefficient(tiny_graph, "model_00", "q_0000")
    with pytest.raises(UnknownNode):
        propagation_coefficient(tiny_graph, "model_00", "ghost")


# --- mutation --------------------------------------------------------------

def test_add_model_node_grows_graph(fixture_cards):
    graph = _build(fixture_cards, dim=8)
    n_nodes, n_edges = len(graph), len(graph.edges)
    card = ModelCard(
        "model_00_02",
        "fam_00",
        "A late arriving quantitative assistant.",
        {"bench_00_a": 0.77, "bench_00_b": 91.0},
    )
    add_model_node(graph, card)
    assert len(graph) == n_nodes + 1
    assert len(graph.edges) == n_edges + 3  # family + two scores
    # percent scale is remembered per benchmark
    assert graph.edge_between("model_00_02", "bench_00_b").weight == pytest.approx(0.91)
    assert graph.edge_between("model_00_02", "bench_00_a").weight == pytest.approx(0.77)


def test_add_model_node_rolls_back_on_bad_score(fixture_cards):
    graph = _build(fixture_cards, dim=8)
    n_nodes, n_edges = len(graph), len(graph.edges)
    bad = ModelCard("model_00_03", "fam_00", "Too good to be true.", {"bench_00_a": 1.7})
    with pytest.raises(ScoreOutOfRange):
        add_model_node(graph, bad)
    assert len(graph) == n_nodes
    assert len(graph.edges) == n_edges
    assert "model_00_03" not in graph


def test_add_model_node_rejects_duplicates_and_dangling(fixture_cards):
    graph = _build(fixture_cards, dim=8)
    with pytest.raises(DuplicateId):
        add_model_node(graph, ModelCard("model_00_00", "fam_00", "Twin.", {}))
    with pytest.raises(DanglingReference):
        add_model_node(graph, ModelCard("model_77_00", "fam_77", "Orphan.", {}))
    with pytest.raises(DanglingReference):
        add_model_node(graph, ModelCard("model_77_01", "fam_00", "Ghost bench.", {"bench_77": 0.5}))


def test_remove_node_drops_incident_edges(tiny_graph):
    remove_node(tiny_graph, "model_00")
    assert "model_00" not in tiny_graph
    assert all("model_00" not in (e.src, e.dst) for e in tiny_graph.edges)
    tiny_graph.validate()
    with pytest.raises(UnknownNode):
        remove_node(tiny_graph, "model_00")


# --- queries over the graph ------------------------------------------------

def test_neighbors_sorted_and_edge_lookup(fixture_cards):
    graph = _build(fixture_cards, dim=8)
    nbs = graph.neighbors("bench_00_a")
    assert nbs == sorted(nbs)
    assert "dom_00" in nbs and "model_00_00" in nbs
    with pytest.raises(UnknownNode):
        graph.neighbors("nope")


def test_snapshot_round_trip(fixture_cards, tmp_path):
    graph = _build(fixture_cards, dim=8)
    from coldroute.providers import DeterministicEmbedder, encode_all

    encode_all(graph, DeterministicEmbedder(dim=8, seed=3))
    path = tmp_path / "graph.json"
    graph.save(path)
    back = EvidenceGraph.load(path)
    assert back.node_ids == graph.node_ids
    assert back.dim == graph.dim
    assert back.score_scales == graph.score_scales
    assert len(back.edges) == len(graph.edges)
    for e1, e2 in zip(graph.edges, back.edges):
        assert (e1.src, e1.dst, e1.kind, e1.weight) == (e2.src, e2.dst, e2.kind, e2.weight)
    for nid in graph.node_ids:
        a, b = graph.node(nid).embedding, back.node(nid).embedding
        assert np.array_equal(np.asarray(a), np.asarray(b))
    back.validate()
