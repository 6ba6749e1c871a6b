"""Shared fixtures and independent oracle helpers for the test suite.

The oracle helpers deliberately re-derive expected values from first
principles (dense matrix powers, breadth-first balls, brute-force metric
loops) rather than calling the library's own internals, so the tests can
catch agreement bugs instead of reproducing them.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from coldroute.graph import (
    BenchmarkCard,
    CardSet,
    DomainCard,
    EvidenceGraph,
    FamilyCard,
    ModelCard,
    QueryRecord,
    build_graph,
    load_cards,
)
from coldroute.providers import DeterministicEmbedder, Providers, encode_all

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture()
def fixture_cards() -> CardSet:
    return load_cards(FIXTURE_DIR / "cards")


@pytest.fixture()
def providers() -> Providers:
    return Providers.deterministic(dim=64, seed=0)


@pytest.fixture()
def fixture_graph(fixture_cards, providers) -> EvidenceGraph:
    graph = build_graph(
        fixture_cards.families,
        fixture_cards.models,
        fixture_cards.benchmarks,
        fixture_cards.domains,
        fixture_cards.queries,
        dim=64,
    )
    encode_all(graph, providers.encoder)
    return graph


def tiny_cards() -> CardSet:
    """A 6-node world: 1 family, 2 models, 1 benchmark, 1 domain, 1 query."""
    cards = CardSet()
    cards.families = [FamilyCard("fam_00", "A family of tidy desk testers.")]
    cards.models = [
        ModelCard("model_00", "fam_00", "A careful first model.", {"bench_00": 0.7}),
        ModelCard("model_01", "fam_00", "A quiet second model.", {}),
    ]
    cards.benchmarks = [BenchmarkCard("bench_00", "dom_00", "A bench of small sums.")]
    cards.domains = [DomainCard("dom_00", "Small sums and short proofs.")]
    cards.queries = [QueryRecord("q_0000", "bench_00", "What is three plus four?")]
    return cards


@pytest.fixture()
def tiny_graph() -> EvidenceGraph:
    cards = tiny_cards()
    graph = build_graph(
        cards.families, cards.models, cards.benchmarks, cards.domains, cards.queries, dim=4
    )
    encode_all(graph, DeterministicEmbedder(dim=4, seed=0))
    return graph


def random_cards(rng: np.random.Generator, max_nodes: int = 10) -> CardSet:
    """A random structurally valid card set with at most ``max_nodes`` nodes."""
    cards = CardSet()
    n_dom = int(rng.integers(1, 3))
    n_fam = int(rng.integers(1, 3))
    cards.domains = [DomainCard(f"dom_{i:02d}", f"Domain number {i} of random things.") for i in range(n_dom)]
    cards.families = [FamilyCard(f"fam_{i:02d}", f"Random family number {i}.") for i in range(n_fam)]
    budget = max_nodes - n_dom - n_fam
    n_bench = int(rng.integers(1, min(3, budget - 1) + 1))
    budget -= n_bench
    cards.benchmarks = [
        BenchmarkCard(
            f"bench_{i:02d}",
            f"dom_{int(rng.integers(n_dom)):02d}",
            f"Random benchmark number {i}.",
        )
        for i in range(n_bench)
    ]
    n_model = int(rng.integers(1, budget + 1))
    budget -= n_model
    cards.models = []
    for i in range(n_model):
        scores = {
            b.id: float(np.round(rng.uniform(0.05, 0.95), 3))
            for b in cards.benchmarks
            if rng.random() < 0.6
        }
        cards.models.append(
            ModelCard(f"model_{i:02d}", f"fam_{int(rng.integers(n_fam)):02d}", f"Random model {i}.", scores)
        )
    n_query = int(rng.integers(0, budget + 1))
    cards.queries = [
        QueryRecord(
            f"q_{i:04d}",
            cards.benchmarks[int(rng.integers(n_bench))].id,
            f"Random question number {i}?",
        )
        for i in range(n_query)
    ]
    return cards


def random_graph(rng: np.random.Generator, dim: int = 8, max_nodes: int = 10) -> EvidenceGraph:
    cards = random_cards(rng, max_nodes)
    graph = build_graph(
        cards.families, cards.models, cards.benchmarks, cards.domains, cards.queries, dim
    )
    encode_all(graph, DeterministicEmbedder(dim=dim, seed=int(rng.integers(1 << 30))))
    return graph


# --- independent oracles ---------------------------------------------------

def dense_propagation_oracle(graph: EvidenceGraph, depth: int) -> dict[str, np.ndarray]:
    """S^K X computed densely and independently of the library's code path."""
    ids = graph.node_ids
    index = {nid: i for i, nid in enumerate(ids)}
    n = len(ids)
    closed = {nid: set(graph.neighbors(nid)) | {nid} for nid in ids}
    s = np.zeros((n, n))
    for v in ids:
        s[index[v], index[v]] = 1.0 / len(closed[v])
        for u in graph.neighbors(v):
            edge = graph.edge_between(v, u)
            w = 1.0 if edge.weight is None else float(edge.weight)
            s[index[v], index[u]] = w / np.sqrt(len(closed[v]) * len(closed[u]))
    x = np.stack([np.asarray(graph.node(nid).embedding, dtype=np.float64) for nid in ids])
    out = np.linalg.matrix_power(s, depth) @ x
    return {nid: out[index[nid]] for nid in ids}


def bfs_ball(graph: EvidenceGraph, start: str, radius: int) -> set[str]:
    """All node ids within graph distance ``radius`` of ``start``."""
    seen = {start}
    frontier = [start]
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for u in graph.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return seen
