import io
import random

import pytest

from kgpattern import (
    GenConfig,
    Query,
    build_index,
    compute_pagerank,
    generate_graph,
    load_graph,
    uniform_pagerank,
)
from kgpattern.fixtures import load_sample_graph

QUERY_WORDS = ("database", "software", "company", "revenue")


def graph_from_text(text, synonyms=None):
    return load_graph(io.StringIO(text), synonyms=synonyms)


def random_instance(case: int):
    """Deterministic small random instance: (graph, depth, keywords)."""
    rng = random.Random(1000 + case)
    cfg = GenConfig(
        entities=rng.randint(8, 28),
        types=rng.randint(3, 5),
        attr_types=rng.randint(3, 5),
        avg_out_degree=1.8,
        vocab=10,
        words_per_text=2,
        literal_fraction=0.2,
        seed=case,
    )
    graph = graph_from_text(generate_graph(cfg))
    m = case % 4 + 1
    words = tuple(rng.sample([f"w{i}" for i in range(10)], m))
    depth = 2 + case % 2
    return graph, depth, words


@pytest.fixture(scope="session")
def sample_graph():
    return load_sample_graph()


@pytest.fixture(scope="session")
def sample_index(sample_graph):
    """Sample graph indexed at d=3 with a uniform PageRank stub."""
    return build_index(sample_graph, uniform_pagerank(sample_graph), 3)


@pytest.fixture(scope="session")
def sample_index_pr(sample_graph):
    """Sample graph indexed at d=3 with the real PageRank."""
    return build_index(sample_graph, compute_pagerank(sample_graph), 3)


@pytest.fixture(scope="session")
def sample_query():
    return Query(QUERY_WORDS, k=10)


def entity(graph, key):
    return graph.key_to_id[key]
