import pytest

from kgpattern import (
    build_index,
    compute_pagerank,
    count_patterns_exhaustive,
    enumerate_patterns_exhaustive,
    Query,
    search_linear_enum,
)
from kgpattern import patterns as pat

from conftest import graph_from_text, random_instance


def as_comparable(pairs):
    """linear-enum output -> {pattern: sorted member shapes} for oracle diffing."""
    return {
        p: sorted((m.root, tuple((x.nodes, x.attrs, x.edge_match) for x in m.paths)) for m in members)
        for p, members in pairs
    }


def oracle_comparable(found):
    return {
        p: sorted((root, tuple((n, a, e) for n, a, e in combo)) for root, combo in members)
        for p, members in found.items()
    }


def test_single_node_both_words_d1():
    g = graph_from_text("E only Thing alpha beta\n")
    assert count_patterns_exhaustive(g, ["alpha", "beta"], 1) == 1


def test_sample_graph_contains_both_reference_patterns(sample_graph):
    found = enumerate_patterns_exhaustive(
        sample_graph, ["database", "software", "company", "revenue"], 3
    )
    rendered = {
        tuple(pat.pattern_names(sample_graph, p) for p in tree_pattern)
        for tree_pattern in found
    }
    assert (
        "Software.Genre.TEXT",
        "Software",
        "Software.Developer.Company",
        "Software.Developer.Company.Revenue",
    ) in rendered
    assert (
        "Book",
        "Book",
        "Book.Publisher.Company",
        "Book.Publisher.Company.Revenue",
    ) in rendered


def test_literal_roots_excluded():
    g = graph_from_text('E a T x\nA a r "alpha"\n')
    found = enumerate_patterns_exhaustive(g, ["alpha"], 2)
    # only the two-node path from the typed root; the literal itself roots nothing
    assert len(found) == 1
    ((root, _),) = list(found.values())[0]
    assert root == 0


def test_count_matches_enumeration(sample_graph):
    words = ["database", "company"]
    assert count_patterns_exhaustive(sample_graph, words, 3) == len(
        enumerate_patterns_exhaustive(sample_graph, words, 3)
    )


@pytest.mark.parametrize("case", range(15))
def test_matches_linear_enumeration(case):
    g, depth, words = random_instance(case)
    idx = build_index(g, compute_pagerank(g), depth)
    pairs = search_linear_enum(g, idx, Query(words, k=1))
    assert as_comparable(pairs) == oracle_comparable(
        enumerate_patterns_exhaustive(g, words, depth)
    )
