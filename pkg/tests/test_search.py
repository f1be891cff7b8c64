import math

import pytest

from kgpattern import (
    ParameterError,
    Query,
    SamplingConfig,
    ScoredPattern,
    ScoringConfig,
    TopKQueue,
    assemble_subtree,
    build_index,
    compute_pagerank,
    rank_enumeration,
    search_baseline,
    search_linear_enum,
    search_linear_topk,
    search_pattern_enum,
    uniform_pagerank,
)
from kgpattern import patterns as pat
from kgpattern.search import _uniform01

from conftest import graph_from_text, random_instance

DIAMOND = """
E r Root hub
E a Mid m1
E b Mid m2
E x Leaf alpha beta
A r link @a
A r link @b
A a of @x
A b of @x
"""


def adversarial_text(p):
    lines = ["E r1 hubkind one", "E r2 hubkind two"]
    for i in range(p):
        lines.append(f"E t{i} leftkind{i} alpha")
        lines.append(f"A r1 la{i} @t{i}")
    for i in range(p):
        lines.append(f"E u{i} ritekind{i} beta")
        lines.append(f"A r2 ra{i} @u{i}")
    return "\n".join(lines) + "\n"


def signature(result_patterns):
    return [(sp.score, sp.pattern) for sp in result_patterns]


class TestQueryAndConfig:
    def test_from_text(self):
        q = Query.from_text("Database  Software!", k=3)
        assert q.keywords == ("database", "software") and q.k == 3

    def test_validation(self):
        with pytest.raises(ParameterError):
            Query(())
        with pytest.raises(ParameterError):
            Query(("ok",), k=0)
        with pytest.raises(ParameterError):
            Query(("two words",))

    def test_sampling_validation(self):
        with pytest.raises(ParameterError):
            SamplingConfig(rate=0.0)
        with pytest.raises(ParameterError):
            SamplingConfig(rate=1.5)


class TestAssemble:
    def test_four_path_join(self, sample_graph, sample_index):
        g, idx = sample_graph, sample_index
        sql = g.key_to_id["sql_server"]
        get = lambda word, name: next(
            p
            for p in idx.paths(word, root=sql)
            if pat.pattern_names(g, p.pattern) == name
        )
        paths = (
            get("database", "Software.Genre.TEXT"),
            get("software", "Software"),
            get("company", "Software.Developer.Company"),
            get("revenue", "Software.Developer.Company.Revenue"),
        )
        subtree = assemble_subtree(sql, paths)
        assert subtree is not None
        assert subtree.root == sql
        assert len(subtree.node_ids()) == 4
        assert len(subtree.edge_set()) == 3

    def test_identical_single_node_paths(self, sample_graph, sample_index):
        book = sample_graph.key_to_id["db_book"]
        p_db = next(p for p in sample_index.paths("database", root=book) if len(p.nodes) == 1)
        p_sw = next(p for p in sample_index.paths("software", root=book) if len(p.nodes) == 1)
        subtree = assemble_subtree(book, (p_db, p_sw))
        assert subtree is not None and subtree.node_ids() == {book}

    def test_diamond_rejected(self):
        g = graph_from_text(DIAMOND)
        idx = build_index(g, uniform_pagerank(g), 3)
        r = g.key_to_id["r"]
        alpha_paths = idx.paths("alpha", root=r)
        beta_paths = idx.paths("beta", root=r)
        assert len(alpha_paths) == 2 and len(beta_paths) == 2
        via_a = next(p for p in alpha_paths if g.key_to_id["a"] in p.nodes)
        via_b = next(p for p in beta_paths if g.key_to_id["b"] in p.nodes)
        # same target reached through different intermediates: in-degree 2
        assert assemble_subtree(r, (via_a, via_b)) is None
        same = next(p for p in beta_paths if g.key_to_id["a"] in p.nodes)
        assert assemble_subtree(r, (via_a, same)) is not None

    def test_wrong_root_raises(self, sample_graph, sample_index):
        book = sample_graph.key_to_id["db_book"]
        p = sample_index.paths("database", root=book)[0]
        with pytest.raises(ParameterError):
            assemble_subtree(0, (p,))


class TestTopKQueue:
    def test_tie_break_and_capacity(self):
        def sp(score, tag):
            return ScoredPattern(((tag,),), score, [])

        q = TopKQueue(2)
        for score, tag in [(1.0, 5), (2.0, 9), (2.0, 3), (0.5, 1), (3.0, 7)]:
            q.offer(sp(score, tag))
        ranked = q.ranked()
        assert [(r.score, r.pattern[0][0]) for r in ranked] == [(3.0, 7), (2.0, 3)]

    def test_orders_by_key_on_ties(self):
        def sp(score, tag):
            return ScoredPattern(((tag,),), score, [])

        q = TopKQueue(3)
        for tag in (9, 3, 7):
            q.offer(sp(1.0, tag))
        assert [r.pattern[0][0] for r in q.ranked()] == [3, 7, 9]


class TestSampleGraphEngines:
    def test_top_pattern_and_ordering(self, sample_graph, sample_index, sample_query):
        res = search_baseline(sample_graph, sample_index, sample_query)
        top = res.patterns[0]
        assert top.score == pytest.approx(3.5, abs=1e-12)
        assert top.subtree_count == 2
        names = [pat.pattern_names(sample_graph, p) for p in top.pattern]
        assert names == [
            "Software.Genre.TEXT",
            "Software",
            "Software.Developer.Company",
            "Software.Developer.Company.Revenue",
        ]
        # the single-member Book-rooted pattern scores lower
        book_pattern = next(
            sp for sp in res.patterns if pat.pattern_names(sample_graph, sp.pattern[0]) == "Book"
        )
        assert top.score > book_pattern.score
        assert book_pattern.score == pytest.approx(4 * (7 / 3) / 7, abs=1e-12)

    def test_candidate_roots(self, sample_graph, sample_index, sample_query):
        res = search_linear_topk(sample_graph, sample_index, sample_query)
        assert res.stats["candidate_roots"] == 3
        pairs = search_linear_enum(sample_graph, sample_index, sample_query)
        roots = {m.root for _, members in pairs for m in members}
        assert {sample_graph.entity_keys[r] for r in roots} == {
            "sql_server",
            "oracle_db",
            "db_book",
        }

    def test_pattern_join_roots(self, sample_graph, sample_index, sample_query):
        res = search_pattern_enum(sample_graph, sample_index, sample_query)
        top = res.patterns[0]
        shared = None
        for i, word in enumerate(sample_query.keywords):
            roots = set(sample_index.roots(word, pattern=top.pattern[i]))
            shared = roots if shared is None else shared & roots
        assert {sample_graph.entity_keys[r] for r in shared} == {"sql_server", "oracle_db"}
        assert {m.root for m in top.subtrees} == shared

    def test_absent_token_empty_everywhere(self, sample_graph, sample_index):
        q = Query(("database", "zzzmissing"), k=5)
        assert search_baseline(sample_graph, sample_index, q).patterns == []
        assert search_pattern_enum(sample_graph, sample_index, q).patterns == []
        assert search_linear_topk(sample_graph, sample_index, q).patterns == []
        assert search_linear_enum(sample_graph, sample_index, q) == []

    def test_single_keyword_single_match(self, sample_graph, sample_index):
        q = Query(("sql",), k=5)
        pairs = search_linear_enum(sample_graph, sample_index, q)
        assert len(pairs) == 1
        pattern, members = pairs[0]
        assert len(members) == 1
        assert pat.pattern_names(sample_graph, pattern[0]) == "Software"

    def test_height_bound(self, sample_graph, sample_index, sample_query):
        for sp in search_baseline(sample_graph, sample_index, sample_query).patterns:
            assert pat.tree_height(sp.pattern) <= sample_index.depth


class TestDiamondStats:
    def test_rejections_counted_and_logged(self, sample_graph):
        g = graph_from_text(DIAMOND)
        idx = build_index(g, uniform_pagerank(g), 3)
        q = Query(("alpha", "beta"), k=10)
        stats = {}
        pairs = search_linear_enum(g, idx, q, stats=stats)
        assert stats["tuples_rejected"] == 2
        assert stats["subtrees_accepted"] == sum(len(m) for _, m in pairs)
        # bound from the sampling engine is an upper bound, strict here
        res = search_linear_topk(g, idx, q)
        assert sum(t["bound"] for t in res.stats["types"]) > res.stats["subtrees_accepted"]

    def test_bound_tight_without_rejections(self, sample_graph, sample_index, sample_query):
        res = search_linear_topk(sample_graph, sample_index, sample_query)
        assert res.stats["tuples_rejected"] == 0
        assert sum(t["bound"] for t in res.stats["types"]) == res.stats["subtrees_accepted"]


class TestAdversarialPatternEnum:
    def test_quadratic_combos_but_correct(self):
        p = 17
        g = graph_from_text(adversarial_text(p))
        idx = build_index(g, uniform_pagerank(g), 2)
        q = Query(("alpha", "beta"), k=5)
        res = search_pattern_enum(g, idx, q)
        assert res.stats["pattern_combos_checked"] == p * p
        assert res.stats["empty_combos"] == p * p
        assert res.patterns == []
        assert search_baseline(g, idx, q).patterns == []


class TestEngineAgreement:
    @pytest.mark.parametrize("case", range(12))
    def test_agreement_and_truncation(self, case):
        g, depth, words = random_instance(case)
        idx = build_index(g, compute_pagerank(g), depth)
        q = Query(words, k=5)
        base = search_baseline(g, idx, q)
        penum = search_pattern_enum(g, idx, q)
        topk = search_linear_topk(g, idx, q)
        assert signature(base.patterns) == signature(penum.patterns) == signature(topk.patterns)

        ranked = rank_enumeration(search_linear_enum(g, idx, q))
        assert signature(ranked[: q.k]) == signature(base.patterns)

        for sp in base.patterns:
            assert pat.tree_height(sp.pattern) <= depth

    @pytest.mark.parametrize("case", [2, 5, 9])
    def test_every_leaf_hosts_a_keyword(self, case):
        # minimality: leaves of the union are always some path's terminal
        g, depth, words = random_instance(case)
        idx = build_index(g, compute_pagerank(g), depth)
        pairs = search_linear_enum(g, idx, Query(words, k=1))
        for _, members in pairs:
            for m in members:
                sources = {s for s, _, _ in m.edge_set()}
                leaves = m.node_ids() - sources
                terminals = {p.nodes[-1] for p in m.paths}
                assert leaves <= terminals

    @pytest.mark.parametrize("case", [1, 4, 7])
    def test_member_sets_agree(self, case):
        g, depth, words = random_instance(case)
        idx = build_index(g, compute_pagerank(g), depth)
        q = Query(words, k=3)
        base = search_baseline(g, idx, q)
        topk = search_linear_topk(g, idx, q)
        for a, b in zip(base.patterns, topk.patterns):
            assert sorted(m.sort_key() for m in a.subtrees) == sorted(
                m.sort_key() for m in b.subtrees
            )


class TestSampling:
    def test_exact_configuration_matches_baseline(self, sample_graph, sample_index, sample_query):
        exact = search_linear_topk(
            sample_graph, sample_index, sample_query, SamplingConfig(math.inf, 1.0, 0)
        )
        base = search_baseline(sample_graph, sample_index, sample_query)
        assert signature(exact.patterns) == signature(base.patterns)
        assert all(t["rate"] == 1.0 for t in exact.stats["types"])

    def test_threshold_triggers_sampling(self, sample_graph, sample_index, sample_query):
        res = search_linear_topk(
            sample_graph, sample_index, sample_query, SamplingConfig(threshold=1, rate=0.5, seed=3)
        )
        assert any(t["rate"] == 0.5 for t in res.stats["types"])

    def test_deterministic_given_seed(self, sample_graph, sample_index, sample_query):
        cfg = SamplingConfig(threshold=0, rate=0.4, seed=11)
        r1 = search_linear_topk(sample_graph, sample_index, sample_query, cfg)
        r2 = search_linear_topk(sample_graph, sample_index, sample_query, cfg)
        assert signature(r1.patterns) == signature(r2.patterns)
        assert r1.stats == r2.stats

    def test_exact_scores_after_sampling(self, sample_graph, sample_index):
        # surviving patterns are re-scored exactly: any pattern present in both
        # the sampled and exact runs carries the same exact score
        q = Query(("database", "software", "company", "revenue"), k=10)
        exact = {
            sp.pattern: sp.score
            for sp in search_linear_topk(sample_graph, sample_index, q).patterns
        }
        sampled = search_linear_topk(
            sample_graph, sample_index, q, SamplingConfig(threshold=0, rate=0.6, seed=5)
        )
        for sp in sampled.patterns:
            assert sp.score == pytest.approx(exact[sp.pattern], rel=1e-12)
            assert sp.estimated_score is not None

    def test_non_sum_aggregator_rejected_with_sampling(self, sample_graph, sample_index, sample_query):
        cfg = ScoringConfig(aggregator="max")
        with pytest.raises(ParameterError):
            search_linear_topk(
                sample_graph, sample_index, sample_query, SamplingConfig(0, 0.5, 0), cfg
            )
        # exact mode works for every aggregator
        res = search_linear_topk(sample_graph, sample_index, sample_query, SamplingConfig(), cfg)
        assert res.patterns


class TestUniformStream:
    def test_deterministic_and_in_range(self):
        draws = [_uniform01(42, 7, i) for i in range(100)]
        assert draws == [_uniform01(42, 7, i) for i in range(100)]
        assert all(0.0 <= d < 1.0 for d in draws)

    def test_streams_differ(self):
        a = [_uniform01(42, 1, i) for i in range(50)]
        b = [_uniform01(42, 2, i) for i in range(50)]
        c = [_uniform01(43, 1, i) for i in range(50)]
        assert a != b and a != c

    def test_mean_roughly_half(self):
        draws = [_uniform01(7, 0, i) for i in range(4000)]
        assert abs(sum(draws) / len(draws) - 0.5) < 0.03
