"""The four query engines over the path index.

* ``search_baseline`` - index-free enumeration of all valid subtrees per root
  (the same DFS used to build the index, run online), grouped into one global
  pattern dictionary, then scored and truncated to the top k. The reference
  implementation everything else must agree with.
* ``search_pattern_enum`` - per root type, enumerate the cross product of the
  keywords' path patterns, intersect the pattern-first root sets, and for
  non-empty intersections materialize the member subtrees. Fast when queries
  have few patterns; wasted intersections on empty pattern combinations are
  its worst case.
* ``search_linear_enum`` - candidate roots are the intersection of the
  root-first root sets; every root is expanded into its pattern and path
  products, so no time is spent on empty patterns. Returns the complete
  pattern -> subtrees mapping, unranked.
* ``search_linear_topk`` - the linear enumeration partitioned by root type
  with optional per-type Bernoulli root sampling: when the upper bound on a
  type's subtree count reaches the sampling threshold, only a `rate` fraction
  of its roots is expanded, pattern scores are estimated from the sample (sum
  aggregation scaled by 1/rate), and only the per-type top-k estimated
  patterns are materialized exactly and pushed into the global queue. With
  threshold = inf and rate = 1 it returns the exact top k.

Path tuples whose union is not a rooted tree are rejected everywhere (the
union must be a subtree of the graph); rejected counts are reported in stats
and logged per query. Ordering is deterministic end to end: scores descending,
canonical pattern key ascending, members by (root, path keys).
"""
from __future__ import annotations

import heapq
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from . import kernels
from . import patterns as pat
from .errors import ParameterError
from .graph import TEXT_TYPE_ID, KnowledgeGraph, tokenize
from .pathindex import IndexedPath, PathIndex, iter_root_paths
from .scoring import DEFAULT_CONFIG, ScoringConfig, estimate_pattern_score, pattern_score, tree_score

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Query:
    keywords: tuple[str, ...]
    k: int = 10

    def __post_init__(self):
        if len(self.keywords) < 1:
            raise ParameterError("query needs at least one keyword")
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        for w in self.keywords:
            if tokenize(w) != [w]:
                raise ParameterError(f"keyword {w!r} is not a single normalized token")

    @classmethod
    def from_text(cls, text: str, k: int = 10) -> "Query":
        return cls(tuple(tokenize(text)), k)


@dataclass(frozen=True)
class SamplingConfig:
    threshold: float = math.inf  # sample a type only when its subtree bound reaches this
    rate: float = 1.0            # Bernoulli root-selection probability
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ParameterError(f"sampling rate must be in (0, 1], got {self.rate}")


EXACT_SAMPLING = SamplingConfig()


@dataclass(frozen=True, slots=True)
class ValidSubtree:
    """A concrete answer tree: one indexed path per keyword, joined at `root`."""

    root: int
    paths: tuple[IndexedPath, ...]

    def tree_pattern(self) -> pat.TreePattern:
        return tuple(p.pattern for p in self.paths)

    def sort_key(self):
        return (self.root, tuple(p.sort_key() for p in self.paths))

    def node_ids(self) -> set[int]:
        out = set()
        for p in self.paths:
            out.update(p.nodes)
        return out

    def edge_set(self) -> set[tuple[int, int, int]]:
        out = set()
        for p in self.paths:
            for i in range(1, len(p.nodes)):
                out.add((p.nodes[i - 1], p.attrs[i - 1], p.nodes[i]))
        return out


@dataclass
class ScoredPattern:
    pattern: pat.TreePattern
    score: float
    subtrees: list[ValidSubtree]
    estimated_score: Optional[float] = None

    @property
    def subtree_count(self) -> int:
        return len(self.subtrees)


@dataclass
class SearchResult:
    patterns: list[ScoredPattern]
    stats: dict = field(default_factory=dict)


def assemble_subtree(root: int, paths) -> Optional[ValidSubtree]:
    """Union the per-keyword paths into a subtree; None when the union is not
    a rooted tree (some node would need two distinct incoming edges)."""
    parent_of: dict[int, tuple[int, int]] = {}
    for p in paths:
        if p.nodes[0] != root:
            raise ParameterError(f"path rooted at {p.nodes[0]} joined under root {root}")
        for i in range(1, len(p.nodes)):
            c = p.nodes[i]
            edge = (p.nodes[i - 1], p.attrs[i - 1])
            known = parent_of.setdefault(c, edge)
            if known != edge:
                return None
    return ValidSubtree(root, tuple(paths))


class _RevKey:
    """Inverts comparison of a wrapped key, for min-heap tie-breaking."""

    __slots__ = ("key",)

    def __init__(self, key):
        self.key = key

    def __lt__(self, other):
        return self.key > other.key

    def __eq__(self, other):
        return self.key == other.key


class TopKQueue:
    """Bounded container keeping the k best (score desc, pattern key asc)."""

    def __init__(self, k: int):
        self.k = k
        self._heap: list[tuple[float, _RevKey, ScoredPattern]] = []

    def offer(self, item: ScoredPattern) -> None:
        entry = (item.score, _RevKey(pat.tree_sort_key(item.pattern)), item)
        if len(self._heap) < self.k:
            heapq.heappush(self._heap, entry)
        elif entry[:2] > self._heap[0][:2]:
            heapq.heapreplace(self._heap, entry)

    def __len__(self):
        return len(self._heap)

    def ranked(self) -> list[ScoredPattern]:
        return [
            e[2]
            for e in sorted(self._heap, key=lambda e: (-e[0], pat.tree_sort_key(e[2].pattern)))
        ]


# ---------------------------------------------------------------------------
# Shared expansion machinery
# ---------------------------------------------------------------------------


def _intersect_sorted(lists: list[list[int]]) -> list[int]:
    if not lists:
        return []
    common = set(lists[0])
    for other in lists[1:]:
        common &= set(other)
        if not common:
            return []
    return sorted(common)


def _expand_root(idx: PathIndex, words, root: int, tree_dict, stats) -> None:
    """Enumerate all valid subtrees under `root` into tree_dict (pattern product
    then path product, with the tree-consistency filter)."""
    pattern_lists = [idx.patterns(w, root=root) for w in words]
    if any(not pl for pl in pattern_lists):
        return
    for combo in itertools.product(*pattern_lists):
        blocks = [idx.block(words[i], root, combo[i]) for i in range(len(words))]
        rec_lists = [idx.paths(words[i], pattern=combo[i], root=root) for i in range(len(words))]
        checked = 1
        for rl in rec_lists:
            checked *= len(rl)
        rows = kernels.join_tree_tuples(blocks)
        stats["path_tuples_checked"] += checked
        stats["subtrees_accepted"] += len(rows)
        stats["tuples_rejected"] += checked - len(rows)
        if rows:
            members = tree_dict.setdefault(combo, [])
            for row in rows:
                members.append(
                    ValidSubtree(root, tuple(rec_lists[i][row[i]] for i in range(len(words))))
                )


def _materialize_pattern(idx: PathIndex, words, tree_pattern, roots) -> list[ValidSubtree]:
    """Exact member set of one tree pattern over the given candidate roots."""
    members: list[ValidSubtree] = []
    for root in roots:
        rec_lists = [
            idx.paths(words[i], pattern=tree_pattern[i], root=root) for i in range(len(words))
        ]
        if any(not rl for rl in rec_lists):
            continue
        blocks = [idx.block(words[i], root, tree_pattern[i]) for i in range(len(words))]
        for row in kernels.join_tree_tuples(blocks):
            members.append(
                ValidSubtree(root, tuple(rec_lists[i][row[i]] for i in range(len(words))))
            )
    return members


def _new_stats(**extra) -> dict:
    stats = {
        "path_tuples_checked": 0,
        "subtrees_accepted": 0,
        "tuples_rejected": 0,
    }
    stats.update(extra)
    return stats


def _log_rejections(name: str, query: Query, stats: dict) -> None:
    if stats.get("tuples_rejected"):
        logger.debug(
            "%s %s: rejected %d non-tree path tuples (%d accepted)",
            name,
            " ".join(query.keywords),
            stats["tuples_rejected"],
            stats["subtrees_accepted"],
        )


# ---------------------------------------------------------------------------
# Engines
# ---------------------------------------------------------------------------


def search_baseline(
    graph: KnowledgeGraph,
    idx: PathIndex,
    query: Query,
    config: ScoringConfig = DEFAULT_CONFIG,
) -> SearchResult:
    """Enumeration-aggregation reference engine (no materialized index use)."""
    words = list(query.keywords)
    wanted = set(words)
    scores = idx.pagerank.scores
    tree_dict: dict[pat.TreePattern, list[ValidSubtree]] = {}
    stats = _new_stats(candidate_roots=0)
    for root in range(graph.n_entities):
        if graph.entity_type[root] == TEXT_TYPE_ID:
            continue
        per_word: dict[str, list[IndexedPath]] = {w: [] for w in wanted}
        for hit in iter_root_paths(graph, scores, idx.depth, root):
            for word, locus, sim in hit.matches:
                if word in wanted:
                    per_word[word].append(
                        IndexedPath(
                            root=root,
                            nodes=hit.nodes,
                            attrs=hit.attrs,
                            edge_match=hit.edge_match,
                            locus=locus,
                            node_count=len(hit.nodes),
                            pr_term=hit.pr_term,
                            sim_term=sim,
                            pattern=hit.pattern,
                        )
                    )
        if any(not per_word[w] for w in wanted):
            continue
        stats["candidate_roots"] += 1
        for w in wanted:
            per_word[w].sort(key=IndexedPath.sort_key)
        for tup in itertools.product(*(per_word[w] for w in words)):
            stats["path_tuples_checked"] += 1
            subtree = assemble_subtree(root, tup)
            if subtree is None:
                stats["tuples_rejected"] += 1
                continue
            stats["subtrees_accepted"] += 1
            tree_dict.setdefault(subtree.tree_pattern(), []).append(subtree)

    queue = TopKQueue(query.k)
    for tree_pattern, members in tree_dict.items():
        member_scores = [tree_score(m.paths, config) for m in members]
        queue.offer(ScoredPattern(tree_pattern, pattern_score(member_scores, config), members))
    stats["patterns_found"] = len(tree_dict)
    _log_rejections("baseline", query, stats)
    return SearchResult(queue.ranked(), stats)


def search_pattern_enum(
    graph: KnowledgeGraph,
    idx: PathIndex,
    query: Query,
    config: ScoringConfig = DEFAULT_CONFIG,
) -> SearchResult:
    """Pattern-product engine over the pattern-first layout."""
    words = list(query.keywords)
    by_type: list[dict[int, list[pat.PathPattern]]] = []
    for w in words:
        groups: dict[int, list[pat.PathPattern]] = {}
        for p in idx.patterns(w):
            groups.setdefault(pat.root_type(p), []).append(p)
        by_type.append(groups)

    common_types = set(by_type[0])
    for groups in by_type[1:]:
        common_types &= set(groups)

    queue = TopKQueue(query.k)
    stats = _new_stats(pattern_combos_checked=0, empty_combos=0, patterns_found=0)
    for type_id in sorted(common_types):
        pattern_lists = [groups[type_id] for groups in by_type]
        for combo in itertools.product(*pattern_lists):
            stats["pattern_combos_checked"] += 1
            roots = _intersect_sorted(
                [idx.roots(words[i], pattern=combo[i]) for i in range(len(words))]
            )
            if not roots:
                stats["empty_combos"] += 1
                continue
            members: list[ValidSubtree] = []
            for root in roots:
                rec_lists = [
                    idx.paths(words[i], pattern=combo[i], root=root) for i in range(len(words))
                ]
                blocks = [idx.block(words[i], root, combo[i]) for i in range(len(words))]
                checked = 1
                for rl in rec_lists:
                    checked *= len(rl)
                rows = kernels.join_tree_tuples(blocks)
                stats["path_tuples_checked"] += checked
                stats["subtrees_accepted"] += len(rows)
                stats["tuples_rejected"] += checked - len(rows)
                for row in rows:
                    members.append(
                        ValidSubtree(root, tuple(rec_lists[i][row[i]] for i in range(len(words))))
                    )
            if not members:
                stats["empty_combos"] += 1
                continue
            stats["patterns_found"] += 1
            member_scores = [tree_score(m.paths, config) for m in members]
            queue.offer(ScoredPattern(combo, pattern_score(member_scores, config), members))
    _log_rejections("pattern-enum", query, stats)
    return SearchResult(queue.ranked(), stats)


def search_linear_enum(
    graph: KnowledgeGraph,
    idx: PathIndex,
    query: Query,
    stats: Optional[dict] = None,
) -> list[tuple[pat.TreePattern, list[ValidSubtree]]]:
    """Full enumeration: every tree pattern with its complete subtree set."""
    words = list(query.keywords)
    if stats is None:
        stats = _new_stats()
    else:
        stats.update(_new_stats())
    roots = _intersect_sorted([idx.roots(w) for w in words])
    stats["candidate_roots"] = len(roots)
    tree_dict: dict[pat.TreePattern, list[ValidSubtree]] = {}
    for root in roots:
        _expand_root(idx, words, root, tree_dict, stats)
    stats["patterns_found"] = len(tree_dict)
    _log_rejections("linear-enum", query, stats)
    return sorted(tree_dict.items(), key=lambda kv: pat.tree_sort_key(kv[0]))


def search_linear_topk(
    graph: KnowledgeGraph,
    idx: PathIndex,
    query: Query,
    sampling: SamplingConfig = EXACT_SAMPLING,
    config: ScoringConfig = DEFAULT_CONFIG,
) -> SearchResult:
    """Type-partitioned linear enumeration with optional root sampling."""
    words = list(query.keywords)
    may_sample = sampling.rate < 1.0 and sampling.threshold != math.inf
    if may_sample and config.aggregator != "sum":
        raise ParameterError(
            f"sampling supports only the sum aggregator, not {config.aggregator!r}"
        )

    all_roots = _intersect_sorted([idx.roots(w) for w in words])
    by_type: dict[int, list[int]] = {}
    for r in all_roots:
        by_type.setdefault(graph.entity_type[r], []).append(r)

    queue = TopKQueue(query.k)
    stats = _new_stats(candidate_roots=len(all_roots), roots_expanded=0, types=[])
    for type_id in sorted(by_type):
        roots = by_type[type_id]
        bound = 0
        for r in roots:
            prod = 1
            for w in words:
                prod *= len(idx.paths(w, root=r))
            bound += prod
        rate = sampling.rate if bound >= sampling.threshold else 1.0

        tree_dict: dict[pat.TreePattern, list[ValidSubtree]] = {}
        expanded = 0
        for position, root in enumerate(roots):
            if _uniform01(sampling.seed, type_id, position) < rate:
                _expand_root(idx, words, root, tree_dict, stats)
                expanded += 1
        stats["roots_expanded"] += expanded
        stats["types"].append(
            {"type": type_id, "roots": len(roots), "bound": bound, "rate": rate, "expanded": expanded}
        )
        if not tree_dict:
            continue

        estimates = []
        for tree_pattern, members in tree_dict.items():
            member_scores = [tree_score(m.paths, config) for m in members]
            if rate == 1.0 and config.aggregator != "sum":
                est = pattern_score(member_scores, config)
            else:
                est = estimate_pattern_score(member_scores, rate)
            estimates.append((est, tree_pattern, members, member_scores))
        estimates.sort(key=lambda e: (-e[0], pat.tree_sort_key(e[1])))

        for est, tree_pattern, sampled_members, sampled_scores in estimates[: query.k]:
            if rate == 1.0:
                # The sample is complete: reuse members and scores as exact.
                members = sampled_members
                member_scores = sampled_scores
            else:
                members = _materialize_pattern(idx, words, tree_pattern, roots)
                member_scores = [tree_score(m.paths, config) for m in members]
            exact = pattern_score(member_scores, config)
            queue.offer(ScoredPattern(tree_pattern, exact, members, estimated_score=est))
    _log_rejections("linear-topk", query, stats)
    return SearchResult(queue.ranked(), stats)


# ---------------------------------------------------------------------------
# Deterministic per-(seed, type) sampling stream
# ---------------------------------------------------------------------------


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _uniform01(seed: int, stream_key: int, position: int) -> float:
    """position-th uniform draw of the (seed, stream_key) stream, in [0, 1)."""
    base = _splitmix64((seed & _MASK64) ^ ((stream_key * 0xD1B54A32D192ED03) & _MASK64))
    return (_splitmix64((base + position) & _MASK64) >> 11) * 2.0**-53
