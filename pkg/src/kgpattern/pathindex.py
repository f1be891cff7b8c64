"""Materialized path index in pattern-first and root-first layouts.

For every word occurring in the graph's text, the index stores all simple
directed paths with at most ``depth`` nodes that start at some (non-literal)
root entity and end at a node or edge containing the word:

* node match - the word occurs in the terminal node's own text or in the text
  of its type; both loci collapse into one entry whose similarity term is the
  larger of the two Jaccard scores;
* edge match - the word occurs in the terminal edge's attribute text; the
  stored node list includes the edge's target, so ``node_count`` counts it,
  while the pattern ends on the attribute type.

Each entry precomputes the three per-path score terms (node count, PageRank of
the matched node or of the matched edge's source, Jaccard similarity), so
query-time scoring is pure arithmetic.

The same entry multiset is kept in two orders: word -> pattern -> root ->
paths (pattern-first) and word -> root -> pattern -> paths (root-first). Keys
are sorted (patterns length-lexicographically, roots by id), and the leaf path
lists share one canonical order, so both layouts flatten to the same sorted
sequence.

Literal (dummy TEXT) entities are never used as roots: they stand for
attribute *values*, carry no type, and cannot anchor a table answer. They do
appear as path terminals.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional

from . import patterns as pat
from .errors import ParameterError
from .graph import TEXT_TYPE_ID, KnowledgeGraph, jaccard_similarity
from .pagerank import PageRankVector

logger = logging.getLogger(__name__)

# Match loci
NODE_TEXT = 0
NODE_TYPE = 1
EDGE_TYPE = 2
LOCUS_NAMES = {NODE_TEXT: "node-text", NODE_TYPE: "node-type", EDGE_TYPE: "edge-type"}


@dataclass(frozen=True, slots=True)
class IndexedPath:
    """One materialized root-to-match path for one word."""

    root: int
    nodes: tuple[int, ...]
    attrs: tuple[int, ...]
    edge_match: bool
    locus: int
    node_count: int
    pr_term: float
    sim_term: float
    pattern: pat.PathPattern

    def sort_key(self):
        return (pat.sort_key(self.pattern), self.root, self.nodes, self.attrs)

    def steps(self) -> tuple[list[int], list[int], list[int]]:
        """(child, parent, attr) triples for every non-root node on the path."""
        child = list(self.nodes[1:])
        parent = list(self.nodes[:-1])
        attr = list(self.attrs)
        return child, parent, attr


@dataclass(slots=True)
class PathHit:
    """All word matches discovered on one concrete path (pre-index form)."""

    nodes: tuple[int, ...]
    attrs: tuple[int, ...]
    edge_match: bool
    pattern: pat.PathPattern
    pr_term: float
    matches: list[tuple[str, int, float]]  # (word, locus, sim)


@dataclass
class IndexStats:
    entry_count: int = 0
    cost_proxy: int = 0  # sum over enumerated paths of node_count * matched-word count
    word_sizes: dict[str, int] = field(default_factory=dict)


class _WordIndex:
    """Both layouts for one word, over one shared record list."""

    __slots__ = ("records", "pattern_first", "root_first")

    def __init__(self, records: list[IndexedPath]):
        records.sort(key=IndexedPath.sort_key)
        self.records = records
        self.pattern_first: dict[pat.PathPattern, dict[int, list[IndexedPath]]] = {}
        for rec in records:
            self.pattern_first.setdefault(rec.pattern, {}).setdefault(rec.root, []).append(rec)
        self.root_first: dict[int, dict[pat.PathPattern, list[IndexedPath]]] = {}
        for rec in sorted(records, key=lambda r: (r.root, pat.sort_key(r.pattern), r.nodes, r.attrs)):
            self.root_first.setdefault(rec.root, {}).setdefault(rec.pattern, []).append(rec)


def iter_root_paths(
    graph: KnowledgeGraph, pr_scores, depth: int, root: int
) -> Iterator[PathHit]:
    """Enumerate every simple path from `root` (at most `depth` nodes) that
    ends at a word-bearing node or edge, yielding its matches.

    Shared by index construction and by the index-free baseline engine.
    """
    nodes = [root]
    attrs: list[int] = []
    on_path = {root}

    def visit() -> Iterator[PathHit]:
        terminal = nodes[-1]
        text_set = graph.entity_token_set[terminal]
        type_set = graph.type_token_set[graph.entity_type[terminal]]
        words = text_set | type_set
        pattern = pat.path_pattern_of(graph, nodes, attrs, edge_match=False)
        if words:
            matches = []
            for w in sorted(words):
                sim_text = jaccard_similarity(w, text_set) if w in text_set else 0.0
                sim_type = jaccard_similarity(w, type_set) if w in type_set else 0.0
                locus = NODE_TEXT if sim_text >= sim_type else NODE_TYPE
                matches.append((w, locus, max(sim_text, sim_type)))
            yield PathHit(tuple(nodes), tuple(attrs), False, pattern, float(pr_scores[terminal]), matches)
        if len(nodes) < depth:
            for attr_id, target in graph.adjacency[terminal]:
                if target in on_path:
                    continue
                attr_set = graph.attr_token_set[attr_id]
                if attr_set:
                    matches = [
                        (w, EDGE_TYPE, jaccard_similarity(w, attr_set)) for w in sorted(attr_set)
                    ]
                    yield PathHit(
                        tuple(nodes) + (target,),
                        tuple(attrs) + (attr_id,),
                        True,
                        pattern + (attr_id,),
                        float(pr_scores[terminal]),
                        matches,
                    )
                nodes.append(target)
                attrs.append(attr_id)
                on_path.add(target)
                yield from visit()
                on_path.remove(target)
                attrs.pop()
                nodes.pop()

    yield from visit()


class PathIndex:
    """Dual-layout path index plus the PageRank vector it was built with."""

    def __init__(self, depth, pagerank, words, stats, n_entities, n_types, n_attrs):
        self.depth: int = depth
        self.pagerank: PageRankVector = pagerank
        self.words: dict[str, _WordIndex] = words
        self.stats: IndexStats = stats
        self.n_entities = n_entities
        self.n_types = n_types
        self.n_attrs = n_attrs
        self.type_names: list[str] = []
        self.attr_names: list[str] = []
        self._blocks: dict[tuple[str, int, pat.PathPattern], tuple] = {}

    # -- access methods ------------------------------------------------

    def patterns(self, word: str, root: Optional[int] = None) -> list[pat.PathPattern]:
        """Patterns under which some root (or the given root) reaches `word`."""
        wi = self.words.get(word)
        if wi is None:
            return []
        if root is None:
            return list(wi.pattern_first.keys())
        return list(wi.root_first.get(root, {}).keys())

    def roots(self, word: str, pattern: Optional[pat.PathPattern] = None) -> list[int]:
        """Roots reaching `word`, optionally restricted to one pattern."""
        wi = self.words.get(word)
        if wi is None:
            return []
        if pattern is None:
            return list(wi.root_first.keys())
        return list(wi.pattern_first.get(pattern, {}).keys())

    def paths(
        self,
        word: str,
        pattern: Optional[pat.PathPattern] = None,
        root: Optional[int] = None,
    ) -> list[IndexedPath]:
        """Materialized paths for (word, pattern, root); any selector may be omitted."""
        wi = self.words.get(word)
        if wi is None:
            return []
        if pattern is not None and root is not None:
            return list(wi.pattern_first.get(pattern, {}).get(root, []))
        if root is not None:
            out: list[IndexedPath] = []
            for plist in wi.root_first.get(root, {}).values():
                out.extend(plist)
            return out
        if pattern is not None:
            out = []
            for plist in wi.pattern_first.get(pattern, {}).values():
                out.extend(plist)
            return out
        return list(wi.records)

    def flatten(self, word: str, layout: str = "pattern") -> list[IndexedPath]:
        """All records for a word by walking one layout (for agreement checks)."""
        wi = self.words.get(word)
        if wi is None:
            return []
        out: list[IndexedPath] = []
        if layout == "pattern":
            for roots in wi.pattern_first.values():
                for plist in roots.values():
                    out.extend(plist)
        else:
            for pats in wi.root_first.values():
                for plist in pats.values():
                    out.extend(plist)
        return out

    def vocabulary(self) -> list[str]:
        return list(self.words.keys())

    # -- kernel plumbing -------------------------------------------------

    def block(self, word: str, root: int, pattern: pat.PathPattern):
        """Cached (child, parent, attr, offsets) lists for a leaf path list."""
        key = (word, root, pattern)
        blk = self._blocks.get(key)
        if blk is None:
            child: list[int] = []
            parent: list[int] = []
            attr: list[int] = []
            offsets = [0]
            for rec in self.paths(word, pattern=pattern, root=root):
                c, p, a = rec.steps()
                child.extend(c)
                parent.extend(p)
                attr.extend(a)
                offsets.append(len(child))
            blk = (child, parent, attr, offsets)
            self._blocks[key] = blk
        return blk


def build_index(graph: KnowledgeGraph, pagerank: PageRankVector, depth: int) -> PathIndex:
    """Materialize both index layouts for all paths of at most `depth` nodes."""
    if depth < 1:
        raise ParameterError(f"depth must be >= 1, got {depth}")
    per_word: dict[str, list[IndexedPath]] = {}
    stats = IndexStats()
    scores = pagerank.scores
    for root in range(graph.n_entities):
        if graph.entity_type[root] == TEXT_TYPE_ID:
            continue
        for hit in iter_root_paths(graph, scores, depth, root):
            n = len(hit.nodes)
            stats.cost_proxy += n * len(hit.matches)
            for word, locus, sim in hit.matches:
                rec = IndexedPath(
                    root=root,
                    nodes=hit.nodes,
                    attrs=hit.attrs,
                    edge_match=hit.edge_match,
                    locus=locus,
                    node_count=n,
                    pr_term=hit.pr_term,
                    sim_term=sim,
                    pattern=hit.pattern,
                )
                per_word.setdefault(word, []).append(rec)
                stats.entry_count += 1

    words = {w: _WordIndex(per_word[w]) for w in sorted(per_word)}
    stats.word_sizes = {w: len(words[w].records) for w in words}
    logger.debug(
        "built index: depth=%d, %d words, %d entries", depth, len(words), stats.entry_count
    )
    idx = PathIndex(
        depth, pagerank, words, stats, graph.n_entities, graph.n_types, graph.n_attrs
    )
    idx.type_names = list(graph.type_names)
    idx.attr_names = list(graph.attr_names)
    return idx
