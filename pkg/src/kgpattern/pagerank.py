"""PageRank over the knowledge graph by power iteration.

Every score starts at 1/n; each iteration applies

    PR(v) <- (1 - a)/n + a * sum over in-edges (u, v) of PR(u)/outdeg(u)

and the loop stops once no score moves by `tolerance` or more. There is no
dangling-mass redistribution, so scores need not sum to 1; every converged
score lies in [(1 - a)/n, 1]. Edge contributions are accumulated in a fixed
(target, source, attr) order, so results are bit-identical run to run.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import KnowledgeGraph


@dataclass
class PageRankVector:
    scores: np.ndarray  # float64, one score per entity id
    damping: float
    tolerance: float

    def __len__(self) -> int:
        return len(self.scores)


def compute_pagerank(
    graph: KnowledgeGraph,
    damping: float = 0.85,
    tolerance: float = 1e-8,
    max_iterations: int = 10_000,
) -> PageRankVector:
    n = graph.n_entities
    if n == 0:
        return PageRankVector(np.zeros(0), damping, tolerance)

    if graph.edges:
        order = sorted(range(len(graph.edges)), key=lambda i: (graph.edges[i][2], graph.edges[i][0], graph.edges[i][1]))
        src = np.array([graph.edges[i][0] for i in order], dtype=np.int64)
        dst = np.array([graph.edges[i][2] for i in order], dtype=np.int64)
    else:
        src = np.zeros(0, dtype=np.int64)
        dst = np.zeros(0, dtype=np.int64)
    out_degree = np.bincount(src, minlength=n).astype(np.float64)

    base = (1.0 - damping) / n
    pr = np.full(n, 1.0 / n)
    for _ in range(max_iterations):
        if len(src):
            contrib = np.bincount(dst, weights=pr[src] / out_degree[src], minlength=n)
        else:
            contrib = np.zeros(n)
        nxt = base + damping * contrib
        delta = np.max(np.abs(nxt - pr))
        pr = nxt
        if delta < tolerance:
            break
    return PageRankVector(pr, damping, tolerance)


def uniform_pagerank(graph: KnowledgeGraph, value: float = 1.0) -> PageRankVector:
    """Constant stub vector; handy for tests that want importance factored out."""
    return PageRankVector(np.full(graph.n_entities, value), 0.0, 0.0)
