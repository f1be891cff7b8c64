"""Access to the bundled sample graph."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .graph import KnowledgeGraph, load_graph


def sample_graph_path() -> Path:
    """Path of the bundled software/publishing sample graph."""
    return Path(str(resources.files("kgpattern").joinpath("data/software_kb.graph")))


def load_sample_graph() -> KnowledgeGraph:
    return load_graph(sample_graph_path())
