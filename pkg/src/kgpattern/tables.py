"""Render a tree pattern and its subtrees as a table answer.

One row per subtree. Columns are the union over keywords of the per-path
pattern prefixes, left to right in keyword order and then by depth, with
identical prefixes merged once (two keywords routed through the same typed
step share one column). Cells hold entity display texts; literal nodes render
their raw text. In the rare case where one merged column is fed by several
keywords binding different nodes of the same subtree, the distinct texts are
joined with "; " so nothing is lost.

Column names: the type name for typed-node columns, the attribute name for
literal-valued and edge-ending columns, and the full dotted path when two
distinct columns would otherwise collide on the same name.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from . import patterns as pat
from .errors import TableConsistencyError
from .graph import TEXT_TYPE_ID, KnowledgeGraph


@dataclass
class TableAnswer:
    columns: list[tuple[tuple, str]]  # (pattern-prefix key, display name)
    rows: list[list[str]]

    @property
    def column_names(self) -> list[str]:
        return [name for _, name in self.columns]

    def to_text(self) -> str:
        names = self.column_names
        widths = [len(n) for n in names]
        for row in self.rows:
            for i, cell in enumerate(row):
                widths[i] = max(widths[i], len(cell))
        lines = [
            " | ".join(n.ljust(widths[i]) for i, n in enumerate(names)),
            "-+-".join("-" * w for w in widths),
        ]
        for row in self.rows:
            lines.append(" | ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.column_names)
        writer.writerows(self.rows)
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {"columns": self.column_names, "rows": self.rows}


def _column_keys(tree_pattern) -> list[tuple]:
    keys: list[tuple] = []
    seen = set()
    for path_pattern in tree_pattern:
        n_listed = len(path_pattern) // 2 + 1 if not pat.is_edge_ending(path_pattern) else len(path_pattern) // 2
        for depth in range(n_listed):
            key = path_pattern[: 2 * depth + 1]
            if key not in seen:
                seen.add(key)
                keys.append(key)
        if pat.is_edge_ending(path_pattern):
            key = path_pattern
            if key not in seen:
                seen.add(key)
                keys.append(key)
    return keys


def _display_name(graph: KnowledgeGraph, key: tuple) -> str:
    if len(key) % 2 == 0:  # edge-ending column: named after the attribute
        return graph.attr_names[key[-1]]
    type_id = key[-1]
    if type_id == TEXT_TYPE_ID and len(key) > 1:
        return graph.attr_names[key[-2]]  # literal column: attribute carries the name
    return graph.type_names[type_id]


def _full_path_name(graph: KnowledgeGraph, key: tuple) -> str:
    return pat.pattern_names(graph, key)


def _node_position(key: tuple) -> int:
    """Index into a path's node list for the value this column shows."""
    if len(key) % 2 == 0:  # edge column shows the edge's target node
        return len(key) // 2
    return (len(key) + 1) // 2 - 1


def render_table(graph: KnowledgeGraph, tree_pattern, subtrees) -> TableAnswer:
    """Build the table answer for `tree_pattern` from its member subtrees."""
    for subtree in subtrees:
        if subtree.tree_pattern() != tuple(tree_pattern):
            raise TableConsistencyError(
                f"subtree rooted at {subtree.root} does not match the pattern"
            )

    keys = _column_keys(tree_pattern)
    names = [_display_name(graph, key) for key in keys]
    counts: dict[str, int] = {}
    for name in names:
        counts[name] = counts.get(name, 0) + 1
    names = [
        _full_path_name(graph, key) if counts[name] > 1 else name
        for key, name in zip(keys, names)
    ]

    # For each column, which (keyword position, node position) pairs feed it.
    feeders: list[list[tuple[int, int]]] = [[] for _ in keys]
    key_index = {key: i for i, key in enumerate(keys)}
    for kw_pos, path_pattern in enumerate(tree_pattern):
        n_listed = len(path_pattern) // 2 + 1 if not pat.is_edge_ending(path_pattern) else len(path_pattern) // 2
        for depth in range(n_listed):
            key = path_pattern[: 2 * depth + 1]
            feeders[key_index[key]].append((kw_pos, depth))
        if pat.is_edge_ending(path_pattern):
            feeders[key_index[path_pattern]].append((kw_pos, len(path_pattern) // 2))

    rows = []
    for subtree in subtrees:
        row = []
        for col_feeders in feeders:
            values: list[str] = []
            for kw_pos, node_pos in col_feeders:
                text = graph.entity_text[subtree.paths[kw_pos].nodes[node_pos]]
                if text not in values:
                    values.append(text)
            row.append("; ".join(values))
        rows.append(row)
    return TableAnswer(list(zip(keys, names)), rows)
