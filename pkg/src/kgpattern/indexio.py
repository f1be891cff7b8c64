"""Binary serialization of the path index.

Little-endian throughout, 64-bit offsets. Layout::

    magic "KGPX" | version u32 | depth u32
    n_entities u32 | n_types u32 | n_attrs u32
    damping f64 | tolerance f64
    type-name string table | attr-name string table
    pagerank: count u32, f64 * count
    pattern table: count u32, then per pattern u16 element count + u32 ids
                   (patterns in canonical length-lexicographic order; a
                   pattern's table position is its id)
    vocabulary string table
    per-word blocks, in vocabulary order:
        record count u64
        records, sorted pattern-first:
            pattern_id u32 | root u32 | n_nodes u8 | edge_match u8 | locus u8
            | pad u8 | nodes u32 * n_nodes | attrs u32 * (n_nodes - 1)
            | pr f64 | sim f64
        pattern-first runs: count u32, then (pattern_id u32, root u32,
            start u64, count u64) into the record array
        root-first permutation: u64 * record-count record indices
        root-first runs: count u32, then (root u32, pattern_id u32,
            start u64, count u64) into the permutation
    stats: entry_count u64 | cost_proxy u64
    trailer "XPGK"

A string table is a u32 count followed by (u32 byte length, UTF-8 bytes) per
entry. Bad magic or version raises IndexFormatError; any short read or a
missing trailer raises IndexCorruptError.
"""
from __future__ import annotations

import io
import struct
from pathlib import Path
from typing import Union

import numpy as np

from . import patterns as pat
from .errors import IndexCorruptError, IndexFormatError
from .pagerank import PageRankVector
from .pathindex import IndexedPath, IndexStats, PathIndex, _WordIndex

MAGIC = b"KGPX"
TRAILER = b"XPGK"
VERSION = 1


class _Writer:
    def __init__(self):
        self.buf = io.BytesIO()

    def pack(self, fmt, *values):
        self.buf.write(struct.pack("<" + fmt, *values))

    def raw(self, data: bytes):
        self.buf.write(data)

    def string(self, s: str):
        data = s.encode("utf-8")
        self.pack("I", len(data))
        self.raw(data)

    def string_table(self, strings):
        self.pack("I", len(strings))
        for s in strings:
            self.string(s)

    def getvalue(self) -> bytes:
        return self.buf.getvalue()


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise IndexCorruptError(
                f"truncated index: wanted {n} bytes at offset {self.pos}, have {len(self.data) - self.pos}"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt):
        fmt = "<" + fmt
        size = struct.calcsize(fmt)
        return struct.unpack(fmt, self.take(size))

    def string(self) -> str:
        (n,) = self.unpack("I")
        return self.take(n).decode("utf-8")

    def string_table(self) -> list[str]:
        (n,) = self.unpack("I")
        return [self.string() for _ in range(n)]


def serialize(idx: PathIndex) -> bytes:
    w = _Writer()
    w.raw(MAGIC)
    w.pack("II", VERSION, idx.depth)
    w.pack("III", idx.n_entities, idx.n_types, idx.n_attrs)
    w.pack("dd", idx.pagerank.damping, idx.pagerank.tolerance)
    w.string_table(getattr(idx, "type_names", None) or [])
    w.string_table(getattr(idx, "attr_names", None) or [])

    scores = np.asarray(idx.pagerank.scores, dtype="<f8")
    w.pack("I", len(scores))
    w.raw(scores.tobytes())

    all_patterns = sorted(
        {rec.pattern for word in idx.words.values() for rec in word.records},
        key=pat.sort_key,
    )
    pattern_id = {p: i for i, p in enumerate(all_patterns)}
    w.pack("I", len(all_patterns))
    for p in all_patterns:
        w.pack("H", len(p))
        w.pack(f"{len(p)}I", *p)

    vocab = list(idx.words.keys())
    w.string_table(vocab)

    for word in vocab:
        wi = idx.words[word]
        records = wi.records
        w.pack("Q", len(records))
        positions = {id(rec): i for i, rec in enumerate(records)}
        for rec in records:
            n = len(rec.nodes)
            w.pack("IIBBBB", pattern_id[rec.pattern], rec.root, n, int(rec.edge_match), rec.locus, 0)
            w.pack(f"{n}I", *rec.nodes)
            if n > 1:
                w.pack(f"{n - 1}I", *rec.attrs)
            w.pack("dd", rec.pr_term, rec.sim_term)

        pf_runs = []
        start = 0
        for p, roots in wi.pattern_first.items():
            for root, plist in roots.items():
                pf_runs.append((pattern_id[p], root, start, len(plist)))
                start += len(plist)
        w.pack("I", len(pf_runs))
        for pid, root, run_start, count in pf_runs:
            w.pack("IIQQ", pid, root, run_start, count)

        perm = []
        rf_runs = []
        for root, pats in wi.root_first.items():
            for p, plist in pats.items():
                rf_runs.append((root, pattern_id[p], len(perm), len(plist)))
                perm.extend(positions[id(rec)] for rec in plist)
        w.raw(np.asarray(perm, dtype="<u8").tobytes())
        w.pack("I", len(rf_runs))
        for root, pid, run_start, count in rf_runs:
            w.pack("IIQQ", root, pid, run_start, count)

    w.pack("QQ", idx.stats.entry_count, idx.stats.cost_proxy)
    w.raw(TRAILER)
    return w.getvalue()


def deserialize(data: bytes) -> PathIndex:
    try:
        return _deserialize(data)
    except (IndexFormatError, IndexCorruptError):
        raise
    except (IndexError, KeyError, UnicodeDecodeError, OverflowError, MemoryError, ValueError) as exc:
        raise IndexCorruptError(f"corrupt index file: {exc}") from exc


def _deserialize(data: bytes) -> PathIndex:
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise IndexFormatError("not a path-index file (bad magic)")
    version, depth = r.unpack("II")
    if version != VERSION:
        raise IndexFormatError(f"unsupported index version {version}")
    n_entities, n_types, n_attrs = r.unpack("III")
    damping, tolerance = r.unpack("dd")
    type_names = r.string_table()
    attr_names = r.string_table()

    (n_scores,) = r.unpack("I")
    scores = np.frombuffer(r.take(8 * n_scores), dtype="<f8").astype(np.float64)
    pagerank = PageRankVector(scores, damping, tolerance)

    (n_patterns,) = r.unpack("I")
    all_patterns = []
    for _ in range(n_patterns):
        (n_el,) = r.unpack("H")
        all_patterns.append(tuple(r.unpack(f"{n_el}I")))

    vocab = r.string_table()
    words: dict[str, _WordIndex] = {}
    entry_count = 0
    for word in vocab:
        (n_records,) = r.unpack("Q")
        records: list[IndexedPath] = []
        for _ in range(n_records):
            pid, root, n_nodes, edge_match, locus, _pad = r.unpack("IIBBBB")
            nodes = tuple(r.unpack(f"{n_nodes}I"))
            attrs = tuple(r.unpack(f"{n_nodes - 1}I")) if n_nodes > 1 else ()
            pr_term, sim_term = r.unpack("dd")
            if pid >= len(all_patterns):
                raise IndexCorruptError(f"record references unknown pattern id {pid}")
            records.append(
                IndexedPath(
                    root=root,
                    nodes=nodes,
                    attrs=attrs,
                    edge_match=bool(edge_match),
                    locus=locus,
                    node_count=n_nodes,
                    pr_term=pr_term,
                    sim_term=sim_term,
                    pattern=all_patterns[pid],
                )
            )
        wi = _WordIndex.__new__(_WordIndex)
        wi.records = records
        wi.pattern_first = {}
        (n_pf,) = r.unpack("I")
        for _ in range(n_pf):
            pid, root, run_start, count = r.unpack("IIQQ")
            if run_start + count > n_records:
                raise IndexCorruptError("pattern-first run overruns the record array")
            if pid >= len(all_patterns):
                raise IndexCorruptError(f"run references unknown pattern id {pid}")
            wi.pattern_first.setdefault(all_patterns[pid], {})[root] = records[
                run_start : run_start + count
            ]
        perm = np.frombuffer(r.take(8 * n_records), dtype="<u8")
        if len(perm) and perm.max() >= n_records:
            raise IndexCorruptError("root-first permutation references a missing record")
        wi.root_first = {}
        (n_rf,) = r.unpack("I")
        for _ in range(n_rf):
            root, pid, run_start, count = r.unpack("IIQQ")
            if run_start + count > n_records:
                raise IndexCorruptError("root-first run overruns the permutation")
            if pid >= len(all_patterns):
                raise IndexCorruptError(f"run references unknown pattern id {pid}")
            wi.root_first.setdefault(root, {})[all_patterns[pid]] = [
                records[perm[i]] for i in range(run_start, run_start + count)
            ]
        words[word] = wi
        entry_count += n_records

    stored_entries, cost_proxy = r.unpack("QQ")
    if stored_entries != entry_count:
        raise IndexCorruptError(
            f"entry count mismatch: header says {stored_entries}, records say {entry_count}"
        )
    if r.take(4) != TRAILER:
        raise IndexCorruptError("missing trailer; file truncated?")

    stats = IndexStats(
        entry_count=entry_count,
        cost_proxy=cost_proxy,
        word_sizes={w: len(words[w].records) for w in words},
    )
    idx = PathIndex(depth, pagerank, words, stats, n_entities, n_types, n_attrs)
    idx.type_names = type_names
    idx.attr_names = attr_names
    return idx


def write_index(idx: PathIndex, path: Union[str, Path]) -> None:
    Path(path).write_bytes(serialize(idx))


def read_index(path: Union[str, Path]) -> PathIndex:
    return deserialize(Path(path).read_bytes())
