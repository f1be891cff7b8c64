# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled tuple-join kernel; contract documented in kgpattern.kernels.

Mirrors join_tree_tuples_py exactly: same input blocks, same lexicographic
output order, same rejection rule (a node receiving two different
(parent, attr) assignments).
"""
from libc.stdlib cimport free, malloc


cdef struct Slot:
    int child
    int parent
    int attr


def join_tree_tuples(list blocks):
    cdef Py_ssize_t m = len(blocks)
    cdef Py_ssize_t i, j, t
    cdef int lvl
    cdef Py_ssize_t n_total_triples = 0, n_offset_rows = 0
    cdef object block  # (child, parent, attr, offsets); any indexable sequence
    cdef object child_l, parent_l, attr_l, off_l

    cdef int *counts = <int *> malloc(m * sizeof(int))
    cdef int *off_start = <int *> malloc(m * sizeof(int))
    if counts == NULL or off_start == NULL:
        free(counts); free(off_start)
        raise MemoryError()

    # First pass: sizes. Bail out early when some keyword has no paths.
    for i in range(m):
        block = blocks[i]
        off_l = block[3]
        counts[i] = <int> (len(off_l) - 1)
        if counts[i] <= 0:
            free(counts); free(off_start)
            return []
        child_l = block[0]
        n_total_triples += len(child_l)
        off_start[i] = <int> n_offset_rows
        n_offset_rows += len(off_l)

    cdef int *child = <int *> malloc((n_total_triples + 1) * sizeof(int))
    cdef int *parent = <int *> malloc((n_total_triples + 1) * sizeof(int))
    cdef int *attr = <int *> malloc((n_total_triples + 1) * sizeof(int))
    cdef int *offsets = <int *> malloc(n_offset_rows * sizeof(int))
    cdef int *chosen = <int *> malloc(m * sizeof(int))
    cdef int *added_at = <int *> malloc(m * sizeof(int))
    cdef Slot *slots = <Slot *> malloc((n_total_triples + 1) * sizeof(Slot))
    if (child == NULL or parent == NULL or attr == NULL or offsets == NULL
            or chosen == NULL or added_at == NULL or slots == NULL):
        free(counts); free(off_start); free(child); free(parent)
        free(attr); free(offsets); free(chosen); free(added_at); free(slots)
        raise MemoryError()

    cdef int tpos = 0, opos = 0, base
    for i in range(m):
        block = blocks[i]
        child_l = block[0]
        parent_l = block[1]
        attr_l = block[2]
        off_l = block[3]
        base = tpos
        for t in range(len(child_l)):
            child[tpos] = <int> child_l[t]
            parent[tpos] = <int> parent_l[t]
            attr[tpos] = <int> attr_l[t]
            tpos += 1
        for j in range(len(off_l)):
            offsets[opos] = base + <int> off_l[j]
            opos += 1

    cdef list out = []
    cdef int n_slots = 0, ok, c, pnode, a, found
    cdef int s, start, stop, row

    # Depth-first walk over the product; added_at[lvl] is the slot watermark
    # before level lvl tried its current path, giving O(1) undo.
    lvl = 0
    chosen[0] = -1
    added_at[0] = 0
    while lvl >= 0:
        chosen[lvl] += 1
        n_slots = added_at[lvl]  # drop triples added by this level's previous choice
        if chosen[lvl] >= counts[lvl]:
            lvl -= 1
            continue
        row = off_start[lvl] + chosen[lvl]
        start = offsets[row]
        stop = offsets[row + 1]
        ok = 1
        for t in range(start, stop):
            c = child[t]
            pnode = parent[t]
            a = attr[t]
            found = 0
            for s in range(n_slots):
                if slots[s].child == c:
                    found = 1
                    if slots[s].parent != pnode or slots[s].attr != a:
                        ok = 0
                    break
            if not ok:
                break
            if not found:
                slots[n_slots].child = c
                slots[n_slots].parent = pnode
                slots[n_slots].attr = a
                n_slots += 1
        if not ok:
            continue
        if lvl == m - 1:
            out.append(tuple([chosen[i] for i in range(m)]))
            continue
        lvl += 1
        chosen[lvl] = -1
        added_at[lvl] = n_slots

    free(counts); free(off_start); free(child); free(parent)
    free(attr); free(offsets); free(chosen); free(added_at); free(slots)
    return out
