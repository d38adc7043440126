# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled superframe queue loop (the simulation hot path).

Semantics are defined by the reference implementation in
``_simloop_py.py``; both produce bit-identical outputs.
"""

import numpy as np


def run_queue_loop(const unsigned char[:, ::1] success, long long r_a,
                   const long long[::1] k_a, bint cut_through):
    """Advance the per-node bit queues through every superframe.

    ``success[i, j]`` is the frame-success indicator of link j in
    superframe i.  Returns (cumulative bits departed after each
    superframe, total bits queued after each superframe, final per-node
    queue levels), all int64.
    """
    cdef Py_ssize_t num_superframes = success.shape[0]
    cdef Py_ssize_t n = success.shape[1]
    if k_a.shape[0] != n:
        raise ValueError("k_a must have one entry per link")
    if r_a < 0:
        raise ValueError("r_a must be non-negative")

    departed = np.empty(num_superframes, dtype=np.int64)
    queued = np.empty(num_superframes, dtype=np.int64)
    q_arr = np.zeros(n + 1, dtype=np.int64)

    cdef long long[::1] dep = departed
    cdef long long[::1] que = queued
    cdef long long[::1] q = q_arr
    cdef Py_ssize_t i, j
    cdef long long moved, total

    for i in range(num_superframes):
        q[0] += r_a
        if cut_through:
            for j in range(n):
                if success[i, j]:
                    moved = k_a[j] if k_a[j] < q[j] else q[j]
                    q[j] -= moved
                    q[j + 1] += moved
        else:
            for j in range(n - 1, -1, -1):
                if success[i, j]:
                    moved = k_a[j] if k_a[j] < q[j] else q[j]
                    q[j] -= moved
                    q[j + 1] += moved
        dep[i] = q[n]
        total = 0
        for j in range(n):
            total += q[j]
        que[i] = total

    return departed, queued, q_arr[:n].copy()
