"""Pure-Python superframe queue loop: the reference semantics for the
compiled extension and the fallback when it is unavailable.

One superframe: ``r_a`` bits join node 1's queue, then each link in slot
order moves up to ``k_a`` head-of-line bits one node forward if its frame
succeeded (nothing moves on failure, so failed frames are implicitly
retried next superframe).  Cut-through processes slots in path order, so
bits forwarded in slot j are eligible for slot j+1 of the same
superframe; store-and-forward processes slots in reverse order, which
restricts every link to bits that arrived in earlier superframes.

All arithmetic is on integers; both backends return bit-identical arrays.
"""

from __future__ import annotations

import numpy as np


def run_queue_loop(success, r_a, k_a, cut_through):
    """See the package docstring; mirrors the compiled signature.

    success: uint8 array (num_superframes, n); r_a: int; k_a: int64 array
    per link.  Returns (departed_cum, queued_total, final_queues), int64.
    """
    success = np.ascontiguousarray(success, dtype=np.uint8)
    num_superframes, n = success.shape
    if len(k_a) != n:
        raise ValueError("k_a must have one entry per link")
    r_a = int(r_a)
    if r_a < 0:
        raise ValueError("r_a must be non-negative")

    caps = [int(v) for v in k_a]
    order = list(range(n)) if cut_through else list(range(n - 1, -1, -1))
    flat = success.tobytes()  # row-major; cheap indexed access

    departed = np.empty(num_superframes, dtype=np.int64)
    queued = np.empty(num_superframes, dtype=np.int64)
    q = [0] * (n + 1)

    for i in range(num_superframes):
        base = i * n
        q[0] += r_a
        for j in order:
            if flat[base + j]:
                moved = q[j]
                cap = caps[j]
                if moved > cap:
                    moved = cap
                q[j] -= moved
                q[j + 1] += moved
        departed[i] = q[n]
        queued[i] = sum(q[:n])

    return departed, queued, np.array(q[:n], dtype=np.int64)
