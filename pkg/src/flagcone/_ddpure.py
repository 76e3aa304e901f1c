"""Pure-Python adjacency kernel for the double description method.

Given the active-row bitmasks of the current extreme rays, find the pairs
(positive ray, negative ray) whose common active set has at least `need`
rows and is not dominated by the active set of any third ray.  Such pairs
are the adjacency candidates that spawn new rays when a cutting row is
inserted.  Masks are arbitrary-size Python ints, one bit per inserted row.
"""

from __future__ import annotations


def adjacency_pairs(
    masks: list[int],
    pos: list[int],
    neg: list[int],
    need: int,
    nbits: int,
    workers: int = 1,
) -> list[tuple[int, int]]:
    """All (i, j) with i in pos, j in neg passing the combinatorial test.

    `workers` is accepted for interface parity with the compiled kernel and
    ignored: chunking pure-Python work across threads buys nothing under the
    interpreter lock.
    """
    del nbits, workers
    out: list[tuple[int, int]] = []
    for i in pos:
        zi = masks[i]
        for j in neg:
            z = zi & masks[j]
            if z.bit_count() < need:
                continue
            dominated = False
            for t, zt in enumerate(masks):
                if z & ~zt == 0 and t != i and t != j:
                    dominated = True
                    break
            if not dominated:
                out.append((i, j))
    return out
