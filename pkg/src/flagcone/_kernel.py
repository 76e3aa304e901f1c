"""Selection of the double-description adjacency kernel.

The compiled Cython kernel is used when the extension built; otherwise the
pure-Python implementation takes over with identical results.  Set the
environment variable FLAGCONE_KERNEL=pure to force the fallback (used by the
benchmark and the parity tests).  FLAGCONE_THREADS > 1 chunks the positive
index range across threads; the compiled kernel releases the GIL, so the
chunks genuinely run in parallel, and the chunk merge order is fixed so the
result does not depend on scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from . import _ddpure

try:
    from . import _ddcore
except ImportError:  # extension not built
    _ddcore = None

if os.environ.get("FLAGCONE_KERNEL") == "pure":
    _ddcore = None

HAVE_COMPILED = _ddcore is not None


def _pack_masks(masks: list[int], nbits: int):
    import numpy as np

    nwords = max(1, (nbits + 63) // 64)
    arr = np.zeros((len(masks), nwords), dtype=np.uint64)
    mask64 = (1 << 64) - 1
    for r, m in enumerate(masks):
        for w in range(nwords):
            arr[r, w] = (m >> (64 * w)) & mask64
    return arr


def _compiled_pairs(
    masks: list[int], pos: list[int], neg: list[int], need: int, nbits: int, workers: int
) -> list[tuple[int, int]]:
    import numpy as np

    packed = _pack_masks(masks, nbits)
    neg_arr = np.asarray(neg, dtype=np.int32)

    def run(chunk: list[int]):
        if not chunk or len(neg) == 0:
            return []
        pos_arr = np.asarray(chunk, dtype=np.int32)
        cap = len(chunk) * len(neg)
        out_i = np.empty(cap, dtype=np.int32)
        out_j = np.empty(cap, dtype=np.int32)
        cnt = _ddcore.adjacency_pairs_packed(packed, pos_arr, neg_arr, need, out_i, out_j)
        return list(zip(out_i[:cnt].tolist(), out_j[:cnt].tolist()))

    if workers <= 1 or len(pos) < 2 * workers:
        return run(pos)
    chunks = [pos[k::workers] for k in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(run, chunks))
    # merge in a scheduling-independent order: sort by (pos index, neg index)
    pos_rank = {i: r for r, i in enumerate(pos)}
    neg_rank = {j: r for r, j in enumerate(neg)}
    merged = [p for part in parts for p in part]
    merged.sort(key=lambda ij: (pos_rank[ij[0]], neg_rank[ij[1]]))
    return merged


def adjacency_pairs(
    masks: list[int],
    pos: list[int],
    neg: list[int],
    need: int,
    nbits: int,
    workers: int = 1,
) -> list[tuple[int, int]]:
    """Dispatch to the compiled kernel when available, else the pure one."""
    if _ddcore is not None and (nbits + 63) // 64 <= _ddcore.MAX_WORDS:
        return _compiled_pairs(masks, pos, neg, need, nbits, workers)
    return _ddpure.adjacency_pairs(masks, pos, neg, need, nbits, workers)


def default_workers() -> int:
    """Worker count from FLAGCONE_THREADS, defaulting to 1."""
    raw = os.environ.get("FLAGCONE_THREADS", "1")
    try:
        w = int(raw)
    except ValueError:
        return 1
    return max(1, w)
