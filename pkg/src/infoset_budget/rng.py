"""Counter-based random streams.

Every stochastic step asks for a stream keyed by the user seed plus a
tuple of integers naming the work item (hole index, trial block, ...).  The
stream is a Philox generator whose key is derived from that tuple, so the
numbers a work item sees do not depend on which worker runs it or in what
order.
"""

from __future__ import annotations

import zlib

import numpy as np

# fixed work-block size; results depend on it, worker count does not
BLOCK = 4096


def tag(name: str) -> int:
    """Stable integer for a string label (used as a stream key component)."""
    return zlib.crc32(name.encode())


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(key=ss.generate_state(2, np.uint64)))


def blocks(total: int, size: int = BLOCK):
    """Yield (block_index, start, stop) covering range(total)."""
    for b, start in enumerate(range(0, total, size)):
        yield b, start, min(start + size, total)
