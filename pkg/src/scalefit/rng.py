"""Deterministic counter-based random substreams.

Each (seed, stream) pair keys an independent Philox generator, so stream i
can be opened directly without generating streams 0..i-1 first.  Consumers
that assign one stream per unit of work (bootstrap replicate, synthetic
scale, Monte Carlo trial) therefore produce identical draws whether the
units run serially, in parallel, or out of order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def substream(seed: int, stream: int) -> np.random.Generator:
    """Return the generator for substream ``stream`` of ``seed``.

    The 128-bit Philox key is the concatenation of the two 64-bit values,
    so distinct (seed, stream) pairs never share a stream.
    """
    key = ((seed & _MASK64) << 64) | (stream & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))
