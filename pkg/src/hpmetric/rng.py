"""Counter-based random streams.

Every randomized routine in the package draws from a Philox stream keyed by
(seed, stream index), so independent streams can be handed to walks, restarts,
or grid cells without any shared state, and results do not depend on
execution order or thread count.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Return the Philox stream for (seed, index)."""
    return np.random.Generator(np.random.Philox(key=[seed & _MASK64, index & _MASK64]))
