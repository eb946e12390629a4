"""Deterministic per-page random streams."""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def page_stream(master_seed: int, page_index: int) -> np.random.Generator:
    """Independent, reproducible stream for one page.

    The stream is keyed on (master_seed, page_index) through a
    counter-based generator, so page i draws the same values no matter
    how many pages surround it: a run of N pages is a prefix of a run
    of M > N pages under the same seed.
    """
    key = np.array([master_seed & _MASK64, page_index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
