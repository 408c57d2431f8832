"""Order-independent per-trial seeds for reproducible Monte-Carlo runs."""
from __future__ import annotations
import hashlib

import numpy as np


def trial_key(n: int, m: int, c: float, trial: int) -> int:
    """Stable 64-bit key of a grid cell and trial index."""
    digest = hashlib.sha256(f"{n}:{m}:{float(c)!r}:{trial}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def trial_seed(base_seed: int, n: int, m: int, c: float, trial: int) -> int:
    """
    Seed for one trial, derived from the base seed and the trial key only,
    so it does not depend on scheduling or on which other trials run.
    """
    sequence = np.random.SeedSequence([base_seed, trial_key(n, m, c, trial)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
