"""Deterministic seed derivation.

One master seed per experiment; every consumer (query randomness, channel
draws, per-trial workers) gets its own stream through a counter-style
hash expansion, so runs are reproducible bit-for-bit regardless of trial
order or worker count.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(master: int, *labels) -> int:
    """64-bit seed derived from the master seed and a label path."""
    text = "/".join(str(x) for x in (master, *labels))
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rng(master: int, *labels) -> random.Random:
    return random.Random(derive_seed(master, *labels))
