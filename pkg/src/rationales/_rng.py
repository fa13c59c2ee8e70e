"""Deterministic seed-substream derivation.

Per-entity and per-cluster randomness is derived from the single run seed
by hashing string labels, so entities can be processed in any order (or in
parallel) without coupling their random streams.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(seed: int, *labels: str) -> int:
    """Derive a stable 64-bit sub-seed from a base seed and string labels."""
    h = hashlib.sha256(str(int(seed)).encode("ascii"))
    for label in labels:
        h.update(b"\x1f")
        h.update(label.encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big")


def derive_rng(seed: int, *labels: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *labels))
