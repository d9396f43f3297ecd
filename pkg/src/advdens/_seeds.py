"""Seed derivation for reproducible, order-independent parallel streams.

Every random stream in the library is a counter-based Philox generator keyed
by a ``SeedSequence`` built from (base_seed, *tags).  Tags may be ints or
strings; strings are hashed with SHA-256 so derivation does not depend on
``PYTHONHASHSEED``.  Two streams with different tag tuples are independent,
so replicate r of experiment e can run on any worker in any order and still
reproduce bit-identical draws.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _as_entropy(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & ((1 << 64) - 1)
    if isinstance(part, str):
        digest = hashlib.sha256(part.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little")
    raise TypeError(f"seed tag must be int or str, got {type(part).__name__}")


def seed_sequence(*parts) -> np.random.SeedSequence:
    if not parts:
        raise ValueError("at least one seed part required")
    return np.random.SeedSequence([_as_entropy(p) for p in parts])


def make_rng(*parts) -> np.random.Generator:
    """Philox generator keyed by (base_seed, *tags)."""
    return np.random.Generator(np.random.Philox(seed_sequence(*parts)))


def derive_seed(*parts) -> int:
    """Collapse (base_seed, *tags) to a single 63-bit int seed."""
    state = seed_sequence(*parts).generate_state(2, np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])
