"""Deterministic random stream derivation.

Streams are keyed by (scenario seed, label path) through SHA-256, so they
are stable across processes and interpreter hash randomization, and adding
a stream never perturbs an existing one.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(seed: int, *labels: object) -> int:
    key = ":".join([str(seed)] + [str(part) for part in labels])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rng(seed: int, *labels: object) -> random.Random:
    return random.Random(derive_seed(seed, *labels))
