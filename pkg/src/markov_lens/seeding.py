"""Deterministic derivation of child seeds for experiment sub-streams.

Python's builtin hash() is salted per process, so child seeds are derived
from a keyed blake2b digest instead. The mapping is stable across runs,
platforms, and package versions; result files produced with one version
stay reproducible with later ones.
"""

import hashlib

_MASK64 = (1 << 64) - 1


def derive_seed(*parts) -> int:
    """Map an arbitrary tuple of parts (ints, strings, floats) to a 64-bit seed."""
    digest = hashlib.blake2b(digest_size=8)
    for part in parts:
        digest.update(repr(part).encode("utf-8"))
        digest.update(b"\x1f")
    return int.from_bytes(digest.digest(), "big") & _MASK64
