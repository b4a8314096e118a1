"""Small shared helpers."""

from __future__ import annotations

import hashlib


def derive_seed(*parts) -> int:
    """Stable 63-bit integer seed from a tuple of printable parts."""
    text = "/".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def uniform_index(key: str, size: int) -> int:
    """Deterministic uniform pick in range(size) from a string key.

    256 hash bits against sizes of a few dozen make the modulo bias far
    below anything observable.
    """
    digest = hashlib.sha256(key.encode()).digest()
    return int.from_bytes(digest, "big") % size
