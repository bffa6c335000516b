import hashlib
import random

MASK64 = (1 << 64) - 1


def substream(seed: int, label: str) -> random.Random:
    """Independent generator for one named purpose, derived from a 64-bit run seed."""
    digest = hashlib.sha256(f"{seed & MASK64}/{label}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def subseed(seed: int, label: str) -> int:
    return substream(seed, label).getrandbits(64)
