"""Deterministic 64-bit seed derivation.

Every random draw in the simulator is keyed by a seed produced here so that
results depend only on the master seed and the coordinates of the draw,
never on execution order or worker count.

The mix is pinned: ``splitmix64`` is the finalizer of Steele, Lea and Flood's
SplittableRandom, and ``mix_seed`` folds its arguments left to right starting
from zero as ``h = splitmix64(h ^ part)``.
"""

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 step on a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(*parts: int) -> int:
    """Combine integers into a single 64-bit seed."""
    h = 0
    for part in parts:
        h = splitmix64(h ^ (int(part) & MASK64))
    return h
