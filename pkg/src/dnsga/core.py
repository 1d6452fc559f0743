"""Search-space primitives, domination, seeding and evaluation accounting."""

from __future__ import annotations

import enum
from collections.abc import Sequence

import numpy as np

# Bitstrings are 1-D uint8 arrays of 0/1 values; populations stack them row-wise.
Bitstring = np.ndarray
ObjectivePair = tuple

_MASK64 = (1 << 64) - 1


class Dominance(enum.Enum):
    FIRST_STRICT = "first_strict"
    SECOND_STRICT = "second_strict"
    EQUAL = "equal"
    # u >= v and v >= u without u == v cannot happen for real pairs.
    WEAK_EQUIV_NA = "weak_equiv_na"
    INCOMPARABLE = "incomparable"


def ones_count(x: Sequence[int] | np.ndarray) -> int:
    """Number of set bits in ``x``."""
    return int(np.count_nonzero(np.asarray(x)))


def complement(x: Sequence[int] | np.ndarray) -> np.ndarray:
    return 1 - np.asarray(x, dtype=np.uint8)


def weakly_dominates(u: Sequence[float], v: Sequence[float]) -> bool:
    return u[0] >= v[0] and u[1] >= v[1]


def strictly_dominates(u: Sequence[float], v: Sequence[float]) -> bool:
    return weakly_dominates(u, v) and (u[0] != v[0] or u[1] != v[1])


def compare(u: Sequence[float], v: Sequence[float]) -> Dominance:
    """Compare two objective pairs under maximization.

    Returns which of the two weakly dominates the other, ``EQUAL`` for
    identical pairs, and ``INCOMPARABLE`` when neither weakly dominates.
    """
    uv = weakly_dominates(u, v)
    vu = weakly_dominates(v, u)
    if uv and vu:
        if u[0] == v[0] and u[1] == v[1]:
            return Dominance.EQUAL
        return Dominance.WEAK_EQUIV_NA
    if uv:
        return Dominance.FIRST_STRICT
    if vu:
        return Dominance.SECOND_STRICT
    return Dominance.INCOMPARABLE


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 output function."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Child seed for replicate or instance ``index`` of a ``master`` seed.

    The mix is ``splitmix64(master XOR splitmix64(index))`` on 64-bit words, so a
    child seed depends only on the pair and never on execution order.
    """
    return splitmix64((master & _MASK64) ^ splitmix64(index & _MASK64))


class RngStream:
    """Seeded random stream backed by numpy's PCG64 generator.

    Single-owner state: hand a stream to exactly one run.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    def random(self, size=None):
        return self.generator.random(size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size=size)

    def bits(self, shape) -> np.ndarray:
        """Uniformly random 0/1 array of the given shape."""
        return self.generator.integers(0, 2, size=shape, dtype=np.uint8)

    def child(self, index: int) -> RngStream:
        return RngStream(derive_seed(self.seed, index))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed})"


class EvaluationCounter:
    """Monotone count of objective-function evaluations."""

    __slots__ = ("total",)

    def __init__(self, total: int = 0):
        if total < 0:
            raise ValueError("evaluation count cannot be negative")
        self.total = total

    def increment(self, k: int = 1) -> int:
        if k < 0:
            raise ValueError("evaluation counter never decrements")
        self.total += k
        return self.total

    def __int__(self) -> int:
        return self.total

    def __repr__(self) -> str:
        return f"EvaluationCounter({self.total})"
