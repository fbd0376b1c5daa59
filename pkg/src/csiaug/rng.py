"""Deterministic 64-bit random streams.

Every random decision in this package (augmentation gates and parameters,
dataset splits, batch sampling, weight initialization) is drawn from a
:class:`Stream`, a counter-based SplitMix64 generator.  The full algorithm
is written out below so that any independent implementation can reproduce
the streams bit-exactly:

* ``mix64(z)`` is the SplitMix64 finalizer, all arithmetic mod 2**64::

      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
      z = (z ^ (z >> 27)) * 0x94D049BB133111EB
      z = z ^ (z >> 31)

* A stream with key ``k`` starts at ``state = k`` and produces the i-th raw
  word as ``mix64(k + i * GAMMA)`` where ``GAMMA = 0x9E3779B97F4A7C15``.

* ``derive_key(w0, w1, ...)`` folds integer words into a stream key
  (order-sensitive)::

      h = 0
      for w in words:
          h = mix64(h + GAMMA + (w mod 2**64))

  Negative words are reduced mod 2**64 (two's-complement fold).

* ``uniform(lo, hi)`` maps the top 53 bits of a raw word to ``[0, 1)`` via
  ``(word >> 11) * 2**-53`` and rescales as ``lo + u * (hi - lo)``.

* ``randint(lo, hi)`` (inclusive bounds) uses unbiased bounded rejection:
  with ``span = hi - lo + 1``, raw words ``>= 2**64 - (2**64 % span)`` are
  discarded and the first accepted word yields ``lo + word % span``.

* ``normal()`` is the Box-Muller transform without caching: each value
  consumes exactly two uniforms ``u1, u2`` and returns
  ``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``.

* ``shuffle`` is a Fisher-Yates pass from the last element down, swapping
  position ``i`` with ``randint(0, i)``.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15

_MIX_MUL1 = 0xBF58476D1CE4E5B9
_MIX_MUL2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a 64-bit bijective avalanche function."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_MUL1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_MUL2) & _MASK64
    return z ^ (z >> 31)


def derive_key(*words: int) -> int:
    """Fold integer words into a 64-bit stream key.

    Order-sensitive: ``derive_key(a, b) != derive_key(b, a)`` in general.
    Used to give (seed, epoch, sample index) and (seed, role, run index)
    tuples their own independent streams.
    """
    h = 0
    for w in words:
        h = mix64((h + GAMMA + (w & _MASK64)) & _MASK64)
    return h


class Stream:
    """Counter-based SplitMix64 stream over a 64-bit key."""

    __slots__ = ("_state",)

    def __init__(self, key: int):
        self._state = key & _MASK64

    def next_u64(self) -> int:
        """Next raw 64-bit word."""
        self._state = (self._state + GAMMA) & _MASK64
        return mix64(self._state)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Real uniform on ``[lo, hi)`` with 53-bit resolution."""
        u = (self.next_u64() >> 11) * (2.0 ** -53)
        return lo + u * (hi - lo)

    def randint(self, lo: int, hi: int) -> int:
        """Integer uniform on the inclusive range ``{lo, ..., hi}``.

        Unbiased via bounded rejection; consumes a variable number of raw
        words (one, except with probability ``(2**64 % span) / 2**64``).
        """
        if hi < lo:
            raise ValueError(f"empty integer range [{lo}, {hi}]")
        span = hi - lo + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            u = self.next_u64()
            if u < limit:
                return lo + (u % span)

    def coin(self) -> bool:
        """Fair coin; consumes one uniform (True with probability 1/2)."""
        return self.uniform() < 0.5

    def normal(self) -> float:
        """Standard normal via Box-Muller; consumes exactly two uniforms."""
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)

    def normals(self, n: int) -> list[float]:
        """``n`` independent standard normals."""
        return [self.normal() for _ in range(n)]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]
