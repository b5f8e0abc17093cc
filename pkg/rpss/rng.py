"""
64-bit word sources for the sorting engine.

Bounded draws use rejection sampling so every value in [0, b) is exactly
equally likely; plain modulo reduction would bias the per-trial success
probability away from 1/N!.
"""
from typing import Protocol

import numpy as np

WORD_BITS = 64
WORD_SPAN = 1 << WORD_BITS
WORD_MASK = WORD_SPAN - 1

# PCG64 words fetched per refill
BUFFER_SIZE = 4096


class EngineRng(Protocol):
    def next_word(self) -> int: ...

    def below(self, bound: int) -> int: ...

    def reseed(self, seed: int) -> None: ...


def bounded_draw(next_word, bound):
    """Uniform integer in [0, bound) from a source of uniform 64-bit words."""
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    limit = (WORD_SPAN // bound) * bound
    while True:
        word = next_word()
        if word < limit:
            return word % bound


class Pcg64Rng:
    """
    numpy PCG64 stream, deterministic from its 64-bit seed.

    reseed() restarts the stream from a fresh seed; the pipeline calls it
    once per cycle when feedback reseeding is on.
    """

    def __init__(self, seed):
        self.seed = seed & WORD_MASK
        self._bit_generator = np.random.PCG64(self.seed)
        self._buffer = []

    def reseed(self, seed):
        self.seed = seed & WORD_MASK
        self._bit_generator = np.random.PCG64(self.seed)
        self._buffer = []

    def next_word(self):
        if not self._buffer:
            words = self._bit_generator.random_raw(BUFFER_SIZE).tolist()
            words.reverse()
            self._buffer = words
        return self._buffer.pop()

    def below(self, bound):
        return bounded_draw(self.next_word, bound)

    def __repr__(self):
        return f"Pcg64Rng(seed={self.seed:#018x})"


class ScriptedRng:
    """
    Replays a fixed list of bounded draws, for tests.

    below() returns the next scripted value directly and checks it against
    the requested bound; next_word() returns it as a raw word.
    """

    def __init__(self, values):
        self._values = list(values)
        self._index = 0

    @property
    def remaining(self):
        return len(self._values) - self._index

    def _take(self):
        if self._index >= len(self._values):
            raise IndexError("scripted rng exhausted")
        value = self._values[self._index]
        self._index += 1
        return value

    def next_word(self):
        return self._take() & WORD_MASK

    def below(self, bound):
        value = self._take()
        if not 0 <= value < bound:
            raise ValueError(f"scripted value {value} outside [0, {bound})")
        return value

    def reseed(self, seed):
        pass
