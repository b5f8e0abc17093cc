"""
Cycle-level value types: permutations, trace segments, cycle samples and
pipeline state.
"""
import enum
from dataclasses import dataclass, field

from rpss.exceptions import TraceError


@dataclass(frozen=True)
class Permutation:
    """
    Bijection on {0..N-1} stored as its image tuple.

    compose(p, q)[i] = p[q[i]]. Applying p to an array reads
    out[i] = array[p[i]], so applying p then q equals applying
    compose(p, q) and a product of applied permutations reads left to right.
    """
    mapping: tuple

    def __post_init__(self):
        mapping = tuple(int(i) for i in self.mapping)
        object.__setattr__(self, 'mapping', mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise TraceError(f"{mapping} is not a permutation of 0..{len(mapping) - 1}")

    @classmethod
    def identity(cls, size):
        return cls(tuple(range(size)))

    @classmethod
    def transposition(cls, size, i, j):
        mapping = list(range(size))
        mapping[i], mapping[j] = mapping[j], mapping[i]
        return cls(tuple(mapping))

    def __len__(self):
        return len(self.mapping)

    def __getitem__(self, index):
        return self.mapping[index]

    @property
    def size(self):
        return len(self.mapping)

    @property
    def is_identity(self):
        return all(i == v for i, v in enumerate(self.mapping))

    @classmethod
    def between(cls, before, after):
        """The permutation p with after[i] == before[p[i]]."""
        position = {value: i for i, value in enumerate(before)}
        return cls(tuple(position[value] for value in after))

    def compose(self, other):
        if other.size != self.size:
            raise TraceError(f"cannot compose sizes {self.size} and {other.size}")
        return Permutation(tuple(self.mapping[i] for i in other.mapping))

    def inverse(self):
        inv = [0] * self.size
        for i, v in enumerate(self.mapping):
            inv[v] = i
        return Permutation(tuple(inv))

    def apply(self, array):
        if len(array) != self.size:
            raise TraceError(f"array of length {len(array)} for permutation of size {self.size}")
        return [array[i] for i in self.mapping]


@dataclass(frozen=True)
class TraceSegment:
    """
    Trials between two consecutive successes of one cycle.

    disorder is the arrangement of the array when the segment began, read
    as a permutation (array[i] = disorder[i]); applied holds the trial
    permutations in order. The last one sorted the array.
    """
    disorder: Permutation
    applied: tuple


@dataclass(frozen=True)
class CycleSample:
    """
    One sorting cycle's conjugate observables.

    trial_ticks is kept only in trace mode; oversized_trials counts deltas
    above the Too-Big cutoff, which are still part of t_ticks.
    """
    n_p: int
    t_ticks: int
    successes: int
    trial_ticks: tuple | None = None
    oversized_trials: int = 0
    segments: tuple | None = field(default=None, repr=False)

    @property
    def mean_trial_ticks(self):
        return self.t_ticks / self.n_p if self.n_p else 0.0


class OutputSource(enum.Enum):
    """Observable feeding the output stream."""
    PERMUTATIONS = 'n_p'
    ELAPSED = 't'


@dataclass
class PipelineState:
    """
    Mutable state of one QPP-RNG stream.

    seed is s_k; it only evolves when reseed_enabled is set.
    """
    seed: int
    cfg: object
    cycle_index: int = 0
    source_select: OutputSource = OutputSource.PERMUTATIONS
    reseed_enabled: bool = True

    def __post_init__(self):
        self.seed &= 0xFFFFFFFFFFFFFFFF
