"""
Timer sources bracketing each permutation trial.

A timer exposes tick_before()/tick_after(); the engine takes the
difference as the trial's runtime X_j in raw ticks.
"""
import time
from typing import Protocol

from rpss.jitter import JitterSampler
from rpss.rng import Pcg64Rng


class TimerSource(Protocol):
    def tick_before(self) -> int: ...

    def tick_after(self) -> int: ...


class PerfCounterTimer:
    """Highest-resolution monotonic counter; one tick is one nanosecond count."""

    def tick_before(self):
        return time.perf_counter_ns()

    def tick_after(self):
        return time.perf_counter_ns()


class SimulatedTimer:
    """
    Virtual clock advanced by jitter samples.

    Every tick_after() moves the clock forward by one draw from the jitter
    model, so the stream of deltas is a deterministic function of the seed
    and the draw index.
    """

    def __init__(self, model, seed):
        self.seed = seed
        self._rng = Pcg64Rng(seed)
        self._sampler = JitterSampler(model)
        self._clock = 0

    @property
    def model(self):
        return self._sampler.model

    def set_model(self, model):
        self._sampler = JitterSampler(model)

    def tick_before(self):
        return self._clock

    def tick_after(self):
        self._clock += self._sampler.sample(self._rng)
        return self._clock


class ConstantTimer:
    """Every trial takes exactly `ticks` ticks."""

    def __init__(self, ticks=1):
        self.ticks = ticks
        self._clock = 0

    def tick_before(self):
        return self._clock

    def tick_after(self):
        self._clock += self.ticks
        return self._clock
