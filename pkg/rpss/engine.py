"""
The sorting engine: shuffle an N-element array with uniform random
permutations until it has come up sorted m times.

Each trial applies one fresh Fisher-Yates shuffle to the current array,
so every trial succeeds with probability exactly 1/N! whatever the array
holds, and the trial count per cycle is NB(m, 1/N!). The array is
disordered once at the start of a cycle and never re-disordered after a
success.
"""
import logging
from functools import reduce

from rpss.conf import get_setting
from rpss.exceptions import EngineGuardError, TraceError
from rpss.models import CycleSample, Permutation, TraceSegment

logger = logging.getLogger(__name__)


def shuffle(array, rng):
    """Fisher-Yates in place: i from N-1 down to 1, swap with j in [0, i]."""
    for i in range(len(array) - 1, 0, -1):
        j = rng.below(i + 1)
        array[i], array[j] = array[j], array[i]
    return array


def is_sorted(array):
    return all(array[i] < array[i + 1] for i in range(len(array) - 1))


def run_cycle(cfg, rng, timer, trace=False, record_permutations=False, trial_guard=None):
    """
    Run trials until m sorted arrangements have been seen.

    Only the shuffle and the sortedness check sit between tick_before()
    and tick_after(). With trace, the per-trial deltas are kept; with
    record_permutations, each success closes a TraceSegment holding the
    arrangement it started from and the permutations applied.
    """
    guard = get_setting('RPSS_TRIAL_GUARD') if trial_guard is None else trial_guard
    cutoff = get_setting('RPSS_TOO_BIG_TICKS')
    size = cfg.array_size
    target = cfg.success_count

    array = shuffle(list(range(size)), rng)

    n_p = 0
    t_ticks = 0
    successes = 0
    oversized = 0
    trial_ticks = [] if trace else None
    segments = [] if record_permutations else None
    segment_start = Permutation(tuple(array)) if record_permutations else None
    applied = []

    while successes < target:
        if n_p >= guard:
            logger.error(f"Trial guard tripped after {n_p} trials (N={size}, m={target})")
            raise EngineGuardError(
                f"no {target} successes after {n_p} trials; the engine rng looks broken"
            )
        before = list(array) if record_permutations else None

        start = timer.tick_before()
        shuffle(array, rng)
        success = is_sorted(array)
        end = timer.tick_after()

        delta = end - start
        if delta < 0:
            raise EngineGuardError(f"timer ran backwards by {-delta} ticks")
        n_p += 1
        t_ticks += delta
        if delta > cutoff:
            oversized += 1
        if trace:
            trial_ticks.append(delta)
        if record_permutations:
            applied.append(Permutation.between(before, array))

        if success:
            successes += 1
            if record_permutations:
                segments.append(TraceSegment(segment_start, tuple(applied)))
                segment_start = Permutation.identity(size)
                applied = []

    return CycleSample(
        n_p=n_p,
        t_ticks=t_ticks,
        successes=successes,
        trial_ticks=tuple(trial_ticks) if trace else None,
        oversized_trials=oversized,
        segments=tuple(segments) if record_permutations else None,
    )


def verify_composition(applied, disorder):
    """
    True iff the left-to-right product of the applied permutations equals
    the inverse of the starting disorder.
    """
    applied = list(applied)
    if not applied:
        raise TraceError("empty permutation trace")
    for permutation in applied:
        if permutation.size != disorder.size:
            raise TraceError(
                f"trace permutation of size {permutation.size} "
                f"against disorder of size {disorder.size}"
            )
    product = reduce(lambda left, right: left.compose(right), applied)
    return product == disorder.inverse()


def verify_segment(segment):
    return verify_composition(segment.applied, segment.disorder)


class SortingEngine:
    """
    One engine instance: a configuration bound to its rng and timer.

    Instances share no state, so independent engines can run side by side.
    """

    def __init__(self, cfg, rng, timer, trial_guard=None):
        self.cfg = cfg
        self.rng = rng
        self.timer = timer
        self.trial_guard = trial_guard
        self.cycles_run = 0

    def run_cycle(self, trace=False, record_permutations=False):
        sample = run_cycle(
            self.cfg,
            self.rng,
            self.timer,
            trace=trace,
            record_permutations=record_permutations,
            trial_guard=self.trial_guard,
        )
        self.cycles_run += 1
        return sample

    def cycles(self, count, trace=False, record_permutations=False):
        for _ in range(count):
            yield self.run_cycle(trace=trace, record_permutations=record_permutations)

    def __repr__(self):
        return (
            f"SortingEngine(N={self.cfg.array_size}, m={self.cfg.success_count}, "
            f"cycles_run={self.cycles_run})"
        )
