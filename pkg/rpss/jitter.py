"""
Synthetic per-permutation runtime laws.

The presets reproduce the morphology of measured runtimes: a sharp
concentration at one or two ticks, a sparse mid-range and rare heavy-tail
spikes. Every measured frequency row is also shipped verbatim as a
`measured-n<N>-<letter>` preset.
"""
import bisect
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rpss.conf import get_setting
from rpss.exceptions import JitterModelError
from rpss.models import JitterModel, as_tick

logger = logging.getLogger(__name__)

# Resolution of one uniform draw in [0, 1)
UNIT_DRAW_BITS = 53
UNIT_DRAW_SPAN = 1 << UNIT_DRAW_BITS


@dataclass(frozen=True)
class NamedJitterPreset:
    name: str
    model: JitterModel
    provenance: str


# =============================================================================
# CONSTRUCTION
# =============================================================================

def from_table_counts(ticks_counts):
    """
    Normalize (tick, count) pairs, or a {tick: count} mapping, into a model.

    Ticks with zero count are dropped from the support.
    """
    items = ticks_counts.items() if isinstance(ticks_counts, dict) else ticks_counts
    merged = {}
    for tick, count in items:
        if count < 0:
            raise JitterModelError(f"negative count {count} at tick {tick}")
        tick = as_tick(tick)
        merged[tick] = merged.get(tick, 0) + count
    total = sum(merged.values())
    if total <= 0:
        raise JitterModelError("all counts are zero")
    support = sorted((t, c) for t, c in merged.items() if c > 0)
    return JitterModel(
        tuple(t for t, _ in support),
        tuple(c / total for _, c in support),
    )


def parse_frequency_row(text):
    """'0,853,137,5' -> [(0, 0), (1, 853), (2, 137), (3, 5)]"""
    fields = [f.strip() for f in text.split(',') if f.strip()]
    try:
        return [(tick, int(count)) for tick, count in enumerate(fields)]
    except ValueError as exc:
        raise JitterModelError(f"bad frequency row {text!r}") from exc


def mean_shifted(model, delta):
    """Same shape, every tick moved by delta."""
    ticks = tuple(t + delta for t in model.ticks)
    if min(ticks) < 0:
        raise JitterModelError(f"shift {delta} moves ticks below zero")
    return JitterModel(ticks, model.probs)


def load_jitter_file(path):
    """
    Read a jitter law from JSON.

    Accepted shapes: {"ticks": [...], "probs": [...]} or
    {"ticks": [...], "counts": [...]}; counts are normalized.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except (OSError, UnicodeDecodeError) as exc:
        raise JitterModelError(f"cannot read jitter file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise JitterModelError(f"jitter file {path} is not valid JSON: {exc}") from exc

    if not isinstance(data, dict) or 'ticks' not in data:
        raise JitterModelError(f"jitter file {path} needs a 'ticks' list")
    ticks = data['ticks']
    if 'probs' in data:
        if len(ticks) != len(data['probs']):
            raise JitterModelError(f"jitter file {path}: ticks and probs differ in length")
        model = JitterModel(tuple(ticks), tuple(data['probs']))
    elif 'counts' in data:
        if len(ticks) != len(data['counts']):
            raise JitterModelError(f"jitter file {path}: ticks and counts differ in length")
        model = from_table_counts(list(zip(ticks, data['counts'])))
    else:
        raise JitterModelError(f"jitter file {path} needs 'probs' or 'counts'")

    logger.info(f"Loaded jitter law from {path}: {len(model.ticks)} ticks, mean {model.mean:.4f}")
    return model


# =============================================================================
# SAMPLING
# =============================================================================

class JitterSampler:
    """
    Inverse-CDF sampler over a model's positive-probability support.

    One bounded draw u in [0, 2^53) per sample; the tick is the first whose
    cumulative probability exceeds u / 2^53.
    """

    def __init__(self, model):
        self.model = model
        support = [(t, p) for t, p in zip(model.ticks, model.probs) if p > 0.0]
        self._ticks = [t for t, _ in support]
        cumulative = np.cumsum([p for _, p in support]).tolist()
        cumulative[-1] = 1.0
        self._cumulative = cumulative

    def sample(self, rng):
        if len(self._ticks) == 1:
            return self._ticks[0]
        u = rng.below(UNIT_DRAW_SPAN) / UNIT_DRAW_SPAN
        return self._ticks[bisect.bisect_right(self._cumulative, u)]


def sample(model, rng):
    """Draw one runtime from model using rng."""
    return JitterSampler(model).sample(rng)


def tick_histogram(trial_ticks, cutoff=None):
    """
    Per-trial runtimes in measured-table layout.

    Returns (counts for ticks 0..max kept tick, number of deltas above the
    Too-Big cutoff that were left out).
    """
    cutoff = get_setting('RPSS_TOO_BIG_TICKS') if cutoff is None else cutoff
    values = np.asarray(trial_ticks, dtype=np.int64)
    kept = values[values <= cutoff]
    excluded = int(values.size - kept.size)
    counts = np.bincount(kept).tolist() if kept.size else []
    return counts, excluded


# =============================================================================
# PRESETS
# =============================================================================

MEASURED_ROWS = [
    # (N, samples x1000, mu_X, sigma_X, frequencies from tick 0)
    (7, 998, 1.566, 0.585, '0,453,538,2,2,0,1,2'),
    (7, 1000, 1.529, 0.584, '0,490,502,4,2,0,0,1,1'),
    (7, 994, 2.165, 1.05, '0,156,583,241,6,1,1,1,1,0,1,0,1,0,0,0,0,1,1'),
    (7, 996, 3.147, 0.676, '0,0,11,873,91,12,2,2,3,1,0,1'),
    (6, 999, 1.359, 0.618, '0,675,311,3,4,1,4,1'),
    (6, 994, 1.485, 0.771, '0,564,410,11,4,1,1,0,1,0,0,1,0,1'),
    (6, 993, 1.871, 0.876, '0,307,607,23,17,36,2,1'),
    (6, 999, 1.472, 0.619, '0,559,426,8,4,0,0,1,0,0,0,0,0,1'),
    (6, 991, 9.98, 13.6, '0,0,0,0,0,0,0,0,504,427,8,21,17,4,3,4,2,1,0,1'),
    (5, 997, 1.154, 0.398, '0,853,137,5,1,1'),
    (5, 993, 1.632, 0.833, '0,506,385,86,6,4,2,3,0,0,1'),
    (5, 996, 1.174, 0.496, '0,491,479,15,4,1,4,2'),
    (5, 997, 1.148, 0.387, '0,854,136,2,4,0,1'),
    (5, 999, 1.489, 0.598, '0,249,718,25,3,3,0,1'),
    (4, 999, 0.973, 0.258, '42,946,8,2,1'),
    (4, 998, 1.022, 0.522, '34,935,18,6,3,0,1,0,0,0,0,0,0,1'),
    (4, 998, 1.346, 0.781, '0,747,187,56,2,2,3,0,1'),
    (4, 998, 1.345, 0.772, '18,772,191,8,4,1,1,2,1'),
]


def _build_presets():
    presets = {}

    def add(name, model, provenance):
        presets[name] = NamedJitterPreset(name, model, provenance)

    add(
        'fat-like',
        JitterModel.from_mapping({0: 0.05, 1: 0.80, 2: 0.15}),
        "narrow law around 1 tick, mean 1.10; T stays close to NB shape",
    )
    add(
        'skinny-like',
        JitterModel.from_mapping({0: 0.20, 1: 0.72, 2: 0.0785, 40: 0.0015}),
        "mass at 0-1 ticks with a rare 40-tick spike; heavier T tail",
    )
    add(
        'ultra-skinny-like',
        JitterModel.from_mapping({0: 0.50, 1: 0.48, 2: 0.0195, 200: 0.0005}),
        "half the trials at 0 ticks with a rare 200-tick spike; strongly leptokurtic T",
    )
    add('unit', JitterModel.degenerate(1), "X == 1, so T == N_p")
    add('two-point', JitterModel.from_mapping({1: 0.6, 2: 0.4}), "X in {1, 2}")
    add(
        'heavy-tail',
        JitterModel.from_mapping({1: 0.5, 2: 0.3, 3: 0.15, 17: 0.0499, 500: 0.0001}),
        "five-point law with a 1e-4 chance of a 500-tick event",
    )
    add(
        'loaded',
        JitterModel.from_mapping({6: 0.40, 7: 0.002, 8: 0.50, 10: 0.098}),
        "busy host on a 2-tick timer: mean 7.39, odd ticks rare; biases t mod 2",
    )

    seen = {}
    for array_size, samples, mu, sigma, row in MEASURED_ROWS:
        letter = chr(ord('a') + seen.get(array_size, 0))
        seen[array_size] = seen.get(array_size, 0) + 1
        add(
            f'measured-n{array_size}-{letter}',
            from_table_counts(parse_frequency_row(row)),
            f"measured N={array_size}, {samples}k samples, mu_X={mu}, sigma_X={sigma}",
        )
    return presets


PRESETS = _build_presets()


def get_preset(name):
    try:
        return PRESETS[name].model
    except KeyError:
        raise JitterModelError(
            f"unknown jitter preset {name!r}; choose from {', '.join(sorted(PRESETS))}"
        ) from None


def preset_names():
    return sorted(PRESETS)


def describe(model):
    """One-line summary used in command output."""
    return (
        f"{len(model.ticks)} ticks, mean {model.mean:.4f}, "
        f"std {math.sqrt(max(model.variance, 0.0)):.4f}"
    )
