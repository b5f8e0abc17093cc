"""
Statistical measurement of symbol streams.

Entropies are plug-in estimates from empirical frequencies (no bias
correction); H_min is the plug-in min-entropy, not an SP 800-90B
estimator. Chi-square p-values come from the regularized upper
incomplete gamma function implemented below.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from rpss.conf import get_setting
from rpss.exceptions import DomainError, EmptyStreamError
from rpss.models import MomentSet

logger = logging.getLogger(__name__)

GAMMA_EPS = 1e-15
GAMMA_MAX_ITERATIONS = 100_000
GAMMA_TINY = 1e-300

DEFAULT_TOLERANCES = {
    'mean': 0.001,
    'variance': 0.01,
    'skewness': 0.02,
    'excess_kurtosis': 0.05,
}


# =============================================================================
# INCOMPLETE GAMMA
# =============================================================================

def _gamma_prefactor(a, x):
    return math.exp(-x + a * math.log(x) - math.lgamma(a))


def _lower_series(a, x):
    """P(a, x) by its power series; converges fast for x < a + 1."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(GAMMA_MAX_ITERATIONS):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * GAMMA_EPS:
            return total * _gamma_prefactor(a, x)
    raise ArithmeticError(f"incomplete gamma series did not converge for a={a}, x={x}")


def _upper_continued_fraction(a, x):
    """Q(a, x) by modified Lentz; converges fast for x >= a + 1."""
    b = x + 1.0 - a
    c = 1.0 / GAMMA_TINY
    d = 1.0 / b
    h = d
    for i in range(1, GAMMA_MAX_ITERATIONS):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < GAMMA_TINY:
            d = GAMMA_TINY
        c = b + an / c
        if abs(c) < GAMMA_TINY:
            c = GAMMA_TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < GAMMA_EPS:
            return h * _gamma_prefactor(a, x)
    raise ArithmeticError(f"incomplete gamma fraction did not converge for a={a}, x={x}")


def regularized_gamma_q(a, x):
    """Q(a, x) = Gamma(a, x) / Gamma(a)."""
    if a <= 0 or x < 0:
        raise DomainError(f"Q(a, x) needs a > 0 and x >= 0, got a={a}, x={x}")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _lower_series(a, x))
    return min(1.0, _upper_continued_fraction(a, x))


def chi_square_p_value(chi_square, dof):
    if dof <= 0:
        return 1.0
    return regularized_gamma_q(dof / 2.0, chi_square / 2.0)


# =============================================================================
# MOMENTS
# =============================================================================

def sample_moments(values):
    """
    Mean, unbiased variance, bias-corrected G1/G2 and the k-statistics.

    kappa3 and kappa4 are the unbiased cumulant estimators k3 and k4, so
    G1 = k3 / k2^1.5 and G2 = k4 / k2^2. Third-order values need at least 3
    samples and fourth-order values 4; skewness and kurtosis are NaN for a
    constant sample.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    if n == 0:
        raise EmptyStreamError("no samples")
    mean = float(x.mean())
    centered = x - mean
    m2 = float(np.mean(centered ** 2))
    m3 = float(np.mean(centered ** 3))
    m4 = float(np.mean(centered ** 4))
    variance = m2 * n / (n - 1) if n > 1 else 0.0

    k3 = n * n * m3 / ((n - 1) * (n - 2)) if n > 2 else math.nan
    k4 = (
        n * n * ((n + 1) * m4 - 3 * (n - 1) * m2 * m2) / ((n - 1) * (n - 2) * (n - 3))
        if n > 3 else math.nan
    )

    skewness = math.nan
    kurtosis = math.nan
    if m2 > 0.0:
        skewness = k3 / variance ** 1.5
        kurtosis = k4 / variance ** 2

    return MomentSet(
        mean=mean,
        variance=variance,
        skewness=skewness,
        excess_kurtosis=kurtosis,
        kappa1=mean,
        kappa2=variance,
        kappa3=k3,
        kappa4=k4,
    )


def serial_correlation(values):
    """Lag-1 Pearson correlation; NaN when either lagged series is constant."""
    x = np.asarray(values, dtype=np.float64)
    if x.size < 3:
        return math.nan
    head = x[:-1] - x[:-1].mean()
    tail = x[1:] - x[1:].mean()
    denominator = math.sqrt(float(head @ head) * float(tail @ tail))
    if denominator == 0.0:
        return math.nan
    return float(head @ tail) / denominator


@dataclass(frozen=True)
class SampleSummary:
    """Location and shape of a raw sample."""
    count: int
    mean: float
    median: float
    mode: float
    std: float
    variance: float
    skewness: float
    excess_kurtosis: float

    def as_dict(self):
        return {
            name: (None if isinstance(value, float) and math.isnan(value) else value)
            for name, value in self.__dict__.items()
        }


def sample_summary(values):
    x = np.asarray(values)
    moments = sample_moments(x)
    uniques, counts = np.unique(x, return_counts=True)
    return SampleSummary(
        count=int(x.size),
        mean=moments.mean,
        median=float(np.median(x)),
        mode=float(uniques[np.argmax(counts)]),
        std=math.sqrt(moments.variance),
        variance=moments.variance,
        skewness=moments.skewness,
        excess_kurtosis=moments.excess_kurtosis,
    )


# =============================================================================
# STREAM ANALYSIS
# =============================================================================

@dataclass(frozen=True)
class StatsReport:
    alphabet_size: int
    sample_count: int
    histogram: tuple = field(repr=False)
    shannon_entropy_bits: float
    min_entropy_bits: float
    chi_square: float
    degrees_of_freedom: int
    p_value: float
    max_deviation: float
    deviation_percent: float
    moments: MomentSet
    serial_correlation_lag1: float

    def as_dict(self):
        def clean(value):
            return None if isinstance(value, float) and math.isnan(value) else value

        return {
            'alphabet_size': self.alphabet_size,
            'sample_count': self.sample_count,
            'shannon_entropy_bits': self.shannon_entropy_bits,
            'min_entropy_bits': self.min_entropy_bits,
            'min_entropy_estimator': 'plug-in',
            'chi_square': self.chi_square,
            'degrees_of_freedom': self.degrees_of_freedom,
            'p_value': self.p_value,
            'max_deviation': self.max_deviation,
            'deviation_percent': self.deviation_percent,
            'mean': clean(self.moments.mean),
            'variance': clean(self.moments.variance),
            'skewness': clean(self.moments.skewness),
            'excess_kurtosis': clean(self.moments.excess_kurtosis),
            'serial_correlation_lag1': clean(self.serial_correlation_lag1),
            'histogram': list(self.histogram),
        }


def _as_symbols(stream):
    if isinstance(stream, (bytes, bytearray, memoryview)):
        return np.frombuffer(bytes(stream), dtype=np.uint8).astype(np.int64)
    return np.asarray(stream, dtype=np.int64).reshape(-1)


def analyze(stream, alphabet_size=256):
    """Full report for a stream of symbols in [0, alphabet_size)."""
    symbols = _as_symbols(stream)
    n = int(symbols.size)
    if n == 0:
        raise EmptyStreamError("cannot analyze an empty stream")
    if symbols.min() < 0 or symbols.max() >= alphabet_size:
        raise DomainError(f"symbols must lie in [0, {alphabet_size})")

    minimum = get_setting('RPSS_MIN_SAMPLES_PER_SYMBOL') * alphabet_size
    if n < minimum:
        logger.warning(
            f"Only {n} samples for {alphabet_size} symbols; "
            f"chi-square and entropy estimates want at least {minimum}"
        )

    counts = np.bincount(symbols, minlength=alphabet_size)
    freqs = counts / n
    nonzero = freqs[freqs > 0]
    shannon = float(-np.sum(nonzero * np.log2(nonzero))) + 0.0
    min_entropy = float(-np.log2(freqs.max())) + 0.0

    expected = n / alphabet_size
    chi_square = float(np.sum((counts - expected) ** 2) / expected)
    dof = alphabet_size - 1
    p_value = chi_square_p_value(chi_square, dof)
    deviation = float(np.max(np.abs(freqs - 1.0 / alphabet_size)))

    return StatsReport(
        alphabet_size=alphabet_size,
        sample_count=n,
        histogram=tuple(counts.tolist()),
        shannon_entropy_bits=shannon,
        min_entropy_bits=min_entropy,
        chi_square=chi_square,
        degrees_of_freedom=dof,
        p_value=p_value,
        max_deviation=deviation,
        deviation_percent=deviation * alphabet_size * 100.0,
        moments=sample_moments(symbols),
        serial_correlation_lag1=serial_correlation(symbols),
    )


# =============================================================================
# THEORY VS EMPIRICAL
# =============================================================================

@dataclass(frozen=True)
class MomentComparison:
    name: str
    empirical: float
    theory: float
    abs_diff: float
    rel_diff: float
    tolerance: float
    within: bool

    def as_dict(self):
        return dict(self.__dict__)


def compare_moments(empirical, theory, tolerances=None):
    """
    Side-by-side mean, variance, skewness and excess kurtosis.

    empirical may be a StatsReport, a MomentSet, a SampleSummary or raw
    samples. Relative differences are taken against the theory value.
    """
    limits = dict(DEFAULT_TOLERANCES)
    limits.update(tolerances or {})

    if isinstance(empirical, StatsReport):
        empirical = empirical.moments
    elif not isinstance(empirical, (MomentSet, SampleSummary)):
        empirical = sample_moments(empirical)

    rows = []
    for name in ('mean', 'variance', 'skewness', 'excess_kurtosis'):
        observed = getattr(empirical, name)
        expected = getattr(theory, name)
        abs_diff = abs(observed - expected)
        rel_diff = abs_diff / abs(expected) if expected else abs_diff
        rows.append(MomentComparison(
            name=name,
            empirical=observed,
            theory=expected,
            abs_diff=abs_diff,
            rel_diff=rel_diff,
            tolerance=limits[name],
            within=rel_diff <= limits[name],
        ))
    return rows
