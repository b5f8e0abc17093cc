"""
System-level value types: parameters, jitter laws, moments and residue
distributions.
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np

from rpss.exceptions import ConfigurationError, JitterModelError, NumericalError

# N! must fit in 64 bits
MAX_ARRAY_SIZE = 20

BYTE_ASSEMBLY_BITS = (1, 2, 4, 8)

PROBABILITY_SUM_TOLERANCE = 1e-12

RESIDUE_SUM_TOLERANCE = 1e-9


def as_tick(value):
    """Integer tick from value; 3.0 is accepted, 2.5 and "3" are not."""
    if isinstance(value, (bool, str, bytes)):
        raise JitterModelError(f"tick {value!r} is not an integer")
    try:
        tick = int(value)
    except (TypeError, ValueError, OverflowError):
        raise JitterModelError(f"tick {value!r} is not an integer") from None
    if tick != value:
        raise JitterModelError(f"tick {value!r} is not an integer")
    return tick


@dataclass(frozen=True)
class RpssConfig:
    """
    Conjugate-observable system parameters.

    The success probability p = 1/N! is never stored as a float: the exact
    factorial is kept and p is derived at each use site.

    Attributes:
        array_size: N, number of array elements (2..20)
        success_count: m, sorted arrangements required per cycle
        modulus: R, residue modulus for both observables
        output_bits: n, bits per residue when residues are packed into bytes
    """
    array_size: int
    success_count: int
    modulus: int = 256
    output_bits: int | None = None

    def __post_init__(self):
        if not 2 <= self.array_size <= MAX_ARRAY_SIZE:
            raise ConfigurationError(
                f"array_size must be in [2, {MAX_ARRAY_SIZE}], got {self.array_size}"
            )
        if self.success_count < 1:
            raise ConfigurationError(f"success_count must be >= 1, got {self.success_count}")
        if self.modulus < 1:
            raise ConfigurationError(f"modulus must be >= 1, got {self.modulus}")
        if self.output_bits is not None:
            if self.output_bits not in BYTE_ASSEMBLY_BITS:
                raise ConfigurationError(
                    f"output_bits must be one of {BYTE_ASSEMBLY_BITS}, got {self.output_bits}"
                )
            if self.modulus != 2 ** self.output_bits:
                raise ConfigurationError(
                    f"modulus {self.modulus} does not match output_bits {self.output_bits}"
                )

    @classmethod
    def for_bits(cls, array_size, success_count, output_bits):
        """Build a byte-assembly configuration with R = 2^n."""
        if output_bits not in BYTE_ASSEMBLY_BITS:
            raise ConfigurationError(
                f"output_bits must be one of {BYTE_ASSEMBLY_BITS}, got {output_bits}"
            )
        return cls(array_size, success_count, 2 ** output_bits, output_bits)

    @property
    def factorial(self):
        return math.factorial(self.array_size)

    @property
    def success_prob(self):
        """p = 1/N! as a float."""
        return 1.0 / self.factorial

    @property
    def expected_trials(self):
        """M = m N!, exact."""
        return self.success_count * self.factorial

    @property
    def cycle_cost(self):
        """C_cycle = m N! N, exact."""
        return self.expected_trials * self.array_size

    @property
    def byte_cost(self):
        """C_byte = (8/n) C_cycle, exact."""
        if self.output_bits is None:
            raise ConfigurationError("byte_cost needs output_bits")
        return (8 // self.output_bits) * self.cycle_cost

    def with_success_count(self, success_count):
        return replace(self, success_count=success_count)

    def with_modulus(self, modulus):
        bits = self.output_bits if modulus == self.modulus else None
        return replace(self, modulus=modulus, output_bits=bits)

    def as_dict(self):
        data = {
            'N': self.array_size,
            'm': self.success_count,
            'R': self.modulus,
            'n': self.output_bits,
            'N_factorial': self.factorial,
            'M': self.expected_trials,
            'C_cycle': self.cycle_cost,
        }
        if self.output_bits is not None:
            data['C_byte'] = self.byte_cost
        return data


@dataclass(frozen=True)
class JitterModel:
    """
    Finite discrete law of the per-permutation runtime X on integer ticks.

    Zero-tick values are allowed; the empirical runtime tables record them.
    """
    ticks: tuple
    probs: tuple

    def __post_init__(self):
        ticks = tuple(as_tick(t) for t in self.ticks)
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, 'ticks', ticks)
        object.__setattr__(self, 'probs', probs)

        if not ticks:
            raise JitterModelError("jitter support is empty")
        if len(ticks) != len(probs):
            raise JitterModelError(
                f"{len(ticks)} ticks but {len(probs)} probabilities"
            )
        if len(set(ticks)) != len(ticks):
            raise JitterModelError("tick values must be distinct")
        if min(ticks) < 0:
            raise JitterModelError("tick values must be >= 0")
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise JitterModelError("probabilities must lie in [0, 1]")
        total = math.fsum(probs)
        if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise JitterModelError(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def degenerate(cls, tick):
        """X == tick with probability one."""
        return cls((tick,), (1.0,))

    @classmethod
    def from_mapping(cls, mapping):
        items = sorted(mapping.items())
        return cls(tuple(t for t, _ in items), tuple(p for _, p in items))

    @property
    def tick_array(self):
        return np.asarray(self.ticks, dtype=np.int64)

    @property
    def prob_array(self):
        return np.asarray(self.probs, dtype=np.float64)

    @property
    def max_tick(self):
        return max(self.ticks)

    def probability_of(self, tick):
        try:
            return self.probs[self.ticks.index(tick)]
        except ValueError:
            return 0.0

    @property
    def mean(self):
        return math.fsum(t * p for t, p in zip(self.ticks, self.probs))

    def central_moment(self, order):
        mu = self.mean
        return math.fsum(p * (t - mu) ** order for t, p in zip(self.ticks, self.probs))

    @property
    def variance(self):
        return self.central_moment(2)

    @property
    def std(self):
        return math.sqrt(self.variance)

    @property
    def kappa3(self):
        return self.central_moment(3)

    @property
    def kappa4(self):
        return self.central_moment(4) - 3.0 * self.variance ** 2

    def characteristic(self, omega):
        """phi_X(omega) = sum_x P(x) e^{i omega x}."""
        return complex(np.sum(self.prob_array * np.exp(1j * omega * self.tick_array)))

    def characteristic_array(self, omegas):
        omegas = np.asarray(omegas, dtype=np.float64)
        phases = np.exp(1j * np.outer(omegas, self.tick_array))
        return phases @ self.prob_array

    def residue_pmf(self, modulus):
        """Law of X mod R as a dense vector."""
        return np.bincount(self.tick_array % modulus, weights=self.prob_array, minlength=modulus)

    def dense_pmf(self):
        """P(X = t) for t = 0..max_tick."""
        return np.bincount(self.tick_array, weights=self.prob_array, minlength=self.max_tick + 1)

    def as_dict(self):
        return {'ticks': list(self.ticks), 'probs': list(self.probs)}


@dataclass(frozen=True)
class MomentSet:
    """
    First four moments and cumulants of a distribution.

    Skewness and excess kurtosis are NaN when the variance is zero.
    """
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    kappa1: float
    kappa2: float
    kappa3: float
    kappa4: float

    @classmethod
    def from_cumulants(cls, kappa1, kappa2, kappa3, kappa4):
        if kappa2 < 0:
            raise NumericalError(f"negative variance {kappa2!r}")
        if kappa2 > 0:
            skewness = kappa3 / kappa2 ** 1.5
            excess_kurtosis = kappa4 / kappa2 ** 2
        else:
            skewness = math.nan
            excess_kurtosis = math.nan
        return cls(
            mean=kappa1,
            variance=kappa2,
            skewness=skewness,
            excess_kurtosis=excess_kurtosis,
            kappa1=kappa1,
            kappa2=kappa2,
            kappa3=kappa3,
            kappa4=kappa4,
        )

    @property
    def std(self):
        return math.sqrt(self.variance)

    def as_dict(self):
        return {
            name: (None if isinstance(value, float) and math.isnan(value) else value)
            for name, value in (
                ('mean', self.mean),
                ('variance', self.variance),
                ('skewness', self.skewness),
                ('excess_kurtosis', self.excess_kurtosis),
                ('kappa1', self.kappa1),
                ('kappa2', self.kappa2),
                ('kappa3', self.kappa3),
                ('kappa4', self.kappa4),
            )
        }


@dataclass(frozen=True)
class ResidueDistribution:
    """
    Probability vector over Z_R.

    tail_mass is the negative binomial mass an oracle truncated away; the
    vector then sums to 1 - tail_mass.
    """
    modulus: int
    probabilities: tuple
    tail_mass: float = 0.0

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probabilities)
        object.__setattr__(self, 'probabilities', probs)
        if len(probs) != self.modulus:
            raise NumericalError(f"expected {self.modulus} probabilities, got {len(probs)}")
        if min(probs) < 0.0:
            raise NumericalError("residue probabilities must be >= 0")
        total = math.fsum(probs)
        if abs(total - 1.0) > RESIDUE_SUM_TOLERANCE + self.tail_mass:
            raise NumericalError(f"residue probabilities sum to {total!r}")

    @classmethod
    def from_vector(cls, vector, tail_mass=0.0):
        vector = np.asarray(vector, dtype=np.float64)
        return cls(len(vector), tuple(vector.tolist()), tail_mass)

    @property
    def vector(self):
        return np.asarray(self.probabilities, dtype=np.float64)

    @property
    def max_deviation(self):
        """delta = max_r |p_r - 1/R|."""
        return float(np.max(np.abs(self.vector - 1.0 / self.modulus)))

    @property
    def deviation_percent(self):
        """delta relative to the uniform probability, in percent."""
        return self.max_deviation * self.modulus * 100.0

    @property
    def shannon_entropy_bits(self):
        p = self.vector[self.vector > 0]
        return float(-np.sum(p * np.log2(p)))

    @property
    def min_entropy_bits(self):
        return float(-np.log2(np.max(self.vector)))

    def as_dict(self):
        return {
            'modulus': self.modulus,
            'probabilities': list(self.probabilities),
            'max_deviation': self.max_deviation,
            'deviation_percent': self.deviation_percent,
            'shannon_entropy_bits': self.shannon_entropy_bits,
            'min_entropy_bits': self.min_entropy_bits,
            'tail_mass': self.tail_mass,
        }


@dataclass(frozen=True)
class TickDistribution:
    """Truncated law of T on ticks 0..len-1."""
    probabilities: np.ndarray = field(repr=False)
    tail_mass: float = 0.0

    @property
    def support(self):
        return np.arange(len(self.probabilities))

    @property
    def mean(self):
        return float(self.support @ self.probabilities)

    @property
    def variance(self):
        mu = self.mean
        return float(((self.support - mu) ** 2) @ self.probabilities)

    def moments(self):
        t = self.support
        p = self.probabilities
        mu = float(t @ p)
        centered = t - mu
        m2 = float(centered ** 2 @ p)
        m3 = float(centered ** 3 @ p)
        m4 = float(centered ** 4 @ p)
        return MomentSet.from_cumulants(mu, m2, m3, m4 - 3.0 * m2 ** 2)

    def characteristic(self, omega):
        return complex(np.sum(self.probabilities * np.exp(1j * omega * self.support)))


@dataclass(frozen=True)
class ConvergenceReport:
    """
    Geometric decay factors of the residue distributions.

    rho_n_modes[k-1] is rho_{N,k} for k = 1..R-1; rho_t_modes likewise when a
    jitter model was supplied. Modes where |phi_X| reaches 1 with phi_X = 1
    (jitter living on a sublattice of R) never decay and are listed in
    t_degenerate_modes.
    """
    modulus: int
    success_count: int
    rho_n_modes: tuple
    rho_t_modes: tuple | None = None
    t_degenerate_modes: tuple = ()

    @property
    def rho_n(self):
        return max(self.rho_n_modes, default=0.0)

    @property
    def rho_t(self):
        if self.rho_t_modes is None:
            return None
        return max(self.rho_t_modes, default=0.0)

    @property
    def rho_n_pow_m(self):
        return self.rho_n ** self.success_count

    def _bound(self, rho):
        return (self.modulus - 1) / self.modulus * rho ** self.success_count

    @property
    def bound_n(self):
        return self._bound(self.rho_n)

    @property
    def bound_t(self):
        if self.rho_t_modes is None:
            return None
        return self._bound(self.rho_t)

    def as_dict(self):
        return {
            'modulus': self.modulus,
            'm': self.success_count,
            'rho_N': self.rho_n,
            'rho_N_pow_m': self.rho_n_pow_m,
            'bound_N': self.bound_n,
            'rho_T': self.rho_t,
            'bound_T': self.bound_t,
            'rho_N_modes': list(self.rho_n_modes),
            'rho_T_modes': None if self.rho_t_modes is None else list(self.rho_t_modes),
            't_degenerate_modes': list(self.t_degenerate_modes),
        }
