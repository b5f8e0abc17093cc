"""
Distribution theory of the conjugate observables.

N_p ~ NB(m, p) with p = 1/N! counts the trials to m sorted arrangements;
T = X_1 + ... + X_{N_p} is their total runtime. The composition law
phi_T(omega) = G(phi_X(omega)) links the two, and inverting it at the R-th
roots of unity gives the exact residue distributions mod R.

Two brute-force oracles (exact_t_mod, exact_t_distribution) rebuild the
same laws by NB-weighted convolution so the closed forms can be checked
against something independent.
"""
import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from rpss.conf import get_setting
from rpss.exceptions import (
    ConfigurationError,
    DomainError,
    NumericalError,
    SingularityError,
    TruncationError,
)
from rpss.models import (
    ConvergenceReport,
    MomentSet,
    ResidueDistribution,
    TickDistribution,
)

logger = logging.getLogger(__name__)

# Inversion roundoff below this is zeroed; anything more negative is a bug
NEGATIVE_PROBABILITY_TOLERANCE = 1e-9

SINGULARITY_FLOOR = 1e-300

PMF_CHUNK = 4096


# =============================================================================
# NEGATIVE BINOMIAL LAW OF N_p
# =============================================================================

def nb_pmf(cfg, k):
    """P(N_p = k) = C(k-1, m-1) p^m (1-p)^(k-m), evaluated in log space."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    m = cfg.success_count
    if k < m:
        return 0.0
    p = cfg.success_prob
    log_value = (
        math.lgamma(k) - math.lgamma(m) - math.lgamma(k - m + 1)
        + m * math.log(p) + (k - m) * math.log1p(-p)
    )
    return math.exp(log_value)


def nb_pgf(cfg, z):
    """
    G(z) = (p z / (1 - (1-p) z))^m for |z| < 1/(1-p).

    The denominator is evaluated as (1 - z) + p z so that G(1) is exactly 1.
    """
    z = complex(z)
    p = cfg.success_prob
    if abs(z) * (1.0 - p) >= 1.0:
        raise DomainError(f"|z| = {abs(z)!r} outside the PGF domain |z| < {1.0 / (1.0 - p)!r}")
    return ((p * z) / ((1.0 - z) + p * z)) ** cfg.success_count


def nb_moments(cfg):
    """Closed-form cumulants of N_p."""
    m = cfg.success_count
    p = cfg.success_prob
    q = 1.0 - p
    f = float(cfg.factorial)
    return MomentSet.from_cumulants(
        m * f,
        m * q * f ** 2,
        m * q * (2.0 - p) * f ** 3,
        m * q * (6.0 - 6.0 * p + p * p) * f ** 4,
    )


def nb_pmf_table(cfg, tail_eps=None, cap=None):
    """
    P(N_p = k) for k = m..K, where K is the first k at which the cumulative
    mass reaches 1 - tail_eps.

    Returns (m, pmf vector, tail_mass). Raises TruncationError when K would
    pass the expected-trials cap.
    """
    tail_eps = get_setting('RPSS_TAIL_EPS') if tail_eps is None else tail_eps
    cap = get_setting('RPSS_EXPECTED_TRIALS_CAP') if cap is None else cap
    if not 0.0 < tail_eps <= 1e-6:
        raise ConfigurationError(f"tail_eps must be in (0, 1e-6], got {tail_eps}")
    if cfg.expected_trials > cap:
        raise TruncationError(
            f"expected trials {cfg.expected_trials} exceed the cap {cap}"
        )

    m = cfg.success_count
    log_q = math.log1p(-cfg.success_prob)
    log_head = -m * math.log(cfg.factorial)
    k0 = m
    total = 0.0
    chunks = []
    target = 1.0 - tail_eps

    while True:
        ks = np.arange(k0, k0 + PMF_CHUNK, dtype=np.float64)
        steps = np.log(ks) - np.log(ks - m + 1) + log_q
        logs = log_head + np.concatenate(([0.0], np.cumsum(steps[:-1])))
        values = np.exp(logs)
        running = total + np.cumsum(values)
        reached = np.flatnonzero(running >= target)
        if reached.size:
            chunks.append(values[:reached[0] + 1])
            break
        chunks.append(values)
        total = float(running[-1])
        log_head = float(logs[-1] + steps[-1])
        k0 += PMF_CHUNK
        if k0 > cap:
            raise TruncationError(
                f"NB tail above {tail_eps} persists past k = {cap}"
            )

    pmf = np.concatenate(chunks)
    tail_mass = max(0.0, 1.0 - math.fsum(pmf))
    logger.debug(
        f"NB table N={cfg.array_size} m={m}: truncated at k={m + len(pmf) - 1}, "
        f"tail mass {tail_mass:.3e}"
    )
    return m, pmf, tail_mass


# =============================================================================
# COMPOSITION LAW AND MOMENTS OF T
# =============================================================================

def compose_cf(cfg, jitter, omega):
    """phi_T(omega) = G(phi_X(omega)); exactly 1 at omega = 0."""
    if omega == 0:
        return complex(1.0, 0.0)
    phi = jitter.characteristic(omega)
    return _pgf_of(cfg, phi)


def _pgf_of(cfg, phi):
    p = cfg.success_prob
    denominator = (1.0 - phi) + p * phi
    if abs(denominator) < SINGULARITY_FLOOR:
        raise SingularityError(f"composition denominator vanished at phi = {phi!r}")
    return (p * phi / denominator) ** cfg.success_count


def t_moments(cfg, jitter):
    """Cumulants of T by the law of total cumulance."""
    n = nb_moments(cfg)
    mu = jitter.mean
    var = jitter.variance
    k3x = jitter.kappa3
    k4x = jitter.kappa4
    return MomentSet.from_cumulants(
        mu * n.kappa1,
        mu ** 2 * n.kappa2 + var * n.kappa1,
        mu ** 3 * n.kappa3 + 3.0 * mu * var * n.kappa2 + k3x * n.kappa1,
        (
            mu ** 4 * n.kappa4
            + 6.0 * mu ** 2 * var * n.kappa3
            + (4.0 * mu * k3x + 3.0 * var ** 2) * n.kappa2
            + k4x * n.kappa1
        ),
    )


# =============================================================================
# RESIDUES MOD R BY LATTICE INVERSION
# =============================================================================

def _root_angles(modulus):
    return 2.0 * np.pi * np.arange(modulus) / modulus


def _invert(values_at_roots, modulus):
    """P(r) = (1/R) sum_k G_k e^{-i r omega_k}."""
    probs = np.fft.fft(values_at_roots).real / modulus
    worst = float(probs.min())
    if worst < -NEGATIVE_PROBABILITY_TOLERANCE:
        raise NumericalError(f"residue inversion produced probability {worst!r}")
    if worst < 0.0:
        logger.debug(f"Zeroing inversion roundoff down to {worst:.3e}")
        probs = np.where(probs < 0.0, 0.0, probs)
    return ResidueDistribution.from_vector(probs)


def _np_pgf_at_roots(cfg):
    modulus = cfg.modulus
    z = np.exp(1j * _root_angles(modulus))
    p = cfg.success_prob
    values = ((p * z) / ((1.0 - z) + p * z)) ** cfg.success_count
    values[0] = 1.0
    return values


def mod_residue_np(cfg):
    """Exact law of N_p mod R."""
    if cfg.modulus == 1:
        return ResidueDistribution.from_vector([1.0])
    return _invert(_np_pgf_at_roots(cfg), cfg.modulus)


def mod_residue_t(cfg, jitter):
    """Exact law of T mod R through the composition law."""
    modulus = cfg.modulus
    if modulus == 1:
        return ResidueDistribution.from_vector([1.0])
    omegas = _root_angles(modulus)
    values = np.empty(modulus, dtype=np.complex128)
    values[0] = 1.0
    for k in range(1, modulus):
        values[k] = compose_cf(cfg, jitter, omegas[k])
    return _invert(values, modulus)


# =============================================================================
# BRUTE-FORCE ORACLES
# =============================================================================

def exact_np_mod(cfg, tail_eps=None, cap=None):
    """Law of N_p mod R by summing the truncated pmf."""
    k_start, pmf, tail_mass = nb_pmf_table(cfg, tail_eps, cap)
    ks = np.arange(k_start, k_start + len(pmf))
    vector = np.bincount(ks % cfg.modulus, weights=pmf, minlength=cfg.modulus)
    return ResidueDistribution.from_vector(vector, tail_mass)


def exact_t_mod(cfg, jitter, tail_eps=None, cap=None):
    """
    Law of T mod R as sum_k P(N_p = k) (X mod R)^{*k}.

    The k-fold cyclic convolution is built up one step at a time over Z_R.
    """
    modulus = cfg.modulus
    k_start, pmf, tail_mass = nb_pmf_table(cfg, tail_eps, cap)
    x = jitter.residue_pmf(modulus)
    shifts = [(int(r), float(x[r])) for r in np.flatnonzero(x)]

    state = np.zeros(modulus)
    state[0] = 1.0
    result = np.zeros(modulus)
    for k in range(1, k_start + len(pmf)):
        stepped = np.zeros(modulus)
        for shift, weight in shifts:
            stepped += weight * np.roll(state, shift)
        state = stepped
        if k >= k_start:
            result += pmf[k - k_start] * state
    return ResidueDistribution.from_vector(result, tail_mass)


def exact_t_distribution(cfg, jitter, tail_eps=None, cap=None):
    """
    Truncated law of T on ticks by iterated linear convolution.

    Memory grows with K * max_tick, so this is for small configurations.
    """
    k_start, pmf, tail_mass = nb_pmf_table(cfg, tail_eps, cap)
    k_max = k_start + len(pmf) - 1
    length = k_max * jitter.max_tick + 1
    support = [(t, p) for t, p in zip(jitter.ticks, jitter.probs) if p > 0.0]

    state = np.zeros(length)
    state[0] = 1.0
    reach = 1
    result = np.zeros(length)
    for k in range(1, k_max + 1):
        stepped = np.zeros(length)
        for tick, weight in support:
            stepped[tick:tick + reach] += weight * state[:reach]
        reach += jitter.max_tick
        state = stepped
        if k >= k_start:
            result[:reach] += pmf[k - k_start] * state[:reach]
    return TickDistribution(result, tail_mass)


# =============================================================================
# CONVERGENCE
# =============================================================================

def convergence_report(cfg, jitter=None):
    """
    rho_{N,k} = |1 / ((1 - z_k) N! + z_k)| with z_k = e^{i 2 pi k / R}, and
    rho_{T,k} the same expression with z_k replaced by phi_X(omega_k).
    """
    modulus = cfg.modulus
    f = float(cfg.factorial)
    rho_n = []
    rho_t = [] if jitter is not None else None
    degenerate = []
    for k in range(1, modulus):
        omega = 2.0 * math.pi * k / modulus
        z = cmath.exp(1j * omega)
        rho_n.append(abs(1.0 / ((1.0 - z) * f + z)))
        if jitter is not None:
            phi = jitter.characteristic(omega)
            rho = abs(phi / ((1.0 - phi) * f + phi))
            if rho >= 1.0 - 1e-12:
                degenerate.append(k)
            rho_t.append(rho)
    if degenerate:
        logger.warning(
            f"Jitter law lives on a sublattice mod {modulus}; "
            f"modes {degenerate} of T never equidistribute"
        )
    return ConvergenceReport(
        modulus=modulus,
        success_count=cfg.success_count,
        rho_n_modes=tuple(rho_n),
        rho_t_modes=None if rho_t is None else tuple(rho_t),
        t_degenerate_modes=tuple(degenerate),
    )


@dataclass(frozen=True)
class DeviationRow:
    success_count: int
    max_deviation: float
    bound: float
    envelope: float


def deviation_by_success_count(cfg, counts):
    """
    Exact max deviation of N_p mod R from uniform for each m in counts,
    beside the bound ((R-1)/R) rho_N^m and the envelope (1/R) sum_k rho_{N,k}^m.
    """
    modes = np.asarray(convergence_report(cfg).rho_n_modes)
    rows = []
    for m in counts:
        current = cfg.with_success_count(m)
        deviation = mod_residue_np(current).max_deviation
        report = convergence_report(current)
        envelope = float(np.sum(modes ** m)) / cfg.modulus
        rows.append(DeviationRow(m, deviation, report.bound_n, envelope))
    return rows
