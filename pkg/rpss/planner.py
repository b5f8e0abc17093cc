"""
Parameter planner: enumerate (N, m) for an output width n and rank them
by cost per output byte.

rho_N^m is always recomputed from the convergence formula. The seven
published parameter rows are carried alongside as informational columns;
their rho_N^m values do not follow from that formula and are never used to
accept or reject a row.
"""
import logging
from dataclasses import dataclass

from rpss.analytics import convergence_report
from rpss.exceptions import ConfigurationError
from rpss.models import BYTE_ASSEMBLY_BITS, RpssConfig

logger = logging.getLogger(__name__)

# (n, R, N, m, published rho_N^m)
PUBLISHED_ROWS = (
    (1, 2, 2, 12, 0.0003),
    (1, 2, 3, 3, 0.010),
    (2, 4, 3, 5, 0.004),
    (2, 4, 4, 2, 0.010),
    (4, 16, 4, 4, 0.001),
    (4, 16, 5, 2, 0.006),
    (8, 256, 5, 5, 0.001),
)


@dataclass(frozen=True)
class PlanRow:
    bits: int
    modulus: int
    array_size: int
    success_count: int
    factorial: int
    expected_trials: int
    rho_n: float
    rho_n_pow_m: float
    bound: float
    cycle_cost: int
    byte_cost: int
    minimal_m: bool = False
    published_rho_n_pow_m: float | None = None
    note: str = ''

    @property
    def published_diff(self):
        if self.published_rho_n_pow_m is None:
            return None
        return self.rho_n_pow_m - self.published_rho_n_pow_m

    def as_dict(self):
        return {
            'n': self.bits,
            'R': self.modulus,
            'N': self.array_size,
            'm': self.success_count,
            'N_factorial': self.factorial,
            'M': self.expected_trials,
            'rho_N': self.rho_n,
            'rho_N_pow_m': self.rho_n_pow_m,
            'bound': self.bound,
            'C_cycle': self.cycle_cost,
            'C_byte': self.byte_cost,
            'minimal_m': self.minimal_m,
            'published_rho_N_pow_m': self.published_rho_n_pow_m,
            'published_diff': self.published_diff,
            'note': self.note,
        }


def _published_lookup():
    return {(n, N, m): rho for n, _, N, m, rho in PUBLISHED_ROWS}


def plan_row(bits, array_size, success_count, published=None):
    cfg = RpssConfig.for_bits(array_size, success_count, bits)
    report = convergence_report(cfg)
    published = _published_lookup().get((bits, array_size, success_count)) if published is None else published
    note = ''
    if published is not None:
        ratio = report.rho_n_pow_m / published
        note = f"recomputed value is {ratio:.3g}x the published column"
    return PlanRow(
        bits=bits,
        modulus=cfg.modulus,
        array_size=array_size,
        success_count=success_count,
        factorial=cfg.factorial,
        expected_trials=cfg.expected_trials,
        rho_n=report.rho_n,
        rho_n_pow_m=report.rho_n_pow_m,
        bound=report.bound_n,
        cycle_cost=cfg.cycle_cost,
        byte_cost=cfg.byte_cost,
        published_rho_n_pow_m=published,
        note=note,
    )


def plan(bits, threshold=0.01, max_array_size=6, max_success_count=8,
         min_array_size=2, min_success_count=1):
    """
    Every (N, m) in bounds with rho_N^m < threshold, cheapest byte first.

    The smallest qualifying m for each N is flagged minimal_m.
    """
    if bits not in BYTE_ASSEMBLY_BITS:
        raise ConfigurationError(f"bits must be one of {BYTE_ASSEMBLY_BITS}, got {bits}")
    if not 0.0 < threshold <= 1.0:
        raise ConfigurationError(f"threshold must be in (0, 1], got {threshold}")
    if min_array_size < 2 or max_array_size < min_array_size:
        raise ConfigurationError(f"bad array size bounds [{min_array_size}, {max_array_size}]")
    if min_success_count < 1 or max_success_count < min_success_count:
        raise ConfigurationError(
            f"bad success count bounds [{min_success_count}, {max_success_count}]"
        )

    rows = []
    for array_size in range(min_array_size, max_array_size + 1):
        found_minimal = False
        for success_count in range(min_success_count, max_success_count + 1):
            row = plan_row(bits, array_size, success_count)
            if row.rho_n_pow_m >= threshold:
                continue
            if not found_minimal:
                row = _flag_minimal(row)
                found_minimal = True
            rows.append(row)

    rows.sort(key=lambda r: (r.byte_cost, r.array_size, r.success_count))
    logger.debug(f"Planner n={bits} threshold={threshold}: {len(rows)} rows")
    return rows


def _flag_minimal(row):
    return PlanRow(**{**row.__dict__, 'minimal_m': True})


def published_plan():
    """The published parameter rows recomputed with the convergence formula."""
    return [
        plan_row(bits, array_size, success_count, published=rho)
        for bits, _, array_size, success_count, rho in PUBLISHED_ROWS
    ]
