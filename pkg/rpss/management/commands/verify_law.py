"""
Management command checking the composition law against brute force.

Usage:
    python manage.py verify_law -N 3 -m 2 -R 8 --jitter two-point
    python manage.py verify_law -N 4 -m 4 -R 16 --jitter fat-like --monte-carlo --cycles 100000 \
        --engine-seed 1 --timer-seed 2

Prints the largest entry-wise gap between the lattice inversion and the
NB-weighted convolution oracle for both N_p and T, the convergence bounds
and, with --monte-carlo, simulated residue frequencies against 3-sigma bands.
"""
import math

import numpy as np

from rpss.analytics import (
    convergence_report,
    exact_np_mod,
    exact_t_mod,
    mod_residue_np,
    mod_residue_t,
)
from rpss.conf import get_setting
from rpss.engine import SortingEngine
from rpss.exceptions import ConfigurationError
from rpss.management.base import RpssCommand
from rpss.reports import text_table, to_json
from rpss.rng import Pcg64Rng
from rpss.timers import SimulatedTimer


def band_check(counts, expected_probs):
    """Residues whose empirical frequency leaves the 3-sigma binomial band."""
    total = int(np.sum(counts))
    outside = []
    for residue, (count, p) in enumerate(zip(counts, expected_probs)):
        sigma = math.sqrt(p * (1.0 - p) / total)
        if abs(count / total - p) > 3.0 * sigma:
            outside.append(residue)
    return outside


class Command(RpssCommand):
    help = 'Compare lattice-inversion residue laws with the convolution oracle'
    uses_modulus = True

    def add_arguments(self, parser):
        self.add_system_arguments(parser)
        self.add_jitter_arguments(parser)
        parser.add_argument(
            '--tail-eps',
            type=float,
            default=get_setting('RPSS_TAIL_EPS'),
            help='NB truncation tolerance of the oracle'
        )
        parser.add_argument('--monte-carlo', action='store_true', help='Also simulate cycles')
        parser.add_argument(
            '--cycles',
            type=int,
            default=get_setting('RPSS_MONTE_CARLO_CYCLES'),
            help='Monte Carlo cycles'
        )
        self.add_seed_arguments(parser)
        self.add_format_argument(parser)

    def build_config(self, options):
        config = self.base_config(options)
        if options['monte_carlo'] and options['cycles'] < 1:
            raise ConfigurationError(f"--monte-carlo needs --cycles >= 1, got {options['cycles']}")
        config.count = options['cycles']
        config.extra = {
            'tail_eps': options['tail_eps'],
            'monte_carlo': options['monte_carlo'],
        }
        return config

    def monte_carlo(self, config, cfg, theory_np, theory_t):
        engine = SortingEngine(
            cfg,
            Pcg64Rng(config.engine_seed),
            SimulatedTimer(config.jitter, config.timer_seed),
        )
        modulus = cfg.modulus
        n_counts = np.zeros(modulus, dtype=np.int64)
        t_counts = np.zeros(modulus, dtype=np.int64)
        for sample in engine.cycles(config.count):
            n_counts[sample.n_p % modulus] += 1
            t_counts[sample.t_ticks % modulus] += 1
        n_freqs = n_counts / config.count
        t_freqs = t_counts / config.count
        return {
            'cycles': config.count,
            'n_p_max_deviation': float(np.max(np.abs(n_freqs - 1.0 / modulus))),
            't_max_deviation': float(np.max(np.abs(t_freqs - 1.0 / modulus))),
            'n_p_outside_3sigma': band_check(n_counts, theory_np.probabilities),
            't_outside_3sigma': band_check(t_counts, theory_t.probabilities),
        }

    def run(self, config):
        cfg = config.rpss_config()
        tail_eps = config.extra['tail_eps']
        if config.extra['monte_carlo']:
            config.fill_seeds()
        self.echo_config(config)

        law_np = mod_residue_np(cfg)
        oracle_np = exact_np_mod(cfg, tail_eps)
        law_t = mod_residue_t(cfg, config.jitter)
        oracle_t = exact_t_mod(cfg, config.jitter, tail_eps)
        report = convergence_report(cfg, config.jitter)

        result = {
            'system': cfg.as_dict(),
            'jitter': config.jitter_label,
            'tail_eps': tail_eps,
            'oracle_tail_mass': oracle_t.tail_mass,
            'n_p_law_vs_oracle': float(np.max(np.abs(law_np.vector - oracle_np.vector))),
            't_law_vs_oracle': float(np.max(np.abs(law_t.vector - oracle_t.vector))),
            'n_p_max_deviation': law_np.max_deviation,
            't_max_deviation': law_t.max_deviation,
            'convergence': report.as_dict(),
        }
        if config.extra['monte_carlo']:
            result['monte_carlo'] = self.monte_carlo(config, cfg, law_np, law_t)
            result['seeds'] = config.seed_summary()

        if config.fmt == 'json':
            self.stdout.write(to_json(result))
        else:
            self.stdout.write(self.render_text(result), ending='')

        self.echo(
            f"verify_law: |law - oracle| = {result['t_law_vs_oracle']:.3e} (T), "
            f"{result['n_p_law_vs_oracle']:.3e} (N_p)"
        )

    def render_text(self, result):
        convergence = result['convergence']
        rows = [
            ('N_p', result['n_p_law_vs_oracle'], result['n_p_max_deviation'],
             convergence['rho_N'], convergence['bound_N']),
            ('T', result['t_law_vs_oracle'], result['t_max_deviation'],
             convergence['rho_T'], convergence['bound_T']),
        ]
        text = text_table(('observable', 'law_vs_oracle', 'max_deviation', 'rho', 'bound'), rows)
        if convergence['t_degenerate_modes']:
            text += f"degenerate T modes: {convergence['t_degenerate_modes']}\n"
        monte_carlo = result.get('monte_carlo')
        if monte_carlo:
            text += (
                f"monte carlo ({monte_carlo['cycles']} cycles): "
                f"N_p deviation {monte_carlo['n_p_max_deviation']:.6f}, "
                f"T deviation {monte_carlo['t_max_deviation']:.6f}, "
                f"outside 3 sigma: N_p {monte_carlo['n_p_outside_3sigma']}, "
                f"T {monte_carlo['t_outside_3sigma']}\n"
            )
        return text
